//! SVG document model: parsing into resolved marks, bounding boxes, and
//! attribute-level write-back.

mod matrix;
mod parse;
pub mod path;
mod rect;
mod style;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use matrix::TransformMatrix;
pub(crate) use matrix::fmt_num;
pub use path::{classify_path, PathData, Point, Segment};
pub use rect::Rect;
pub use style::Style;
pub use tree::{Element, Node, XmlDocument};

pub use parse::{parse_svg, parse_svg_with};

/// Class tags for elements the engine appends. Marks carrying them are never
/// extracted, so annotations and overlays never feed back into inference.
pub const ANNOTATION_CLASS: &str = "chartseam-annotation";
pub const OVERLAY_CLASS: &str = "chartseam-overlay";
pub const CLIP_CLASS: &str = "chartseam-clip";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("malformed XML at byte {offset}: {message}")]
    MalformedXml { offset: usize, message: String },
    #[error("root <svg> has no width/height or viewBox")]
    MissingDimensions,
    #[error("unsupported length unit in {0:?}")]
    UnsupportedUnit(String),
    #[error("invalid path data: {0}")]
    InvalidPathData(String),
    #[error("invalid transform: {0:?}")]
    InvalidTransform(String),
    #[error("unknown mark id {0}")]
    UnknownMarkId(usize),
}

/// Stable ordinal of a mark within its document (pre-order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MarkId(pub usize);

impl std::fmt::Display for MarkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MarkKind {
    Line,
    Ellipse,
    Rectangle,
    Polygon,
    Area,
    PathGeneric,
    Text,
    Use,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TextAnchor {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TextBaseline {
    Alphabetic,
    Middle,
    Hanging,
    TextBottom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Rect {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },
    Ellipse {
        cx: f64,
        cy: f64,
        rx: f64,
        ry: f64,
    },
    Line {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
    },
    Poly {
        points: Vec<Point>,
        closed: bool,
    },
    Path(PathData),
    Text {
        content: String,
        x: f64,
        y: f64,
        anchor: TextAnchor,
        baseline: TextBaseline,
        font_size: f64,
    },
    /// Inlined `use` target: parts expressed in the `use` element's frame.
    Use {
        href: String,
        parts: Vec<(TransformMatrix, Geometry)>,
        /// Kind of the referenced shape when it is a single element.
        inner: MarkKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedMark {
    pub id: MarkId,
    pub kind: MarkKind,
    pub geometry: Geometry,
    pub style: Style,
    /// Local-to-root map, including the element's own transform.
    pub global_matrix: TransformMatrix,
    /// Root map of the parent element (excludes the element's own transform).
    pub parent_matrix: TransformMatrix,
    /// The element's own `transform` attribute.
    pub own_transform: TransformMatrix,
    pub bbox: Rect,
    /// Pre-order index of the backing element in the retained tree.
    pub element: usize,
    pub tag: String,
    pub classes: Vec<String>,
}

impl ResolvedMark {
    pub fn text(&self) -> Option<&str> {
        match &self.geometry {
            Geometry::Text { content, .. } => Some(content.as_str()),
            _ => None,
        }
    }

    /// Pixel size used for size-encoding comparisons.
    pub fn area(&self) -> f64 {
        match &self.geometry {
            Geometry::Ellipse { .. } => std::f64::consts::PI * self.bbox.width() * self.bbox.height() / 4.0,
            _ => self.bbox.area(),
        }
    }

    /// Kind used for chart analysis; a `use` of one shape counts as that shape.
    pub fn shape_kind(&self) -> MarkKind {
        match &self.geometry {
            Geometry::Use { inner, .. } => *inner,
            _ => self.kind,
        }
    }

    /// Data-space vertices for continuous marks, in root coordinates.
    pub fn vertices(&self) -> Vec<Point> {
        let center = (self.bbox.center_x(), self.bbox.center_y());
        match &self.geometry {
            Geometry::Use { parts, .. } if parts.len() == 1 => {
                geometry_vertices(&parts[0].1, &self.global_matrix.then_inner(&parts[0].0)).unwrap_or_else(|| vec![center])
            }
            g => geometry_vertices(g, &self.global_matrix).unwrap_or_else(|| vec![center]),
        }
    }
}

fn geometry_vertices(g: &Geometry, m: &TransformMatrix) -> Option<Vec<Point>> {
    match g {
        Geometry::Path(p) => {
            let mut v = p.vertices(m);
            v.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
            Some(v)
        }
        Geometry::Poly { points, .. } => Some(points.iter().map(|p| m.apply(p.0, p.1)).collect()),
        Geometry::Line { x1, y1, x2, y2 } => Some(vec![m.apply(*x1, *y1), m.apply(*x2, *y2)]),
        _ => None,
    }
}

/// Tunables for mark extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParseOptions {
    /// Estimated glyph advance as a fraction of the font size.
    pub text_width_coeff: f64,
    /// Line height as a fraction of the font size.
    pub text_height_coeff: f64,
    pub flatten_tolerance: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            text_width_coeff: 0.6,
            text_height_coeff: 1.2,
            flatten_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvgDocument {
    pub width: f64,
    pub height: f64,
    pub marks: Vec<ResolvedMark>,
    pub tree: XmlDocument,
    pub options: ParseOptions,
}

impl SvgDocument {
    pub fn mark(&self, id: MarkId) -> Option<&ResolvedMark> {
        self.marks.get(id.0)
    }

    pub fn viewport(&self) -> Rect {
        Rect::new(0.0, self.width, 0.0, self.height)
    }

    /// Retained element at a pre-order index.
    pub fn element(&self, index: usize) -> Option<&Element> {
        fn walk<'a>(el: &'a Element, counter: &mut usize, target: usize) -> Option<&'a Element> {
            if *counter == target {
                return Some(el);
            }
            *counter += 1;
            el.child_elements().find_map(|c| walk(c, counter, target))
        }
        walk(&self.tree.root, &mut 0, index)
    }
}

/// Tight box of a mark's geometry under its global matrix.
pub fn bounding_box(mark: &ResolvedMark, options: &ParseOptions) -> Rect {
    geometry_bbox(&mark.geometry, &mark.global_matrix, options)
}

pub(crate) fn geometry_bbox(g: &Geometry, m: &TransformMatrix, opts: &ParseOptions) -> Rect {
    let point = || {
        let (x, y) = m.apply(0.0, 0.0);
        Rect::new(x, x, y, y)
    };
    match g {
        Geometry::Rect { x, y, width, height } => Rect::from_xywh(*x, *y, *width, *height).transformed(m),
        Geometry::Ellipse { cx, cy, rx, ry } => {
            let (px, py) = m.apply(*cx, *cy);
            let hw = ((m.a * rx).powi(2) + (m.c * ry).powi(2)).sqrt();
            let hh = ((m.b * rx).powi(2) + (m.d * ry).powi(2)).sqrt();
            Rect::new(px - hw, px + hw, py - hh, py + hh)
        }
        Geometry::Line { x1, y1, x2, y2 } => {
            Rect::from_points([m.apply(*x1, *y1), m.apply(*x2, *y2)]).expect("two points")
        }
        Geometry::Poly { points, .. } => {
            Rect::from_points(points.iter().map(|p| m.apply(p.0, p.1))).unwrap_or_else(point)
        }
        Geometry::Path(p) => p.bbox(m, opts.flatten_tolerance).unwrap_or_else(point),
        Geometry::Text {
            content,
            x,
            y,
            anchor,
            baseline,
            font_size,
        } => {
            let w = opts.text_width_coeff * font_size * content.chars().count() as f64;
            let h = opts.text_height_coeff * font_size;
            let left = match anchor {
                TextAnchor::Start => *x,
                TextAnchor::Middle => x - w / 2.0,
                TextAnchor::End => x - w,
            };
            let top = match baseline {
                TextBaseline::Alphabetic => y - 0.75 * h,
                TextBaseline::Middle => y - h / 2.0,
                TextBaseline::Hanging => *y,
                TextBaseline::TextBottom => y - h,
            };
            Rect::from_xywh(left, top, w, h).transformed(m)
        }
        Geometry::Use { parts, .. } => {
            let boxes: Vec<Rect> = parts
                .iter()
                .map(|(pm, pg)| geometry_bbox(pg, &m.then_inner(pm), opts))
                .collect();
            Rect::union_all(&boxes).unwrap_or_else(point)
        }
    }
}

/// One write-back override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Edit {
    SetAttr { mark: MarkId, name: String, value: String },
    RemoveAttr { mark: MarkId, name: String },
    SetText { mark: MarkId, text: String },
    /// Appended as the last child of the root `<svg>`.
    Append { element: Element },
}

impl Edit {
    pub fn set(mark: MarkId, name: &str, value: impl Into<String>) -> Edit {
        Edit::SetAttr {
            mark,
            name: name.to_string(),
            value: value.into(),
        }
    }

    pub fn mark(&self) -> Option<MarkId> {
        match self {
            Edit::SetAttr { mark, .. } | Edit::RemoveAttr { mark, .. } | Edit::SetText { mark, .. } => Some(*mark),
            Edit::Append { .. } => None,
        }
    }
}

/// Serializes the document with `edits` applied. Untouched elements keep their
/// attributes and order.
pub fn write_svg(doc: &SvgDocument, edits: &[Edit]) -> Result<Vec<u8>, SvgError> {
    let tree = apply_edits(doc, edits)?;
    Ok(tree.to_string().into_bytes())
}

pub(crate) fn apply_edits(doc: &SvgDocument, edits: &[Edit]) -> Result<XmlDocument, SvgError> {
    use std::collections::BTreeMap;
    let mut by_element: BTreeMap<usize, Vec<&Edit>> = BTreeMap::new();
    let mut appended = Vec::new();
    for e in edits {
        match e.mark() {
            Some(id) => {
                let mark = doc.mark(id).ok_or(SvgError::UnknownMarkId(id.0))?;
                by_element.entry(mark.element).or_default().push(e);
            }
            None => appended.push(e),
        }
    }
    let mut tree = doc.tree.clone();
    let mut counter = 0usize;
    edit_walk(&mut tree.root, &mut counter, &by_element);
    for e in appended {
        if let Edit::Append { element } = e {
            tree.root.children.push(Node::Element(element.clone()));
        }
    }
    Ok(tree)
}

fn edit_walk(
    el: &mut Element,
    counter: &mut usize,
    edits: &std::collections::BTreeMap<usize, Vec<&Edit>>,
) {
    let index = *counter;
    *counter += 1;
    for child in el.children.iter_mut() {
        if let Node::Element(c) = child {
            edit_walk(c, counter, edits);
        }
    }
    // Text replacement runs after the children are numbered.
    if let Some(list) = edits.get(&index) {
        for e in list {
            match e {
                Edit::SetAttr { name, value, .. } => el.set_attr(name.clone(), value.clone()),
                Edit::RemoveAttr { name, .. } => el.remove_attr(name),
                Edit::SetText { text, .. } => {
                    el.children = vec![Node::Text(text.clone())];
                }
                Edit::Append { .. } => {}
            }
        }
    }
}
