use std::collections::{BTreeMap, HashMap};

use super::path::{classify_path, PathData};
use super::style::{normalize_color, parse_inline_style, parse_length, INHERITED, PRESENTATION};
use super::tree::{Element, XmlDocument};
use super::{
    geometry_bbox, Geometry, MarkId, MarkKind, ParseOptions, ResolvedMark, Style, SvgDocument, SvgError,
    TextAnchor, TextBaseline, TransformMatrix, ANNOTATION_CLASS, CLIP_CLASS, OVERLAY_CLASS,
};

const NON_RENDERED: &[&str] = &[
    "defs",
    "clipPath",
    "mask",
    "pattern",
    "marker",
    "symbol",
    "linearGradient",
    "radialGradient",
    "style",
    "title",
    "desc",
    "metadata",
    "filter",
    "script",
    "foreignObject",
];

const DEFAULT_FONT_SIZE: f64 = 16.0;

pub fn parse_svg(bytes: &[u8]) -> Result<SvgDocument, SvgError> {
    parse_svg_with(bytes, ParseOptions::default())
}

pub fn parse_svg_with(bytes: &[u8], options: ParseOptions) -> Result<SvgDocument, SvgError> {
    let src = std::str::from_utf8(bytes).map_err(|e| SvgError::MalformedXml {
        offset: e.valid_up_to(),
        message: "input is not valid UTF-8".into(),
    })?;
    let tree = XmlDocument::parse(src)?;
    if tree.root.local_name() != "svg" {
        return Err(SvgError::MalformedXml {
            offset: 0,
            message: format!("root element is <{}>, expected <svg>", tree.root.name),
        });
    }
    let (width, height, root_matrix) = root_dimensions(&tree.root)?;

    let mut ids = HashMap::new();
    index_ids(&tree.root, &mut ids);

    let mut walker = Walker {
        marks: Vec::new(),
        counter: 0,
        ids: &ids,
        options,
    };
    let ctx = Ctx {
        matrix: root_matrix,
        props: BTreeMap::new(),
        opacity: 1.0,
    };
    walker.visit_root(&tree.root, &ctx)?;
    let marks = walker.marks;
    Ok(SvgDocument {
        width,
        height,
        marks,
        tree,
        options,
    })
}

fn root_dimensions(root: &Element) -> Result<(f64, f64, TransformMatrix), SvgError> {
    let view_box = match root.attr("viewBox") {
        Some(vb) => {
            let nums: Vec<f64> = vb
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| SvgError::InvalidTransform(format!("viewBox {vb:?}")))?;
            if nums.len() != 4 || nums[2] <= 0.0 || nums[3] <= 0.0 {
                return Err(SvgError::MissingDimensions);
            }
            Some((nums[0], nums[1], nums[2], nums[3]))
        }
        None => None,
    };
    let dim = |name: &str| -> Result<Option<f64>, SvgError> {
        match root.attr(name) {
            None => Ok(None),
            Some(v) => match parse_length(v, None) {
                Ok(n) => Ok(Some(n)),
                // An absolute unit on the root is only a display size; the
                // viewBox defines the user space all marks live in.
                Err(e) if view_box.is_some() => {
                    let _ = e;
                    Ok(None)
                }
                Err(e) => Err(e),
            },
        }
    };
    let w = dim("width")?;
    let h = dim("height")?;
    match (view_box, w, h) {
        (Some((mx, my, vw, vh)), Some(w), Some(h)) if w > 0.0 && h > 0.0 => {
            let s = (w / vw).min(h / vh);
            let ox = (w - vw * s) / 2.0;
            let oy = (h - vh * s) / 2.0;
            let m = TransformMatrix::translate(ox, oy)
                .then_inner(&TransformMatrix::scale(s, s))
                .then_inner(&TransformMatrix::translate(-mx, -my));
            Ok((w, h, m))
        }
        (Some((mx, my, vw, vh)), _, _) => Ok((vw, vh, TransformMatrix::translate(-mx, -my))),
        (None, Some(w), Some(h)) if w > 0.0 && h > 0.0 => Ok((w, h, TransformMatrix::IDENTITY)),
        _ => Err(SvgError::MissingDimensions),
    }
}

fn index_ids<'a>(el: &'a Element, ids: &mut HashMap<String, &'a Element>) {
    if let Some(id) = el.attr("id") {
        ids.entry(id.to_string()).or_insert(el);
    }
    for c in el.child_elements() {
        index_ids(c, ids);
    }
}

fn count_elements(el: &Element) -> usize {
    1 + el.child_elements().map(count_elements).sum::<usize>()
}

#[derive(Clone)]
struct Ctx {
    matrix: TransformMatrix,
    props: BTreeMap<String, String>,
    opacity: f64,
}

/// Presentation attributes overridden by inline `style` declarations.
fn own_props(el: &Element) -> BTreeMap<String, String> {
    let mut props = BTreeMap::new();
    for (k, v) in &el.attrs {
        if PRESENTATION.contains(&k.as_str()) {
            props.insert(k.clone(), v.trim().to_string());
        }
    }
    if let Some(style) = el.attr("style") {
        for (k, v) in parse_inline_style(style) {
            if PRESENTATION.contains(&k.as_str()) {
                props.insert(k, v);
            }
        }
    }
    props
}

fn inherit(parent: &BTreeMap<String, String>, own: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    let mut out: BTreeMap<String, String> = parent
        .iter()
        .filter(|(k, v)| INHERITED.contains(&k.as_str()) && v.as_str() != "inherit")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    for (k, v) in own {
        if v == "inherit" {
            continue;
        }
        out.insert(k.clone(), v.clone());
    }
    out
}

fn font_size(props: &BTreeMap<String, String>, parent_size: f64) -> Result<f64, SvgError> {
    match props.get("font-size") {
        Some(v) => parse_length(v, Some(parent_size)),
        None => Ok(parent_size),
    }
}

fn num_attr(el: &Element, name: &str) -> Result<f64, SvgError> {
    match el.attr(name) {
        Some(v) => parse_length(first_of_list(v), None),
        None => Ok(0.0),
    }
}

fn first_of_list(v: &str) -> &str {
    v.split(|c: char| c.is_whitespace() || c == ',')
        .find(|s| !s.is_empty())
        .unwrap_or("0")
}

fn parse_points(src: &str) -> Result<Vec<(f64, f64)>, SvgError> {
    let nums: Vec<f64> = src
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| SvgError::InvalidPathData(format!("points {src:?}"))))
        .collect::<Result<_, _>>()?;
    Ok(nums.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

struct Walker<'a> {
    marks: Vec<ResolvedMark>,
    counter: usize,
    ids: &'a HashMap<String, &'a Element>,
    options: ParseOptions,
}

impl<'a> Walker<'a> {
    fn visit_root(&mut self, root: &Element, ctx: &Ctx) -> Result<(), SvgError> {
        self.counter += 1;
        let props = inherit(&ctx.props, &own_props(root));
        let own = match root.attr("transform") {
            Some(t) => TransformMatrix::parse_list(t)?,
            None => TransformMatrix::IDENTITY,
        };
        let child_ctx = Ctx {
            matrix: ctx.matrix.then_inner(&own),
            props,
            opacity: ctx.opacity,
        };
        for c in root.child_elements() {
            self.visit(c, &child_ctx)?;
        }
        Ok(())
    }

    fn skip_subtree(&mut self, el: &Element) {
        self.counter += count_elements(el);
    }

    fn visit(&mut self, el: &Element, ctx: &Ctx) -> Result<(), SvgError> {
        let name = el.local_name().to_string();
        let classes = el.classes();
        let own = own_props(el);
        let hidden = own.get("display").map(|d| d == "none").unwrap_or(false);
        let engine_layer = classes
            .iter()
            .any(|c| c == ANNOTATION_CLASS || c == OVERLAY_CLASS || c == CLIP_CLASS);
        if hidden || engine_layer || NON_RENDERED.contains(&name.as_str()) {
            self.skip_subtree(el);
            return Ok(());
        }
        let props = inherit(&ctx.props, &own);
        if matches!(props.get("visibility").map(String::as_str), Some("hidden") | Some("collapse")) {
            self.skip_subtree(el);
            return Ok(());
        }
        let element_index = self.counter;
        self.counter += 1;

        let mut own_transform = match el.attr("transform") {
            Some(t) => TransformMatrix::parse_list(t)?,
            None => TransformMatrix::IDENTITY,
        };
        if name == "svg" {
            // nested viewport: position only
            own_transform = own_transform.then_inner(&TransformMatrix::translate(num_attr(el, "x")?, num_attr(el, "y")?));
        }
        let opacity = ctx.opacity
            * props
                .get("opacity")
                .filter(|_| own.contains_key("opacity"))
                .and_then(|o| o.parse::<f64>().ok())
                .unwrap_or(1.0);
        let global = ctx.matrix.then_inner(&own_transform);

        match name.as_str() {
            "g" | "a" | "switch" | "svg" => {
                let child_ctx = Ctx {
                    matrix: global,
                    props,
                    opacity,
                };
                for c in el.child_elements() {
                    self.visit(c, &child_ctx)?;
                }
                Ok(())
            }
            "text" => {
                let parent_size = ctx
                    .props
                    .get("font-size")
                    .and_then(|v| parse_length(v, Some(DEFAULT_FONT_SIZE)).ok())
                    .unwrap_or(DEFAULT_FONT_SIZE);
                let fs = font_size(&props, parent_size)?;
                let geometry = text_geometry(el, &props, fs)?;
                // tspans are part of this mark
                self.counter += el.child_elements().map(count_elements).sum::<usize>();
                self.push_mark(el, element_index, MarkKind::Text, geometry, &props, opacity, fs, ctx.matrix, own_transform, global);
                Ok(())
            }
            "use" => {
                let x = num_attr(el, "x")?;
                let y = num_attr(el, "y")?;
                let shifted = own_transform.then_inner(&TransformMatrix::translate(x, y));
                let use_global = ctx.matrix.then_inner(&shifted);
                let href = el.href().unwrap_or("").trim_start_matches('#').to_string();
                let Some(target) = self.ids.get(href.as_str()).copied() else {
                    self.counter += el.child_elements().map(count_elements).sum::<usize>();
                    return Ok(());
                };
                let mut parts = Vec::new();
                let mut part_props = None;
                collect_use_parts(target, TransformMatrix::IDENTITY, &props, &mut parts, &mut part_props, 0)?;
                self.counter += el.child_elements().map(count_elements).sum::<usize>();
                if parts.is_empty() {
                    return Ok(());
                }
                let style_props = part_props.unwrap_or(props);
                let fs = font_size(&style_props, DEFAULT_FONT_SIZE)?;
                let inner = match parts.as_slice() {
                    [(_, _, kind)] => *kind,
                    _ => MarkKind::Use,
                };
                let geometry = Geometry::Use {
                    href: format!("#{href}"),
                    parts: parts.into_iter().map(|(m, g, _)| (m, g)).collect(),
                    inner,
                };
                self.push_mark(el, element_index, MarkKind::Use, geometry, &style_props, opacity, fs, ctx.matrix, own_transform, use_global);
                Ok(())
            }
            _ => {
                let Some((kind, geometry)) = shape_geometry(el, &name, &global)? else {
                    self.counter += el.child_elements().map(count_elements).sum::<usize>();
                    return Ok(());
                };
                self.counter += el.child_elements().map(count_elements).sum::<usize>();
                let fs = font_size(&props, DEFAULT_FONT_SIZE)?;
                self.push_mark(el, element_index, kind, geometry, &props, opacity, fs, ctx.matrix, own_transform, global);
                Ok(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push_mark(
        &mut self,
        el: &Element,
        element: usize,
        kind: MarkKind,
        geometry: Geometry,
        props: &BTreeMap<String, String>,
        opacity: f64,
        font_size: f64,
        parent: TransformMatrix,
        own_transform: TransformMatrix,
        global: TransformMatrix,
    ) {
        let style = resolve_style(props, kind, opacity, font_size);
        let bbox = geometry_bbox(&geometry, &global, &self.options);
        self.marks.push(ResolvedMark {
            id: MarkId(self.marks.len()),
            kind,
            geometry,
            style,
            global_matrix: global,
            parent_matrix: parent,
            own_transform,
            bbox,
            element,
            tag: el.local_name().to_string(),
            classes: el.classes(),
        });
    }
}

fn resolve_style(props: &BTreeMap<String, String>, kind: MarkKind, opacity: f64, font_size: f64) -> Style {
    let current = props.get("color").and_then(|c| normalize_color(c, None));
    let fill = match props.get("fill") {
        Some(f) => normalize_color(f, current.as_deref()),
        None if kind == MarkKind::Line => None,
        None => Some("#000000".to_string()),
    };
    let stroke = props.get("stroke").and_then(|s| normalize_color(s, current.as_deref()));
    let stroke_width = props
        .get("stroke-width")
        .and_then(|w| parse_length(w, Some(font_size)).ok())
        .unwrap_or(1.0);
    Style {
        fill,
        stroke,
        stroke_width,
        opacity,
        font_size,
    }
}

fn text_geometry(el: &Element, props: &BTreeMap<String, String>, fs: f64) -> Result<Geometry, SvgError> {
    let mut x_src = el.attr("x");
    let mut y_src = el.attr("y");
    let mut dx = el.attr("dx").map(|v| parse_length(first_of_list(v), Some(fs))).transpose()?.unwrap_or(0.0);
    let mut dy = el.attr("dy").map(|v| parse_length(first_of_list(v), Some(fs))).transpose()?.unwrap_or(0.0);
    if let Some(first) = el.child_elements().find(|c| c.local_name() == "tspan") {
        if x_src.is_none() {
            x_src = first.attr("x");
        }
        if y_src.is_none() {
            y_src = first.attr("y");
        }
        if let Some(v) = first.attr("dx") {
            dx += parse_length(first_of_list(v), Some(fs))?;
        }
        if let Some(v) = first.attr("dy") {
            dy += parse_length(first_of_list(v), Some(fs))?;
        }
    }
    let x = x_src.map(|v| parse_length(first_of_list(v), None)).transpose()?.unwrap_or(0.0) + dx;
    let y = y_src.map(|v| parse_length(first_of_list(v), None)).transpose()?.unwrap_or(0.0) + dy;
    let anchor = match props.get("text-anchor").map(String::as_str) {
        Some("middle") => TextAnchor::Middle,
        Some("end") => TextAnchor::End,
        _ => TextAnchor::Start,
    };
    let baseline = match props.get("dominant-baseline").or_else(|| props.get("alignment-baseline")).map(String::as_str) {
        Some("middle") | Some("central") => TextBaseline::Middle,
        Some("hanging") | Some("text-before-edge") => TextBaseline::Hanging,
        Some("text-after-edge") | Some("ideographic") => TextBaseline::TextBottom,
        _ => TextBaseline::Alphabetic,
    };
    Ok(Geometry::Text {
        content: el.text_content().trim().to_string(),
        x,
        y,
        anchor,
        baseline,
        font_size: fs,
    })
}

fn shape_geometry(el: &Element, name: &str, global: &TransformMatrix) -> Result<Option<(MarkKind, Geometry)>, SvgError> {
    Ok(Some(match name {
        "rect" => (
            MarkKind::Rectangle,
            Geometry::Rect {
                x: num_attr(el, "x")?,
                y: num_attr(el, "y")?,
                width: num_attr(el, "width")?,
                height: num_attr(el, "height")?,
            },
        ),
        "circle" => {
            let r = num_attr(el, "r")?;
            (
                MarkKind::Ellipse,
                Geometry::Ellipse {
                    cx: num_attr(el, "cx")?,
                    cy: num_attr(el, "cy")?,
                    rx: r,
                    ry: r,
                },
            )
        }
        "ellipse" => (
            MarkKind::Ellipse,
            Geometry::Ellipse {
                cx: num_attr(el, "cx")?,
                cy: num_attr(el, "cy")?,
                rx: num_attr(el, "rx")?,
                ry: num_attr(el, "ry")?,
            },
        ),
        "line" => (
            MarkKind::Line,
            Geometry::Line {
                x1: num_attr(el, "x1")?,
                y1: num_attr(el, "y1")?,
                x2: num_attr(el, "x2")?,
                y2: num_attr(el, "y2")?,
            },
        ),
        "polyline" | "polygon" => {
            let points = parse_points(el.attr("points").unwrap_or(""))?;
            let closed = name == "polygon";
            let kind = if closed { MarkKind::Polygon } else { MarkKind::Line };
            (kind, Geometry::Poly { points, closed })
        }
        "path" => {
            let path = PathData::parse(el.attr("d").unwrap_or(""))?;
            if path.segments.is_empty() {
                return Ok(None);
            }
            let kind = classify_path(&path, global, None, 0.5);
            (kind, Geometry::Path(path))
        }
        _ => return Ok(None),
    }))
}

fn collect_use_parts(
    target: &Element,
    frame: TransformMatrix,
    use_props: &BTreeMap<String, String>,
    parts: &mut Vec<(TransformMatrix, Geometry, MarkKind)>,
    part_props: &mut Option<BTreeMap<String, String>>,
    depth: usize,
) -> Result<(), SvgError> {
    if depth > 8 {
        return Ok(());
    }
    let own = own_props(target);
    let props = inherit(use_props, &own);
    let own_t = match target.attr("transform") {
        Some(t) => TransformMatrix::parse_list(t)?,
        None => TransformMatrix::IDENTITY,
    };
    let m = frame.then_inner(&own_t);
    let name = target.local_name();
    match name {
        "g" | "symbol" => {
            for c in target.child_elements() {
                collect_use_parts(c, m, &props, parts, part_props, depth + 1)?;
            }
        }
        _ => {
            if let Some((kind, g)) = shape_geometry(target, name, &m)? {
                if part_props.is_none() {
                    *part_props = Some(props);
                }
                parts.push((m, g, kind));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{write_svg, Edit};

    fn doc(src: &str) -> SvgDocument {
        parse_svg(src.as_bytes()).unwrap()
    }

    #[test]
    fn single_rect() {
        let d = doc(r#"<svg width="10" height="10"><rect x="1" y="2" width="3" height="4"/></svg>"#);
        assert_eq!(d.marks.len(), 1);
        assert_eq!(d.marks[0].kind, MarkKind::Rectangle);
        let b = d.marks[0].bbox;
        assert_eq!((b.left, b.right, b.top, b.bottom), (1.0, 4.0, 2.0, 6.0));
    }

    #[test]
    fn group_translate_applies() {
        let d = doc(r#"<svg width="100" height="100"><g transform="translate(50,10)"><circle cx="0" cy="0" r="5"/></g></svg>"#);
        let b = d.marks[0].bbox;
        assert_eq!((b.left, b.right, b.top, b.bottom), (45.0, 55.0, 5.0, 15.0));
    }

    #[test]
    fn circle_under_scale() {
        let d = doc(r#"<svg width="100" height="100"><g transform="scale(2)"><circle cx="10" cy="10" r="5"/></g></svg>"#);
        assert!((d.marks[0].bbox.width() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn line_bbox() {
        let d = doc(r#"<svg width="10" height="10"><line x1="0" y1="0" x2="4" y2="3"/></svg>"#);
        let b = d.marks[0].bbox;
        assert_eq!((b.left, b.right, b.top, b.bottom), (0.0, 4.0, 0.0, 3.0));
    }

    #[test]
    fn missing_dimensions_errors() {
        let e = parse_svg(br#"<svg><rect/></svg>"#).unwrap_err();
        assert_eq!(e, SvgError::MissingDimensions);
    }

    #[test]
    fn viewbox_only_is_enough() {
        let d = doc(r#"<svg viewBox="0 0 300 200"><rect width="5" height="5"/></svg>"#);
        assert_eq!((d.width, d.height), (300.0, 200.0));
    }

    #[test]
    fn root_points_defer_to_viewbox() {
        let d = doc(r#"<svg width="460.8pt" height="345.6pt" viewBox="0 0 460.8 345.6"><rect width="5" height="5"/></svg>"#);
        assert_eq!((d.width, d.height), (460.8, 345.6));
    }

    #[test]
    fn unsupported_units_rejected() {
        let e = parse_svg(br#"<svg width="10em" height="10"/>"#).unwrap_err();
        assert!(matches!(e, SvgError::UnsupportedUnit(_)));
        let e = parse_svg(br#"<svg width="10" height="10"><rect width="50%" height="1"/></svg>"#).unwrap_err();
        assert!(matches!(e, SvgError::UnsupportedUnit(_)));
    }

    #[test]
    fn malformed_xml_errors() {
        let e = parse_svg(b"<svg width='1' height='1'><g></svg>").unwrap_err();
        assert!(matches!(e, SvgError::MalformedXml { .. }));
    }

    #[test]
    fn defs_are_skipped_and_use_inlined() {
        let d = doc(
            r##"<svg xmlns:xlink="http://www.w3.org/1999/xlink" width="100" height="100">
            <defs><path id="m" d="M0 0 L0 3.5" style="stroke:#000"/></defs>
            <use xlink:href="#m" x="10" y="20"/><use xlink:href="#m" x="30" y="20"/></svg>"##,
        );
        assert_eq!(d.marks.len(), 2);
        assert!(d.marks.iter().all(|m| m.kind == MarkKind::Use));
        let b = d.marks[1].bbox;
        assert!((b.left - 30.0).abs() < 1e-9 && (b.bottom - 23.5).abs() < 1e-9);
        assert_eq!(d.marks[0].style.stroke.as_deref(), Some("#000000"));
    }

    #[test]
    fn inheritance_and_inline_style() {
        let d = doc(
            r#"<svg width="100" height="100"><g fill="steelblue" font-size="10"><rect width="1" height="1"/>
            <text x="5" y="5" style="fill: red">abc</text></g></svg>"#,
        );
        assert_eq!(d.marks[0].style.fill.as_deref(), Some("#4682b4"));
        assert_eq!(d.marks[1].style.fill.as_deref(), Some("#ff0000"));
        assert_eq!(d.marks[1].style.font_size, 10.0);
        assert!((d.marks[1].bbox.width() - 18.0).abs() < 1e-9);
    }

    #[test]
    fn text_em_offsets_are_font_relative() {
        let d = doc(r#"<svg width="100" height="100"><text font-size="10" x="0" y="9" dy="0.71em">0</text></svg>"#);
        match &d.marks[0].geometry {
            Geometry::Text { y, .. } => assert!((y - 16.1).abs() < 1e-9),
            _ => unreachable!(),
        }
    }

    #[test]
    fn rotated_text_box_is_tall() {
        let d = doc(r#"<svg width="100" height="100"><text x="50" y="50" font-size="10" text-anchor="middle" transform="rotate(-90 50 50)">abcdefghij</text></svg>"#);
        let b = d.marks[0].bbox;
        assert!(b.height() > b.width());
        assert!((b.height() - 60.0).abs() < 1e-6);
    }

    #[test]
    fn preorder_ids_and_determinism() {
        let src = r#"<svg width="50" height="50"><g><rect width="1" height="1"/><g><circle r="1"/></g></g><line x2="3"/></svg>"#;
        let a = doc(src);
        let b = doc(src);
        assert_eq!(a, b);
        let kinds: Vec<_> = a.marks.iter().map(|m| m.kind).collect();
        assert_eq!(kinds, vec![MarkKind::Rectangle, MarkKind::Ellipse, MarkKind::Line]);
    }

    #[test]
    fn engine_layers_are_not_marks() {
        let d = doc(r#"<svg width="50" height="50"><rect width="1" height="1"/><g class="chartseam-annotation"><text>note</text></g></svg>"#);
        assert_eq!(d.marks.len(), 1);
    }

    #[test]
    fn write_round_trip_and_single_edit() {
        let src = r#"<svg width="50" height="50"><g transform="translate(5,5)"><rect width="1" height="1"/><text>t<tspan>x</tspan></text></g><circle r="2"/></svg>"#;
        let d = doc(src);
        let out = write_svg(&d, &[]).unwrap();
        let again = parse_svg(&out).unwrap();
        assert_eq!(d.marks, again.marks);

        let out = write_svg(&d, &[Edit::set(MarkId(2), "opacity", "0.2"), Edit::SetText { mark: MarkId(1), text: "y".into() }]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.matches("opacity=\"0.2\"").count(), 1);
        let again = parse_svg(text.as_bytes()).unwrap();
        assert_eq!(again.marks[2].style.opacity, 0.2);
        assert_eq!(again.marks[1].text(), Some("y"));
        assert_eq!(again.marks[0].style.opacity, 1.0);
    }

    #[test]
    fn unknown_mark_edit_errors() {
        let d = doc(r#"<svg width="5" height="5"/>"#);
        let e = write_svg(&d, &[Edit::set(MarkId(3), "opacity", "0")]).unwrap_err();
        assert_eq!(e, SvgError::UnknownMarkId(3));
    }

    #[test]
    fn vector_effect_written_verbatim() {
        let d = doc(r#"<svg width="5" height="5"><path d="M0 0 L4 4"/></svg>"#);
        let out = write_svg(&d, &[Edit::set(MarkId(0), "vector-effect", "non-scaling-stroke")]).unwrap();
        assert!(String::from_utf8(out).unwrap().contains(r#"vector-effect="non-scaling-stroke""#));
    }
}
