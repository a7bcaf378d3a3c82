//! Chart structure inference: axes, legends, titles, scales, and view layout
//! recovered from resolved marks.

mod axes;
pub mod cluster;
pub mod labels;
mod legends;
mod pairing;
pub mod scale;
mod view;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::svg::{MarkId, MarkKind, Rect, ResolvedMark, SvgDocument};
use crate::value::Value;

pub use cluster::{cluster_by_alignment, cluster_field, AlignField, AlignmentCluster};
pub use labels::{parse_labels, parse_number, ParsedLabels};
pub use legends::shape_key;
pub use scale::{infer_scale, InferredScale, Scale, ScaleError};

/// Version tag written into every JSON document the engine emits.
pub const SCHEMA: &str = "chartseam/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisOrientation {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tick {
    pub label: String,
    pub label_mark: MarkId,
    pub tick_mark: MarkId,
    /// Centred coordinate along the axis direction.
    #[serde(rename = "px")]
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Axis {
    pub orientation: AxisOrientation,
    pub ticks: Vec<Tick>,
    pub scale: Scale,
    pub title: Option<String>,
    pub title_mark: Option<MarkId>,
    pub extent: Rect,
    /// Histogram bin ranges in data units.
    pub bins: Option<Vec<[f64; 2]>>,
    /// Unlabelled ticks, gridlines, and other lines owned by the axis.
    pub lines: Vec<MarkId>,
}

impl Axis {
    pub fn marks(&self) -> Vec<MarkId> {
        let mut out: Vec<MarkId> = self.ticks.iter().flat_map(|t| [t.label_mark, t.tick_mark]).collect();
        out.extend(&self.lines);
        out
    }

    /// Tick values parsed the same way the scale was built.
    pub fn tick_values(&self) -> Vec<Value> {
        let labels: Vec<String> = self.ticks.iter().map(|t| t.label.clone()).collect();
        match infer_scale(&labels, &self.ticks.iter().map(|t| t.position).collect::<Vec<_>>()) {
            Ok(s) => s.values,
            Err(_) => labels.into_iter().map(Value::Text).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendType {
    Color,
    Size,
    Shape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendEntry {
    pub label: String,
    pub label_mark: MarkId,
    pub swatch: MarkId,
    /// Color, shape key, or size measure carried by the swatch.
    pub style_value: String,
    /// The label parsed as a data value.
    pub value: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeMeasure {
    Area,
    Width,
    Height,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LegendScale {
    /// Style key to label.
    Mapping { pairs: Vec<(String, String)> },
    /// Linear map from label value to the swatch measure.
    Size { measure: SizeMeasure, scale: Scale },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Legend {
    #[serde(rename = "type")]
    pub legend_type: LegendType,
    pub title: Option<String>,
    pub title_mark: Option<MarkId>,
    pub entries: Vec<LegendEntry>,
    pub scale: LegendScale,
    /// Border or background boxes drawn around the entries.
    pub frame: Vec<MarkId>,
}

impl Legend {
    pub fn marks(&self) -> Vec<MarkId> {
        let mut out: Vec<MarkId> = self.entries.iter().flat_map(|e| [e.label_mark, e.swatch]).collect();
        out.extend(&self.frame);
        out
    }

    /// Data value encoded by a mark's style, if the legend maps it.
    pub fn lookup(&self, mark: &ResolvedMark) -> Option<Value> {
        match (&self.legend_type, &self.scale) {
            (LegendType::Size, LegendScale::Size { measure, scale }) => {
                let m = legends::measure(mark, *measure);
                scale.invert_f64(m).map(Value::Number)
            }
            (LegendType::Color, _) => {
                let key = mark.style.color_key()?;
                self.entries.iter().find(|e| e.style_value == key).map(|e| e.value.clone())
            }
            (LegendType::Shape, _) => {
                let key = shape_key(mark);
                self.entries.iter().find(|e| e.style_value == key).map(|e| e.value.clone())
            }
            _ => None,
        }
    }

    /// Style value of the entry whose label renders as `label`.
    pub fn entry_for(&self, label: &str) -> Option<&LegendEntry> {
        self.entries.iter().find(|e| e.label == label || e.value.render() == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartOrientation {
    Vertical,
    Horizontal,
    None,
}

/// Marks sharing one slot whose lengths compose additively, ordered outward
/// from the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackGroup {
    /// Slot centre along the category axis (px).
    pub position: f64,
    pub marks: Vec<MarkId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    pub marks: Vec<MarkId>,
}

impl Diagnostic {
    pub fn new(code: &str, message: impl Into<String>, marks: Vec<MarkId>) -> Self {
        Diagnostic {
            code: code.to_string(),
            message: message.into(),
            marks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeconstructOptions {
    pub align_tolerance: f64,
    pub min_axis_cluster: usize,
    pub min_legend_cluster: usize,
    /// Pruning distance as a fraction of the larger viewport side.
    pub distance_fraction: f64,
    /// Relative tolerance on slot gaps for even spacing.
    pub spacing_tolerance: f64,
}

impl Default for DeconstructOptions {
    fn default() -> Self {
        DeconstructOptions {
            align_tolerance: 0.5,
            min_axis_cluster: 3,
            min_legend_cluster: 2,
            distance_fraction: 0.1,
            spacing_tolerance: 0.02,
        }
    }
}

/// Which part of the chart a mark was assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Axis,
    Legend,
    Title,
    Viewport,
    Data,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartMetadata {
    pub schema: String,
    pub width: f64,
    pub height: f64,
    pub title: Option<String>,
    pub title_mark: Option<MarkId>,
    pub axes: Vec<Axis>,
    pub legends: Vec<Legend>,
    /// Data marks.
    #[serde(rename = "markIds")]
    pub marks: Vec<MarkId>,
    /// Frames, spines, and backgrounds.
    pub viewport: Vec<MarkId>,
    /// Chart, axis, and legend titles plus unassigned outside text.
    pub titles: Vec<MarkId>,
    pub clip: Rect,
    pub orientation: ChartOrientation,
    pub stacking: Vec<StackGroup>,
    /// Pixel coordinate bars grow from.
    pub baseline: Option<f64>,
    /// Data marks read as bars (length-encoded).
    pub bars: Vec<MarkId>,
    /// Kinds that differ from the parsed kind (polygons recognized as areas).
    pub kinds: BTreeMap<MarkId, MarkKind>,
    pub diagnostics: Vec<Diagnostic>,
    /// Some inference step fell back to a weaker reading.
    pub degraded: bool,
}

impl ChartMetadata {
    pub fn axis(&self, o: AxisOrientation) -> Option<&Axis> {
        self.axes.iter().find(|a| a.orientation == o)
    }

    pub fn axis_mut(&mut self, o: AxisOrientation) -> Option<&mut Axis> {
        self.axes.iter_mut().find(|a| a.orientation == o)
    }

    pub fn kind_of(&self, mark: &ResolvedMark) -> MarkKind {
        self.kinds.get(&mark.id).copied().unwrap_or_else(|| mark.shape_kind())
    }

    /// Scale for one orientation; identity over the viewport without an axis.
    pub fn scale(&self, o: AxisOrientation) -> Scale {
        match self.axis(o) {
            Some(a) => a.scale.clone(),
            None => Scale::Identity {
                range: match o {
                    AxisOrientation::X => [0.0, self.width],
                    AxisOrientation::Y => [0.0, self.height],
                },
            },
        }
    }

    /// Every mark id with the buckets it lands in.
    pub fn buckets(&self) -> BTreeMap<MarkId, Vec<Bucket>> {
        let mut out: BTreeMap<MarkId, BTreeSet<Bucket>> = BTreeMap::new();
        for a in &self.axes {
            for id in a.marks() {
                out.entry(id).or_default().insert(Bucket::Axis);
            }
        }
        for l in &self.legends {
            for id in l.marks() {
                out.entry(id).or_default().insert(Bucket::Legend);
            }
        }
        for (ids, b) in [
            (&self.titles, Bucket::Title),
            (&self.viewport, Bucket::Viewport),
            (&self.marks, Bucket::Data),
        ] {
            for id in ids {
                out.entry(*id).or_default().insert(b);
            }
        }
        out.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
    }

    pub fn bucket_of(&self, id: MarkId) -> Option<Bucket> {
        self.buckets().get(&id).and_then(|v| v.first().copied())
    }

    /// Legend whose title or channel name is `field`.
    pub fn legend_named(&self, name: &str) -> Option<&Legend> {
        self.legends.iter().find(|l| l.title.as_deref() == Some(name))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Runs the full inference with default options.
pub fn deconstruct(doc: &SvgDocument) -> ChartMetadata {
    deconstruct_with(doc, &DeconstructOptions::default())
}

struct Frame {
    viewport: Vec<MarkId>,
    grid: Vec<(AxisOrientation, MarkId)>,
    clip: Rect,
}

const FRAME_LINE_MAX: f64 = 10.0;
const GRID_LINE_MAX: f64 = 1.5;

fn detect_frame(doc: &SvgDocument, free: &BTreeSet<MarkId>, clip0: Rect, has_x: bool, has_y: bool, tol: f64) -> Frame {
    let mut rects: Vec<(f64, MarkId)> = Vec::new();
    let mut frame_lines: Vec<(AxisOrientation, MarkId)> = Vec::new();
    let mut grid = Vec::new();
    for id in free {
        let m = &doc.marks[id.0];
        let b = m.bbox;
        if m.shape_kind() == MarkKind::Rectangle && b.width() > 0.0 && b.height() > 0.0 && b.contains(&clip0, 1.0) {
            rects.push((b.area(), *id));
            continue;
        }
        if m.shape_kind() != MarkKind::Line {
            continue;
        }
        let horizontal = b.height() <= FRAME_LINE_MAX && clip0.width() > 0.0 && b.width() >= 0.9 * clip0.width();
        let vertical = b.width() <= FRAME_LINE_MAX && clip0.height() > 0.0 && b.height() >= 0.9 * clip0.height();
        if horizontal && !vertical {
            let inside = b.center_y() > clip0.top + tol && b.center_y() < clip0.bottom - tol;
            if inside && b.height() <= GRID_LINE_MAX && has_y {
                grid.push((AxisOrientation::Y, *id));
            } else if !inside {
                frame_lines.push((AxisOrientation::X, *id));
            }
        } else if vertical && !horizontal {
            let inside = b.center_x() > clip0.left + tol && b.center_x() < clip0.right - tol;
            if inside && b.width() <= GRID_LINE_MAX && has_x {
                grid.push((AxisOrientation::X, *id));
            } else if !inside {
                frame_lines.push((AxisOrientation::Y, *id));
            }
        } else if horizontal && vertical {
            // an L- or box-shaped spine path
            frame_lines.push((AxisOrientation::X, *id));
        }
    }
    rects.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut clip = match rects.first() {
        Some((_, id)) => doc.marks[id.0].bbox,
        None => clip0,
    };
    if rects.is_empty() {
        for (o, id) in &frame_lines {
            let b = doc.marks[id.0].bbox;
            match o {
                AxisOrientation::X => {
                    clip.left = clip.left.min(b.left);
                    clip.right = clip.right.max(b.right);
                    if b.width() >= 0.9 * clip0.width() && b.height() >= 0.9 * clip0.height() {
                        clip = clip.union(&b);
                    } else if b.center_y() >= clip0.bottom - tol {
                        clip.bottom = clip.bottom.max(b.top);
                    } else {
                        clip.top = clip.top.min(b.bottom);
                    }
                }
                AxisOrientation::Y => {
                    clip.top = clip.top.min(b.top);
                    clip.bottom = clip.bottom.max(b.bottom);
                    if b.center_x() <= clip0.left + tol {
                        clip.left = clip.left.min(b.right);
                    } else {
                        clip.right = clip.right.max(b.left);
                    }
                }
            }
        }
    }
    let mut viewport: Vec<MarkId> = rects.into_iter().map(|r| r.1).chain(frame_lines.into_iter().map(|f| f.1)).collect();
    viewport.sort();
    Frame { viewport, grid, clip }
}

struct TitleAssignment {
    x: Option<MarkId>,
    y: Option<MarkId>,
    chart: Option<MarkId>,
    strays: Vec<MarkId>,
}

fn overlaps(a0: f64, a1: f64, b0: f64, b1: f64) -> bool {
    a0.max(b0) <= a1.min(b1)
}

fn assign_titles(doc: &SvgDocument, texts: &[MarkId], axes: &[Axis], clip: Rect) -> TitleAssignment {
    let label_box = |o: AxisOrientation| -> Option<Rect> {
        let a = axes.iter().find(|a| a.orientation == o)?;
        let boxes: Vec<Rect> = a.ticks.iter().map(|t| doc.marks[t.label_mark.0].bbox).collect();
        Rect::union_all(&boxes)
    };
    let xl = label_box(AxisOrientation::X);
    let yl = label_box(AxisOrientation::Y);
    let mut pending: Vec<MarkId> = texts.to_vec();
    let pick = |pending: &mut Vec<MarkId>, eligible: &dyn Fn(&Rect) -> Option<f64>| -> Option<MarkId> {
        let best = pending
            .iter()
            .filter_map(|id| eligible(&doc.marks[id.0].bbox).map(|d| (d, *id)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))?;
        pending.retain(|i| *i != best.1);
        Some(best.1)
    };
    let x = xl.and_then(|xl| {
        let below = xl.center_y() >= clip.center_y();
        pick(&mut pending, &|b: &Rect| {
            let beyond = if below { b.center_y() > xl.bottom } else { b.center_y() < xl.top };
            (beyond && overlaps(b.left, b.right, clip.left, clip.right)).then(|| b.gap(&xl))
        })
    });
    let y = yl.and_then(|yl| {
        let left = yl.center_x() <= clip.center_x();
        pick(&mut pending, &|b: &Rect| {
            let beyond = if left { b.center_x() < yl.left } else { b.center_x() > yl.right };
            (beyond && overlaps(b.top, b.bottom, clip.top, clip.bottom)).then(|| b.gap(&yl))
        })
    });
    // Chart title: the largest text above the plot, then the topmost.
    let chart = {
        let above: Vec<MarkId> = pending
            .iter()
            .copied()
            .filter(|id| doc.marks[id.0].bbox.center_y() < clip.top)
            .collect();
        let best = above.into_iter().min_by(|a, b| {
            let (ma, mb) = (&doc.marks[a.0], &doc.marks[b.0]);
            mb.style
                .font_size
                .total_cmp(&ma.style.font_size)
                .then(ma.bbox.top.total_cmp(&mb.bbox.top))
                .then(a.cmp(b))
        });
        if let Some(id) = best {
            pending.retain(|i| *i != id);
        }
        best
    };
    TitleAssignment {
        x,
        y,
        chart,
        strays: pending,
    }
}

/// Runs clustering, axes, frame, legends, titles, and view analysis.
pub fn deconstruct_with(doc: &SvgDocument, opts: &DeconstructOptions) -> ChartMetadata {
    let mut diagnostics = Vec::new();
    let mut degraded = false;
    let mut free: BTreeSet<MarkId> = doc.marks.iter().map(|m| m.id).collect();

    let drafts = axes::infer_axes(doc, &free, opts, &mut diagnostics);
    for d in &drafts {
        for (l, t, _) in &d.pairs {
            free.remove(l);
            free.remove(t);
        }
        for o in &d.orphans {
            free.remove(o);
        }
    }
    let span = |o: AxisOrientation| {
        drafts.iter().find(|d| d.orientation == o).map(|d| {
            let lo = d.pairs.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
            let hi = d.pairs.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
    };
    let xs = span(AxisOrientation::X);
    let ys = span(AxisOrientation::Y);
    let clip0 = Rect::new(
        xs.map_or(0.0, |s| s.0),
        xs.map_or(doc.width, |s| s.1),
        ys.map_or(0.0, |s| s.0),
        ys.map_or(doc.height, |s| s.1),
    );
    let frame = detect_frame(doc, &free, clip0, xs.is_some(), ys.is_some(), opts.align_tolerance);
    for id in frame.viewport.iter().chain(frame.grid.iter().map(|g| &g.1)) {
        free.remove(id);
    }
    let clip = frame.clip;

    let mut axes_out: Vec<Axis> = Vec::new();
    for d in &drafts {
        let labels: Vec<String> = d
            .pairs
            .iter()
            .map(|p| doc.marks[p.0 .0].text().unwrap_or("").trim().to_string())
            .collect();
        let positions: Vec<f64> = d.pairs.iter().map(|p| p.2).collect();
        let scale = match infer_scale(&labels, &positions) {
            Ok(s) => {
                if let Some(note) = s.note {
                    diagnostics.push(Diagnostic::new("scale-note", note, vec![]));
                }
                s.scale
            }
            Err(e) => {
                degraded = true;
                diagnostics.push(Diagnostic::new(
                    "inconsistent-labels",
                    format!("{:?} axis: {}", d.orientation, e),
                    d.pairs.iter().map(|p| p.0).collect(),
                ));
                Scale::Categorical {
                    labels: labels.clone(),
                    positions: positions.clone(),
                }
            }
        };
        let ticks: Vec<Tick> = d
            .pairs
            .iter()
            .zip(&labels)
            .map(|(p, l)| Tick {
                label: l.clone(),
                label_mark: p.0,
                tick_mark: p.1,
                position: p.2,
            })
            .collect();
        let mut lines = d.orphans.clone();
        lines.extend(frame.grid.iter().filter(|g| g.0 == d.orientation).map(|g| g.1));
        lines.sort();
        let boxes: Vec<Rect> = ticks
            .iter()
            .flat_map(|t| [doc.marks[t.label_mark.0].bbox, doc.marks[t.tick_mark.0].bbox])
            .collect();
        let mut extent = Rect::union_all(&boxes).unwrap_or(clip);
        match d.orientation {
            AxisOrientation::X => {
                extent.left = extent.left.min(clip.left);
                extent.right = extent.right.max(clip.right);
            }
            AxisOrientation::Y => {
                extent.top = extent.top.min(clip.top);
                extent.bottom = extent.bottom.max(clip.bottom);
            }
        }
        axes_out.push(Axis {
            orientation: d.orientation,
            ticks,
            scale,
            title: None,
            title_mark: None,
            extent,
            bins: None,
            lines,
        });
    }

    let legends_out = legends::infer_legends(doc, &free, opts, &mut diagnostics);
    let mut titles: Vec<MarkId> = Vec::new();
    for l in &legends_out {
        for id in l.marks() {
            free.remove(&id);
        }
        if let Some(t) = l.title_mark {
            free.remove(&t);
            titles.push(t);
        }
    }

    let outside_texts: Vec<MarkId> = free
        .iter()
        .copied()
        .filter(|id| {
            let m = &doc.marks[id.0];
            m.shape_kind() == MarkKind::Text && !clip.contains_point(m.bbox.center_x(), m.bbox.center_y(), opts.align_tolerance)
        })
        .collect();
    let assigned = assign_titles(doc, &outside_texts, &axes_out, clip);
    let text_of = |id: MarkId| doc.marks[id.0].text().map(|s| s.trim().to_string());
    for (o, t) in [(AxisOrientation::X, assigned.x), (AxisOrientation::Y, assigned.y)] {
        if let (Some(t), Some(a)) = (t, axes_out.iter_mut().find(|a| a.orientation == o)) {
            a.title = text_of(t);
            a.title_mark = Some(t);
        }
    }
    for t in assigned.x.iter().chain(&assigned.y).chain(&assigned.chart).chain(&assigned.strays) {
        free.remove(t);
        titles.push(*t);
    }
    if !assigned.strays.is_empty() {
        diagnostics.push(Diagnostic::new(
            "unassigned-text",
            "text outside the plot area kept as titles",
            assigned.strays.clone(),
        ));
    }
    titles.sort();

    // Non-text marks centered outside the plot are decoration.
    let margin_x = (0.01 * clip.width()).max(2.0);
    let margin_y = (0.01 * clip.height()).max(2.0);
    let near = Rect::new(clip.left - margin_x, clip.right + margin_x, clip.top - margin_y, clip.bottom + margin_y);
    let mut viewport = frame.viewport.clone();
    let stray_marks: Vec<MarkId> = free
        .iter()
        .copied()
        .filter(|id| {
            let m = &doc.marks[id.0];
            m.shape_kind() != MarkKind::Text && !near.contains_point(m.bbox.center_x(), m.bbox.center_y(), 0.0)
        })
        .collect();
    if !stray_marks.is_empty() {
        diagnostics.push(Diagnostic::new(
            "outside-marks",
            "marks outside the plot area kept with the viewport",
            stray_marks.clone(),
        ));
    }
    for id in stray_marks {
        free.remove(&id);
        viewport.push(id);
    }
    viewport.sort();

    let data: Vec<MarkId> = free.into_iter().collect();
    let mut kinds = BTreeMap::new();
    let tol_w = opts.align_tolerance.max(0.01 * clip.width());
    let tol_h = opts.align_tolerance.max(0.01 * clip.height());
    for id in &data {
        let m = &doc.marks[id.0];
        if m.shape_kind() == MarkKind::Polygon {
            let b = m.bbox;
            let spans_x = xs.is_some() && (b.width() - clip.width()).abs() <= tol_w;
            let spans_y = ys.is_some() && (b.height() - clip.height()).abs() <= tol_h;
            if spans_x || spans_y {
                kinds.insert(*id, MarkKind::Area);
            }
        }
    }

    let view = view::infer_view(doc, &mut axes_out, &data, &kinds, clip, opts, &mut diagnostics);

    ChartMetadata {
        schema: SCHEMA.to_string(),
        width: doc.width,
        height: doc.height,
        title: assigned.chart.and_then(text_of),
        title_mark: assigned.chart,
        axes: axes_out,
        legends: legends_out,
        marks: data,
        viewport,
        titles,
        clip,
        orientation: view.orientation,
        stacking: view.stacking,
        baseline: view.baseline,
        bars: view.bars,
        kinds,
        diagnostics,
        degraded,
    }
}
