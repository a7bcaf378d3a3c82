//! Scripted interaction: taxonomy dispatch, event predicates, linked
//! propagation, and materialization as SVG edits and tooltip payloads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DataTable;
use crate::deconstruct::{AxisOrientation, ChartOrientation, LegendType, Scale};
use crate::link::{build_link_graph, dataflow_plan, propagate, LinkError, LinkGraph, LinkOptions, EXTERNAL};
use crate::query::{self, Direction, Predicate, QueryError, TransformObject, INDEX_FIELD};
use crate::session::ChartView;
use crate::svg::{fmt_num, Edit, Element, MarkId, MarkKind, Rect, TransformMatrix, ANNOTATION_CLASS, CLIP_CLASS, OVERLAY_CLASS};
use crate::value::{format_date, format_number, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error("unknown view {0:?}")]
    UnknownView(String),
    #[error("unknown target: {0}")]
    UnknownTarget(String),
    #[error("drag on {0} needs an explicit mode")]
    AmbiguousWithoutMode(String),
    #[error("mode {mode:?} conflicts with event type {event_type:?}")]
    ModeConflict { mode: Mode, event_type: EventType },
    #[error("no taxonomy entry for {0}")]
    Unsupported(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sorting needs a categorical axis")]
    NoCategoricalAxis,
    #[error("navigation transform is not invertible")]
    NonInvertibleTransform,
    #[error("event {index}: {message}")]
    Schema { index: usize, message: String },
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Link(#[from] LinkError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    Mark { id: MarkId },
    Legend {
        label: String,
        #[serde(default)]
        legend: usize,
    },
    Background,
    Axis { axis: AxisOrientation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TargetKind {
    Mark,
    Legend,
    Background,
    Axis,
}

impl Target {
    pub fn kind(&self) -> TargetKind {
        match self {
            Target::Mark { .. } => TargetKind::Mark,
            Target::Legend { .. } => TargetKind::Legend,
            Target::Background => TargetKind::Background,
            Target::Axis { .. } => TargetKind::Axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventType {
    Select,
    Brush,
    Filter,
    Sort,
    Navigate,
    Annotate,
    Hover,
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Input {
    Click,
    DoubleClick,
    Hover,
    Drag,
    Scroll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Brush,
    Pan,
    Annotate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterMode {
    Inclusive,
    Exclusive,
}

/// Type-specific inputs, all in root pixel coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EventParams {
    /// `[x0, y0, x1, y1]`.
    pub rect: Option<[f64; 4]>,
    pub from: Option<[f64; 2]>,
    pub to: Option<[f64; 2]>,
    pub delta: Option<[f64; 2]>,
    pub point: Option<[f64; 2]>,
    pub factor: Option<f64>,
    pub text: Option<String>,
    pub filter: Option<FilterMode>,
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InteractionEvent {
    pub chart: String,
    pub target: Target,
    #[serde(rename = "type")]
    pub event_type: EventType,
    #[serde(default)]
    pub input: Option<Input>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub meta: bool,
    #[serde(default)]
    pub params: EventParams,
}

impl InteractionEvent {
    pub fn new(chart: &str, target: Target, event_type: EventType) -> Self {
        InteractionEvent {
            chart: chart.to_string(),
            target,
            event_type,
            input: None,
            mode: None,
            meta: false,
            params: EventParams::default(),
        }
    }

    /// The input when not given: inferred from the type and parameters.
    pub fn resolved_input(&self) -> Input {
        if let Some(i) = self.input {
            return i;
        }
        match self.event_type {
            EventType::Select | EventType::Filter | EventType::Annotate => Input::Click,
            EventType::Hover => Input::Hover,
            EventType::Brush | EventType::Sort => Input::Drag,
            EventType::Reset => Input::DoubleClick,
            EventType::Navigate => {
                let p = &self.params;
                if p.rect.is_some() || p.delta.is_some() || p.from.is_some() {
                    Input::Drag
                } else if p.factor.is_some() {
                    Input::Scroll
                } else {
                    Input::DoubleClick
                }
            }
        }
    }

    /// Checks that the parameters required by the type are present.
    pub fn validate(&self) -> Result<(), InteractionError> {
        let p = &self.params;
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(InteractionError::InvalidParams(format!("{:?} needs {what}", self.event_type))) };
        match self.event_type {
            EventType::Brush => need(p.rect.is_some(), "rect"),
            EventType::Filter => need(p.filter.is_some(), "filter (inclusive or exclusive)"),
            EventType::Sort => need(p.direction.is_some() || (p.from.is_some() && p.to.is_some()), "direction or from/to"),
            EventType::Annotate => need(p.point.is_some() && p.text.is_some(), "point and text"),
            EventType::Hover => need(p.point.is_some() || matches!(self.target, Target::Mark { .. }), "point"),
            EventType::Navigate => match self.resolved_input() {
                Input::Drag => need(p.rect.is_some() || p.delta.is_some() || (p.from.is_some() && p.to.is_some()), "rect, delta, or from/to"),
                Input::Scroll => need(p.factor.map(|f| f.is_finite() && f > 0.0).unwrap_or(false), "a positive factor"),
                _ => Ok(()),
            },
            EventType::Select | EventType::Reset => Ok(()),
        }
    }
}

/// Parses a script, naming the first offending event.
pub fn parse_script(src: &str) -> Result<Vec<InteractionEvent>, InteractionError> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(src).map_err(|e| InteractionError::Schema {
        index: 0,
        message: format!("script must be a JSON array of events: {e}"),
    })?;
    raw.into_iter()
        .enumerate()
        .map(|(index, v)| {
            let e: InteractionEvent = serde_json::from_value(v).map_err(|e| InteractionError::Schema { index, message: e.to_string() })?;
            e.validate().map_err(|e| InteractionError::Schema { index, message: e.to_string() })?;
            Ok(e)
        })
        .collect()
}

/// Handler an event dispatches to; one per taxonomy row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    MarkSelect,
    MarkSelectAppend,
    MarkTooltip,
    MarkFilter,
    MarkSort,
    LegendSelect,
    LegendSelectAppend,
    LegendFilter,
    ClearSelection,
    ViewZoomScroll,
    ViewZoomDoubleClick,
    ViewPan,
    ViewAreaZoom,
    ViewReset,
    ViewBrush,
    ViewBrushAppend,
    ViewAnnotate,
    AxisZoomScroll,
    AxisZoomDoubleClick,
    AxisPan,
    AxisAreaZoom,
    AxisReset,
    AxisBrush,
    AxisBrushAppend,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaxonomyRow {
    pub target: TargetKind,
    pub event_type: EventType,
    pub input: Input,
    pub meta: bool,
    pub intent: &'static str,
    pub metadata: &'static str,
    pub branch: Branch,
}

const fn row(target: TargetKind, event_type: EventType, input: Input, meta: bool, intent: &'static str, metadata: &'static str, branch: Branch) -> TaxonomyRow {
    TaxonomyRow { target, event_type, input, meta, intent, metadata, branch }
}

use EventType as E;
use Input as I;
use TargetKind as T;

/// Targets by interaction type and input, with the chart metadata each needs.
pub const TAXONOMY: [TaxonomyRow; 24] = [
    row(T::Mark, E::Select, I::Click, false, "highlight / select mark", "marks", Branch::MarkSelect),
    row(T::Mark, E::Select, I::Click, true, "append / un-append mark to current selection", "marks", Branch::MarkSelectAppend),
    row(T::Mark, E::Hover, I::Hover, false, "display tooltip / details-on-demand", "marks, legends, axes → scales", Branch::MarkTooltip),
    row(T::Mark, E::Filter, I::Click, false, "filter selected mark", "marks", Branch::MarkFilter),
    row(T::Mark, E::Sort, I::Drag, false, "re-position mark to enable sorting", "marks, axes → scales", Branch::MarkSort),
    row(T::Legend, E::Select, I::Click, false, "highlight marks by selected legend attribute", "marks, legends", Branch::LegendSelect),
    row(T::Legend, E::Select, I::Click, true, "append marks on legend attribute to current selection", "marks, legends", Branch::LegendSelectAppend),
    row(T::Legend, E::Filter, I::Click, false, "filter marks by selected legend attribute", "marks, legends", Branch::LegendFilter),
    row(T::Background, E::Select, I::Click, false, "remove current selection", "marks", Branch::ClearSelection),
    row(T::Background, E::Navigate, I::Scroll, false, "scale view (zoom)", "marks, axes → scales + views", Branch::ViewZoomScroll),
    row(T::Background, E::Navigate, I::DoubleClick, false, "scale view (zoom)", "marks, axes → scales + views", Branch::ViewZoomDoubleClick),
    row(T::Background, E::Navigate, I::Drag, false, "translate view (pan)", "marks, axes → scales + views", Branch::ViewPan),
    row(T::Background, E::Navigate, I::Drag, false, "select area to navigate to (pan + zoom)", "marks, axes → scales + views", Branch::ViewAreaZoom),
    row(T::Background, E::Reset, I::DoubleClick, false, "reset view", "marks, axes → scales + views", Branch::ViewReset),
    row(T::Background, E::Brush, I::Drag, false, "brush area", "marks, axes → scales", Branch::ViewBrush),
    row(T::Background, E::Brush, I::Drag, true, "append brushed area to current selection", "marks, axes → scales", Branch::ViewBrushAppend),
    row(T::Background, E::Annotate, I::Click, false, "place label annotation", "marks, axes → scales", Branch::ViewAnnotate),
    row(T::Axis, E::Navigate, I::Scroll, false, "scale axis (zoom)", "marks, axes → scales + views", Branch::AxisZoomScroll),
    row(T::Axis, E::Navigate, I::DoubleClick, false, "scale axis (zoom)", "marks, axes → scales + views", Branch::AxisZoomDoubleClick),
    row(T::Axis, E::Navigate, I::Drag, false, "translate axis (pan)", "marks, axes → scales + views", Branch::AxisPan),
    row(T::Axis, E::Navigate, I::Drag, false, "select axis area to navigate to (pan + zoom)", "marks, axes → scales + views", Branch::AxisAreaZoom),
    row(T::Axis, E::Reset, I::DoubleClick, false, "reset axis", "marks, axes → scales + views", Branch::AxisReset),
    row(T::Axis, E::Brush, I::Drag, false, "brush axis area", "marks, axes → scales", Branch::AxisBrush),
    row(T::Axis, E::Brush, I::Drag, true, "append brushed axis area to current selection", "marks, axes → scales", Branch::AxisBrushAppend),
];

/// Resolves an event to its taxonomy branch. `navigated` tells whether the
/// view has been panned or zoomed (double-click then resets).
pub fn dispatch(e: &InteractionEvent, navigated: bool) -> Result<Branch, InteractionError> {
    let target = e.target.kind();
    let input = e.resolved_input();
    let mut event_type = e.event_type;
    if matches!(target, TargetKind::Background | TargetKind::Axis) && input == Input::Drag {
        let mode = e.mode.ok_or_else(|| InteractionError::AmbiguousWithoutMode(format!("{target:?}").to_lowercase()))?;
        let expected = match mode {
            Mode::Brush => EventType::Brush,
            Mode::Pan => EventType::Navigate,
            Mode::Annotate => return Err(InteractionError::ModeConflict { mode, event_type }),
        };
        if expected != event_type {
            return Err(InteractionError::ModeConflict { mode, event_type });
        }
    }
    if event_type == EventType::Navigate && input == Input::DoubleClick && navigated {
        event_type = EventType::Reset;
    }
    let candidates: Vec<&TaxonomyRow> = TAXONOMY
        .iter()
        .filter(|r| r.target == target && r.event_type == event_type && r.input == input)
        .collect();
    let with_meta: Vec<&&TaxonomyRow> = candidates.iter().filter(|r| r.meta == e.meta).collect();
    let rows: Vec<&TaxonomyRow> = if with_meta.is_empty() {
        candidates.iter().filter(|r| !r.meta).copied().collect()
    } else {
        with_meta.into_iter().copied().collect()
    };
    match rows.as_slice() {
        [] => Err(InteractionError::Unsupported(format!("{target:?} {event_type:?} by {input:?}"))),
        [one] => Ok(one.branch),
        many => {
            // pan vs. area zoom: a rectangle names the area to navigate to
            let area = e.params.rect.is_some();
            Ok(many
                .iter()
                .find(|r| matches!(r.branch, Branch::ViewAreaZoom | Branch::AxisAreaZoom) == area)
                .map(|r| r.branch)
                .unwrap_or(many[0].branch))
        }
    }
}

/// Predicates of one event: a disjunction of conjunctions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventPredicates {
    pub clauses: Vec<Vec<Predicate>>,
}

impl EventPredicates {
    fn single(ps: Vec<Predicate>) -> Self {
        EventPredicates { clauses: vec![ps] }
    }

    /// Live rows satisfying any clause; each clause runs as sequential queries.
    pub fn evaluate(&self, table: &DataTable) -> Result<BTreeSet<usize>, QueryError> {
        let mut out = BTreeSet::new();
        for clause in &self.clauses {
            let mut rows: Vec<usize> = table.live_rows();
            for p in clause {
                rows = query::select_within(table, p, &rows)?.into_iter().collect();
            }
            out.extend(rows);
        }
        Ok(out)
    }

    pub fn all(&self) -> Vec<&Predicate> {
        self.clauses.iter().flatten().collect()
    }
}

/// Per-axis navigation: `x` uses `k` and `tx`, `y` uses `k` and `ty`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Navigation {
    pub x: TransformObject,
    pub y: TransformObject,
}

impl Default for Navigation {
    fn default() -> Self {
        Navigation {
            x: TransformObject::IDENTITY,
            y: TransformObject::IDENTITY,
        }
    }
}

impl Navigation {
    pub fn is_identity(&self) -> bool {
        *self == Navigation::default()
    }

    pub fn matrix(&self) -> TransformMatrix {
        TransformMatrix::new(self.x.k, 0.0, 0.0, self.y.k, self.x.tx, self.y.ty)
    }

    fn axis(&self, o: AxisOrientation) -> (f64, f64) {
        match o {
            AxisOrientation::X => (self.x.k, self.x.tx),
            AxisOrientation::Y => (self.y.k, self.y.ty),
        }
    }

    fn set_axis(&mut self, o: AxisOrientation, k: f64, t: f64) {
        match o {
            AxisOrientation::X => self.x = TransformObject { k, tx: t, ty: 0.0 },
            AxisOrientation::Y => self.y = TransformObject { k, tx: 0.0, ty: t },
        }
    }

    /// Screen coordinate back to the original chart coordinate.
    fn unproject(&self, o: AxisOrientation, screen: f64) -> f64 {
        let (k, t) = self.axis(o);
        (screen - t) / k
    }
}

/// Data attributes of one mark for details-on-demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tooltip {
    pub chart: String,
    pub mark: MarkId,
    pub row: usize,
    pub values: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub x: f64,
    pub y: f64,
    pub text: String,
}

/// Mutable interaction state of one chart.
#[derive(Debug, Clone)]
pub struct ViewSession {
    pub chart: ChartView,
    pub navigation: Navigation,
    pub sort: Option<(String, Direction)>,
    pub annotations: Vec<Annotation>,
    /// Aggregates over selected source rows, per row, for transformed views.
    pub overlay: Option<Vec<Option<f64>>>,
}

impl ViewSession {
    pub fn new(chart: ChartView) -> Self {
        ViewSession {
            chart,
            navigation: Navigation::default(),
            sort: None,
            annotations: Vec::new(),
            overlay: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.chart.id
    }

    fn field_of_axis(&self, o: AxisOrientation) -> &str {
        let i = match o {
            AxisOrientation::X => 0,
            AxisOrientation::Y => 1,
        };
        &self.chart.table.fields[i].name
    }

    fn axis_of_field(&self, name: &str) -> Option<AxisOrientation> {
        match self.chart.table.field_index(name) {
            Some(0) => Some(AxisOrientation::X),
            Some(1) => Some(AxisOrientation::Y),
            _ => None,
        }
    }

    fn clip_span(&self, o: AxisOrientation) -> (f64, f64) {
        let c = self.chart.meta.clip;
        match o {
            AxisOrientation::X => (c.left, c.right),
            AxisOrientation::Y => (c.top, c.bottom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SessionOptions {
    pub dim_opacity: f64,
    pub link: LinkOptions,
}

impl Default for SessionOptions {
    fn default() -> Self {
        SessionOptions {
            dim_opacity: 0.2,
            link: LinkOptions::default(),
        }
    }
}

/// Result of applying one event.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepOutcome {
    pub branch: Branch,
    pub predicates: EventPredicates,
    pub tooltips: Vec<Tooltip>,
}

/// Charts, the optional external table, and their link graph.
#[derive(Debug, Clone)]
pub struct Session {
    pub views: Vec<ViewSession>,
    pub external: Option<DataTable>,
    pub graph: LinkGraph,
    pub options: SessionOptions,
}

fn invert_px(scale: &Scale, px: f64) -> Option<Value> {
    match scale {
        Scale::Categorical { .. } => scale.invert(px).ok(),
        _ => scale.invert(px).ok(),
    }
}

impl Session {
    pub fn new(charts: Vec<ChartView>, external: Option<DataTable>, options: SessionOptions) -> Self {
        let tables: Vec<DataTable> = charts.iter().map(|c| c.table.clone()).collect();
        let ext: Vec<DataTable> = external.iter().cloned().collect();
        let graph = build_link_graph(&tables, &ext, &options.link);
        Session {
            views: charts.into_iter().map(ViewSession::new).collect(),
            external,
            graph,
            options,
        }
    }

    pub fn view(&self, id: &str) -> Option<&ViewSession> {
        self.views.iter().find(|v| v.id() == id)
    }

    fn view_index(&self, id: &str) -> Result<usize, InteractionError> {
        self.views.iter().position(|v| v.id() == id).ok_or_else(|| InteractionError::UnknownView(id.to_string()))
    }

    fn table(&self, id: &str) -> Option<&DataTable> {
        if id == EXTERNAL {
            return self.external.as_ref();
        }
        self.view(id).map(|v| &v.chart.table)
    }

    fn table_mut(&mut self, id: &str) -> Option<&mut DataTable> {
        if id == EXTERNAL {
            return self.external.as_mut();
        }
        self.views.iter_mut().find(|v| v.chart.id == id).map(|v| &mut v.chart.table)
    }

    fn tables(&self) -> BTreeMap<String, DataTable> {
        let mut out: BTreeMap<String, DataTable> = self.views.iter().map(|v| (v.id().to_string(), v.chart.table.clone())).collect();
        if let Some(e) = &self.external {
            out.insert(EXTERNAL.to_string(), e.clone());
        }
        out
    }

    /// Predicates an event generates on its chart.
    pub fn event_to_predicates(&self, e: &InteractionEvent, branch: Branch) -> Result<EventPredicates, InteractionError> {
        let v = &self.views[self.view_index(&e.chart)?];
        let meta = &v.chart.meta;
        let table = &v.chart.table;
        match branch {
            Branch::MarkSelect | Branch::MarkSelectAppend | Branch::MarkFilter => {
                let id = self.data_mark(v, &e.target)?;
                Ok(EventPredicates {
                    clauses: table
                        .rows_of_mark(id)
                        .iter()
                        .map(|r| vec![Predicate::eq(INDEX_FIELD, Value::Number(*r as f64))])
                        .collect(),
                })
            }
            Branch::LegendSelect | Branch::LegendSelectAppend | Branch::LegendFilter => {
                let Target::Legend { label, legend } = &e.target else { unreachable!("legend branch") };
                let l = meta.legends.get(*legend).ok_or_else(|| InteractionError::UnknownTarget(format!("legend {legend}")))?;
                let entry = l.entry_for(label).ok_or_else(|| InteractionError::UnknownTarget(format!("legend entry {label:?}")))?;
                let field = table.fields[2 + legend].name.clone();
                if l.legend_type != LegendType::Size {
                    return Ok(EventPredicates::single(vec![Predicate::eq(field, entry.value.clone())]));
                }
                let mut values: Vec<f64> = l.entries.iter().filter_map(|x| x.value.as_f64()).collect();
                values.sort_by(f64::total_cmp);
                let (lo, hi) = if branch == Branch::LegendSelectAppend {
                    (values[0], values[values.len() - 1])
                } else {
                    let x = entry.value.as_f64().unwrap_or(values[0]);
                    let i = values.iter().position(|v| *v == x).unwrap_or(0);
                    let lo = if i == 0 { f64::NEG_INFINITY } else { (values[i - 1] + x) / 2.0 };
                    let hi = if i + 1 == values.len() { f64::INFINITY } else { (values[i + 1] + x) / 2.0 };
                    (lo, hi)
                };
                let mut ps = Vec::new();
                if lo.is_finite() {
                    ps.push(Predicate::ge(field.clone(), Value::Number(lo)));
                }
                if hi.is_finite() {
                    ps.push(Predicate::le(field, Value::Number(hi)));
                }
                Ok(EventPredicates::single(ps))
            }
            Branch::ViewBrush | Branch::ViewBrushAppend | Branch::AxisBrush | Branch::AxisBrushAppend => {
                let r = e.params.rect.ok_or_else(|| InteractionError::InvalidParams("brush needs rect".into()))?;
                let axes: Vec<AxisOrientation> = match &e.target {
                    Target::Axis { axis } => vec![*axis],
                    _ => vec![AxisOrientation::X, AxisOrientation::Y],
                };
                let mut clauses: Vec<Vec<Predicate>> = vec![Vec::new()];
                for o in axes {
                    let (a, b) = match o {
                        AxisOrientation::X => (r[0].min(r[2]), r[0].max(r[2])),
                        AxisOrientation::Y => (r[1].min(r[3]), r[1].max(r[3])),
                    };
                    let (a, b) = (v.navigation.unproject(o, a), v.navigation.unproject(o, b));
                    let (a, b) = (a.min(b), a.max(b));
                    let alts = self.brush_axis(v, o, a, b)?;
                    clauses = clauses
                        .iter()
                        .flat_map(|c| {
                            alts.iter().map(move |alt| {
                                let mut c = c.clone();
                                c.extend(alt.iter().cloned());
                                c
                            })
                        })
                        .collect();
                }
                Ok(EventPredicates { clauses })
            }
            Branch::MarkSort => {
                let (field, dir) = self.sort_request(v, e)?;
                Ok(EventPredicates::single(vec![Predicate::order_by(field, dir)]))
            }
            Branch::ViewZoomScroll
            | Branch::ViewZoomDoubleClick
            | Branch::ViewPan
            | Branch::ViewAreaZoom
            | Branch::ViewReset
            | Branch::AxisZoomScroll
            | Branch::AxisZoomDoubleClick
            | Branch::AxisPan
            | Branch::AxisAreaZoom
            | Branch::AxisReset => {
                let nav = self.next_navigation(v, e, branch)?;
                let mut ps = Vec::new();
                for o in nav_axes(&e.target) {
                    let (k, t) = nav.axis(o);
                    let obj = match o {
                        AxisOrientation::X => TransformObject { k, tx: t, ty: 0.0 },
                        AxisOrientation::Y => TransformObject { k, tx: 0.0, ty: t },
                    };
                    ps.push(Predicate::transform_by(v.field_of_axis(o).to_string(), obj));
                }
                Ok(EventPredicates::single(ps))
            }
            Branch::MarkTooltip | Branch::ClearSelection | Branch::ViewAnnotate => Ok(EventPredicates::default()),
        }
    }

    fn data_mark(&self, v: &ViewSession, target: &Target) -> Result<MarkId, InteractionError> {
        let Target::Mark { id } = target else {
            return Err(InteractionError::UnknownTarget("expected a mark target".into()));
        };
        if v.chart.meta.marks.contains(id) && !v.chart.table.rows_of_mark(*id).is_empty() {
            Ok(*id)
        } else {
            Err(InteractionError::UnknownTarget(format!("mark {id} is not a data mark of {}", v.id())))
        }
    }

    /// Brush alternatives along one axis over the original pixel span [a, b].
    fn brush_axis(&self, v: &ViewSession, o: AxisOrientation, a: f64, b: f64) -> Result<Vec<Vec<Predicate>>, InteractionError> {
        let meta = &v.chart.meta;
        let field = v.field_of_axis(o).to_string();
        let Some(axis) = meta.axis(o) else {
            // no axis: nothing to constrain
            return Ok(vec![Vec::new()]);
        };
        if let Some(bins) = &axis.bins {
            let order = v.chart.table.orders.get(&field).cloned().unwrap_or_default();
            let mut alts = Vec::new();
            for (i, bin) in bins.iter().enumerate() {
                let (p0, p1) = (axis.scale.apply(bin[0]), axis.scale.apply(bin[1]));
                let (Some(p0), Some(p1)) = (p0, p1) else { continue };
                let c = (p0 + p1) / 2.0;
                if c >= a && c <= b {
                    if let Some(label) = order.get(i) {
                        alts.push(vec![Predicate::eq(field.clone(), Value::Text(label.clone()))]);
                    }
                }
            }
            return Ok(alts);
        }
        if let Scale::Categorical { labels, positions } = &axis.scale {
            let cats = labels
                .iter()
                .zip(positions)
                .filter(|(_, p)| **p >= a && **p <= b)
                .map(|(l, _)| {
                    let ty = v.chart.table.fields[if o == AxisOrientation::X { 0 } else { 1 }].field_type;
                    let value = match ty {
                        crate::value::FieldType::Number => crate::deconstruct::labels::parse_number(l).map(Value::Number).unwrap_or_else(|| Value::Text(l.clone())),
                        _ => Value::Text(l.clone()),
                    };
                    vec![Predicate::eq(field.clone(), value)]
                })
                .collect();
            return Ok(cats);
        }
        let (Some(va), Some(vb)) = (invert_px(&axis.scale, a), invert_px(&axis.scale, b)) else {
            return Err(InteractionError::InvalidParams("brush outside the axis scale".into()));
        };
        let (lo, hi) = if va.cmp_same(&vb) == std::cmp::Ordering::Greater { (vb, va) } else { (va, vb) };
        let value_axis = !meta.bars.is_empty()
            && match meta.orientation {
                ChartOrientation::Horizontal => o == AxisOrientation::X,
                _ => o == AxisOrientation::Y,
            };
        if value_axis {
            // a bar is brushed when its length reaches into the span
            return Ok(vec![vec![Predicate::ge(field, lo)]]);
        }
        Ok(vec![vec![Predicate::ge(field.clone(), lo), Predicate::le(field, hi)]])
    }

    fn category_axis(&self, v: &ViewSession) -> Result<(AxisOrientation, String, String), InteractionError> {
        let meta = &v.chart.meta;
        let (cat, val) = match meta.orientation {
            ChartOrientation::Horizontal => (AxisOrientation::Y, AxisOrientation::X),
            _ => (AxisOrientation::X, AxisOrientation::Y),
        };
        match meta.axis(cat) {
            Some(a) if a.scale.is_categorical() => Ok((cat, v.field_of_axis(cat).to_string(), v.field_of_axis(val).to_string())),
            _ => Err(InteractionError::NoCategoricalAxis),
        }
    }

    /// Per-category totals of the value field, in axis order.
    fn category_totals(&self, v: &ViewSession) -> Result<Vec<(String, f64)>, InteractionError> {
        let (cat, cat_field, val_field) = self.category_axis(v)?;
        let Scale::Categorical { labels, .. } = &v.chart.meta.axis(cat).expect("checked").scale else { unreachable!() };
        let t = &v.chart.table;
        let ci = t.field_index(&cat_field).expect("axis field");
        let vi = t.field_index(&val_field).expect("axis field");
        Ok(labels
            .iter()
            .map(|l| {
                let total = t
                    .live_rows()
                    .iter()
                    .filter(|r| t.value(**r, ci).render() == *l)
                    .filter_map(|r| t.value(*r, vi).as_f64())
                    .sum();
                (l.clone(), total)
            })
            .collect())
    }

    fn sort_request(&self, v: &ViewSession, e: &InteractionEvent) -> Result<(String, Direction), InteractionError> {
        let (cat, _, val_field) = self.category_axis(v)?;
        if let Some(d) = e.params.direction {
            return Ok((val_field, d));
        }
        let id = self.data_mark(v, &e.target)?;
        let (from, to) = (e.params.from.expect("validated"), e.params.to.expect("validated"));
        let i = if cat == AxisOrientation::X { 0 } else { 1 };
        let toward_start = to[i] < from[i];
        let t = &v.chart.table;
        let ci = t.field_index(v.field_of_axis(cat)).expect("axis field");
        let row = t.rows_of_mark(id)[0];
        let label = t.value(row, ci).render();
        let totals = self.category_totals(v)?;
        let mine = totals.iter().find(|(l, _)| *l == label).map(|x| x.1).unwrap_or(f64::NAN);
        let max = totals.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        let min = totals.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let dir = if mine == max {
            if toward_start { Direction::Desc } else { Direction::Asc }
        } else if mine == min {
            if toward_start { Direction::Asc } else { Direction::Desc }
        } else {
            return Err(InteractionError::InvalidParams("sort drags start on the largest or smallest mark".into()));
        };
        Ok((val_field, dir))
    }

    fn next_navigation(&self, v: &ViewSession, e: &InteractionEvent, branch: Branch) -> Result<Navigation, InteractionError> {
        let mut nav = v.navigation;
        let clip = v.chart.meta.clip;
        let p = &e.params;
        let point = p.point.unwrap_or([clip.center_x(), clip.center_y()]);
        for o in nav_axes(&e.target) {
            let i = if o == AxisOrientation::X { 0 } else { 1 };
            let (k, t) = nav.axis(o);
            let zoom = |f: f64, c: f64| (k * f, c - f * (c - t));
            let (k2, t2) = match branch {
                Branch::ViewZoomScroll | Branch::AxisZoomScroll => zoom(p.factor.unwrap_or(1.0), point[i]),
                Branch::ViewZoomDoubleClick | Branch::AxisZoomDoubleClick => zoom(2.0, point[i]),
                Branch::ViewPan | Branch::AxisPan => {
                    let d = match (p.delta, p.from, p.to) {
                        (Some(d), _, _) => d[i],
                        (None, Some(f), Some(to)) => to[i] - f[i],
                        _ => 0.0,
                    };
                    (k, t + d)
                }
                Branch::ViewAreaZoom | Branch::AxisAreaZoom => {
                    let r = p.rect.expect("area zoom has a rect");
                    let (a, b) = (r[i].min(r[i + 2]), r[i].max(r[i + 2]));
                    let (lo, hi) = v.clip_span(o);
                    if b - a <= 0.0 {
                        return Err(InteractionError::NonInvertibleTransform);
                    }
                    let f = (hi - lo) / (b - a);
                    (k * f, f * (t - a) + lo)
                }
                Branch::ViewReset | Branch::AxisReset => (1.0, 0.0),
                _ => (k, t),
            };
            if !(k2.is_finite() && k2 > 0.0 && t2.is_finite()) {
                return Err(InteractionError::NonInvertibleTransform);
            }
            nav.set_axis(o, k2, t2);
        }
        Ok(nav)
    }

    /// Applies one event: updates selections, filters, ordering, navigation,
    /// or annotations, and returns the predicates and tooltips it produced.
    pub fn apply(&mut self, e: &InteractionEvent) -> Result<StepOutcome, InteractionError> {
        e.validate()?;
        let vi = self.view_index(&e.chart)?;
        let branch = dispatch(e, !self.views[vi].navigation.is_identity())?;
        let predicates = self.event_to_predicates(e, branch)?;
        let mut tooltips = Vec::new();
        let origin = e.chart.clone();
        match branch {
            Branch::MarkSelect | Branch::LegendSelect | Branch::ViewBrush | Branch::AxisBrush => {
                let rows = predicates.evaluate(&self.views[vi].chart.table)?;
                self.select(&origin, rows, false)?;
            }
            Branch::MarkSelectAppend | Branch::LegendSelectAppend | Branch::ViewBrushAppend | Branch::AxisBrushAppend => {
                let rows = predicates.evaluate(&self.views[vi].chart.table)?;
                let current = self.views[vi].chart.table.selection.clone();
                let mark_toggle = branch == Branch::MarkSelectAppend
                    && current.as_ref().map(|c| !rows.is_empty() && rows.is_subset(c)).unwrap_or(false);
                if mark_toggle {
                    let remaining: BTreeSet<usize> = current.unwrap_or_default().difference(&rows).copied().collect();
                    self.select(&origin, remaining, false)?;
                } else {
                    self.select(&origin, rows, true)?;
                }
            }
            Branch::ClearSelection => {
                for v in &mut self.views {
                    v.chart.table.selection = None;
                    v.overlay = None;
                }
                if let Some(x) = &mut self.external {
                    x.selection = None;
                }
            }
            Branch::MarkFilter | Branch::LegendFilter => {
                let rows = predicates.evaluate(&self.views[vi].chart.table)?;
                let inclusive = e.params.filter == Some(FilterMode::Inclusive);
                self.filter(&origin, &rows, inclusive)?;
            }
            Branch::MarkSort => {
                let p = &predicates.clauses[0][0];
                let dir = match p.value {
                    query::PredicateValue::Direction(d) => d,
                    _ => unreachable!("sort predicates carry a direction"),
                };
                self.views[vi].sort = Some((p.field.clone(), dir));
            }
            Branch::MarkTooltip => {
                let v = &self.views[vi];
                let id = self.data_mark(v, &e.target)?;
                let line = matches!(v.chart.meta.kind_of(&v.chart.doc.marks[id.0]), MarkKind::Line | MarkKind::Area);
                match e.params.point {
                    Some(p) if line => tooltips.extend(self.line_tooltips(vi, p[0])),
                    point => tooltips.push(tooltip_at(v, id, point)?),
                }
            }
            Branch::ViewAnnotate => {
                let [x, y] = e.params.point.expect("validated");
                self.views[vi].annotations.push(Annotation {
                    x,
                    y,
                    text: e.params.text.clone().unwrap_or_default(),
                });
            }
            _ => {
                let nav = self.next_navigation(&self.views[vi], e, branch)?;
                self.views[vi].navigation = nav;
                for o in nav_axes(&e.target) {
                    self.propagate_navigation(vi, o);
                }
            }
        }
        if e.event_type == EventType::Hover && branch != Branch::MarkTooltip {
            tooltips.extend(self.hover_tooltips(vi, e.params.point.expect("validated")));
        }
        if matches!(branch, Branch::ViewBrush | Branch::ViewBrushAppend | Branch::AxisBrush | Branch::AxisBrushAppend) {
            let r = e.params.rect.expect("validated");
            for x in [r[0].min(r[2]), r[0].max(r[2])] {
                tooltips.extend(self.line_tooltips(vi, x));
            }
        }
        Ok(StepOutcome { branch, predicates, tooltips })
    }

    fn select(&mut self, origin: &str, rows: BTreeSet<usize>, append: bool) -> Result<(), InteractionError> {
        let table = self.table_mut(origin).ok_or_else(|| InteractionError::UnknownView(origin.to_string()))?;
        let sel = query::compose_selection(table, &rows, append);
        let plan = dataflow_plan(&self.graph, origin)?;
        let updates = propagate(&self.graph, &plan, &self.tables(), &sel)?;
        for (view, u) in updates {
            if view == origin {
                continue;
            }
            if let Some(t) = self.table_mut(&view) {
                t.selection = Some(u.selected.clone());
            }
            if let Some(v) = self.views.iter_mut().find(|v| v.chart.id == view) {
                v.overlay = u.overlay;
            }
        }
        if let Some(v) = self.views.iter_mut().find(|v| v.chart.id == origin) {
            v.overlay = None;
        }
        Ok(())
    }

    fn filter(&mut self, origin: &str, rows: &BTreeSet<usize>, inclusive: bool) -> Result<(), InteractionError> {
        let table = self.table_mut(origin).ok_or_else(|| InteractionError::UnknownView(origin.to_string()))?;
        query::filter(table, rows, inclusive);
        let live: BTreeSet<usize> = table.live_rows().into_iter().collect();
        let plan = dataflow_plan(&self.graph, origin)?;
        let updates = propagate(&self.graph, &plan, &self.tables(), &live)?;
        for (view, u) in updates {
            if view == origin {
                continue;
            }
            if let Some(t) = self.table_mut(&view) {
                for r in 0..t.row_count() {
                    if !u.selected.contains(&r) {
                        t.filter_mask[r] = false;
                    }
                }
                let mask = t.filter_mask.clone();
                if let Some(sel) = &mut t.selection {
                    sel.retain(|r| mask[*r]);
                }
            }
            if let Some(v) = self.views.iter_mut().find(|v| v.chart.id == view) {
                if u.overlay.is_some() {
                    v.overlay = u.overlay;
                }
            }
        }
        Ok(())
    }

    /// Mirrors one axis' visible data domain onto linked views showing the
    /// same field.
    fn propagate_navigation(&mut self, origin: usize, o: AxisOrientation) {
        let src = &self.views[origin];
        let field = src.field_of_axis(o).to_string();
        let Some(axis) = src.chart.meta.axis(o) else { return };
        if !axis.scale.is_continuous() || axis.bins.is_some() {
            return;
        }
        let (lo, hi) = src.clip_span(o);
        let reset = src.navigation.axis(o) == (1.0, 0.0);
        let d0 = axis.scale.invert_f64(src.navigation.unproject(o, lo));
        let d1 = axis.scale.invert_f64(src.navigation.unproject(o, hi));
        let (Some(d0), Some(d1)) = (d0, d1) else { return };
        let mapped = linked_fields(&self.graph, src.id(), &field);
        for (view, f) in mapped {
            let Some(wi) = self.views.iter().position(|v| v.chart.id == view) else { continue };
            let w = &self.views[wi];
            let Some(wo) = w.axis_of_field(&f) else { continue };
            let Some(wa) = w.chart.meta.axis(wo) else { continue };
            if !wa.scale.is_continuous() || wa.bins.is_some() {
                continue;
            }
            let (wlo, whi) = w.clip_span(wo);
            let (k, t) = if reset {
                (1.0, 0.0)
            } else {
                let (Some(p0), Some(p1)) = (wa.scale.apply(d0), wa.scale.apply(d1)) else { continue };
                if (p1 - p0).abs() < 1e-12 {
                    continue;
                }
                let k = (whi - wlo) / (p1 - p0);
                (k, wlo - k * p0)
            };
            if k.is_finite() && k > 0.0 && t.is_finite() {
                self.views[wi].navigation.set_axis(wo, k, t);
            }
        }
    }

    fn hover_tooltips(&self, vi: usize, point: [f64; 2]) -> Vec<Tooltip> {
        let v = &self.views[vi];
        let lines = self.line_tooltips(vi, point[0]);
        if !lines.is_empty() {
            return lines;
        }
        // otherwise the topmost data mark under the point
        let (x, y) = (v.navigation.unproject(AxisOrientation::X, point[0]), v.navigation.unproject(AxisOrientation::Y, point[1]));
        v.chart
            .meta
            .marks
            .iter()
            .rev()
            .find(|id| v.chart.doc.marks[id.0].bbox.contains_point(x, y, 0.5) && !v.chart.table.rows_of_mark(**id).is_empty())
            .and_then(|id| tooltip_at(v, *id, Some(point)).ok())
            .into_iter()
            .collect()
    }

    /// One tooltip per line or area mark at the vertex nearest screen `x`.
    fn line_tooltips(&self, vi: usize, x: f64) -> Vec<Tooltip> {
        let v = &self.views[vi];
        v.chart
            .meta
            .marks
            .iter()
            .filter(|id| matches!(v.chart.meta.kind_of(&v.chart.doc.marks[id.0]), MarkKind::Line | MarkKind::Area))
            .filter(|id| v.chart.table.rows_of_mark(**id).len() > 1)
            .filter_map(|id| tooltip_at(v, *id, Some([x, 0.0])).ok())
            .collect()
    }

    /// Edits rendering the view's current state over its original document.
    pub fn materialize(&self, view: &str) -> Result<Vec<Edit>, InteractionError> {
        let v = &self.views[self.view_index(view)?];
        let mut edits = Vec::new();
        let mut transforms = self.sort_offsets(v);
        let nav = v.navigation;
        materialize_navigation(v, &mut transforms, &mut edits);
        let zoomed = nav.x.k != 1.0 || nav.y.k != 1.0;
        let n = nav.matrix();
        let mut clips: BTreeMap<String, usize> = BTreeMap::new();
        let mut clip_defs: Vec<Element> = Vec::new();
        for id in &v.chart.meta.marks {
            let m = &v.chart.doc.marks[id.0];
            if m.kind == MarkKind::Text {
                continue;
            }
            let offset = transforms.get(id).copied().unwrap_or((0.0, 0.0));
            let extra = n.then_inner(&TransformMatrix::translate(offset.0, offset.1));
            if !extra.is_identity() {
                let p = m.parent_matrix;
                let Some(pinv) = p.inverse() else { return Err(InteractionError::NonInvertibleTransform) };
                let own = pinv.then_inner(&extra).then_inner(&p).then_inner(&m.own_transform);
                edits.push(Edit::set(*id, "transform", own.to_svg()));
            }
            if !nav.is_identity() {
                if zoomed {
                    edits.push(Edit::set(*id, "vector-effect", "non-scaling-stroke"));
                }
                // clip in the element's own user space
                let local = m.parent_matrix.then_inner(&{
                    let p = m.parent_matrix;
                    let pinv = p.inverse().expect("checked above");
                    pinv.then_inner(&extra).then_inner(&p).then_inner(&m.own_transform)
                });
                let Some(inv) = local.inverse() else { return Err(InteractionError::NonInvertibleTransform) };
                let r = v.chart.meta.clip.transformed(&inv);
                let key = format!("{} {} {} {}", fmt_num(r.left), fmt_num(r.top), fmt_num(r.width()), fmt_num(r.height()));
                let next = clips.len();
                let idx = *clips.entry(key).or_insert_with(|| {
                    clip_defs.push(
                        Element::new("clipPath")
                            .with_attr("id", format!("{CLIP_CLASS}-{next}"))
                            .with_attr("class", CLIP_CLASS)
                            .with_child(
                                Element::new("rect")
                                    .with_attr("x", fmt_num(r.left))
                                    .with_attr("y", fmt_num(r.top))
                                    .with_attr("width", fmt_num(r.width()))
                                    .with_attr("height", fmt_num(r.height())),
                            ),
                    );
                    next
                });
                edits.push(Edit::set(*id, "clip-path", format!("url(#{CLIP_CLASS}-{idx})")));
            }
        }
        edits.extend(self.opacity_edits(v));
        for c in clip_defs {
            edits.push(Edit::Append { element: c });
        }
        if let Some(g) = self.overlay_group(v) {
            edits.push(Edit::Append { element: g });
        }
        for a in &v.annotations {
            edits.push(Edit::Append { element: annotation_element(a) });
        }
        Ok(edits)
    }

    /// Root-space offsets moving sorted marks and their tick annotations.
    fn sort_offsets(&self, v: &ViewSession) -> BTreeMap<MarkId, (f64, f64)> {
        let mut out = BTreeMap::new();
        let Some((field, dir)) = &v.sort else { return out };
        let Ok((cat, cat_field, _)) = self.category_axis(v) else { return out };
        let Ok(totals) = self.category_totals(v) else { return out };
        let axis = v.chart.meta.axis(cat).expect("category axis");
        let Scale::Categorical { labels, positions } = &axis.scale else { return out };
        let mut order: Vec<usize> = (0..labels.len()).collect();
        let mut with_values = DataTable::new("order", vec![crate::data::Field::new(field.clone(), crate::value::FieldType::Number)]);
        for (_, total) in &totals {
            with_values.push_row(vec![Value::Number(*total)], None).expect("one column");
        }
        if let Ok(perm) = query::order_by(&with_values, field, *dir) {
            order = perm;
        }
        let t = &v.chart.table;
        let ci = t.field_index(&cat_field).expect("axis field");
        let along = |r: &Rect| if cat == AxisOrientation::X { (r.left + r.right) / 2.0 } else { (r.top + r.bottom) / 2.0 };
        let groups: Vec<Vec<MarkId>> = labels
            .iter()
            .map(|l| {
                v.chart
                    .meta
                    .marks
                    .iter()
                    .copied()
                    .filter(|id| {
                        let rows = t.rows_of_mark(*id);
                        !rows.is_empty() && t.value(rows[0], ci).render() == *l
                    })
                    .collect()
            })
            .collect();
        let centers: Vec<f64> = groups
            .iter()
            .zip(positions)
            .map(|(g, p)| {
                let boxes: Vec<Rect> = g.iter().map(|id| v.chart.doc.marks[id.0].bbox).collect();
                Rect::union_all(&boxes).map(|b| along(&b)).unwrap_or(*p)
            })
            .collect();
        let mut mark_slots = centers.clone();
        mark_slots.sort_by(f64::total_cmp);
        let mut tick_slots = positions.clone();
        tick_slots.sort_by(f64::total_cmp);
        let shift = |d: f64| if cat == AxisOrientation::X { (d, 0.0) } else { (0.0, d) };
        for (rank, li) in order.iter().enumerate() {
            let d = mark_slots[rank] - centers[*li];
            if d != 0.0 {
                for id in &groups[*li] {
                    out.insert(*id, shift(d));
                }
            }
            let d = tick_slots[rank] - positions[*li];
            if d != 0.0 {
                for tick in axis.ticks.iter().filter(|tk| tk.label == labels[*li]) {
                    out.insert(tick.label_mark, shift(d));
                    out.insert(tick.tick_mark, shift(d));
                }
            }
        }
        out
    }

    fn opacity_edits(&self, v: &ViewSession) -> Vec<Edit> {
        let mut edits = Vec::new();
        let t = &v.chart.table;
        let dim = self.options.dim_opacity;
        let overlay = v.overlay.is_some() && t.selection.is_some();
        for id in &v.chart.meta.marks {
            let rows = t.rows_of_mark(*id);
            if rows.is_empty() {
                continue;
            }
            let m = &v.chart.doc.marks[id.0];
            let Some(el) = v.chart.doc.element(m.element) else { continue };
            let filtered = rows.iter().all(|r| !t.is_live(*r));
            let value = if filtered {
                Some(0.0)
            } else if overlay {
                Some(dim)
            } else {
                match &t.selection {
                    Some(sel) if !rows.iter().any(|r| sel.contains(r)) => Some(dim),
                    _ => None,
                }
            };
            if let Some(x) = value {
                edits.extend(opacity_edit(*id, el, x));
            }
        }
        for (li, l) in v.chart.meta.legends.iter().enumerate() {
            if l.legend_type == LegendType::Size {
                continue;
            }
            let fi = 2 + li;
            for e in &l.entries {
                let rows: Vec<usize> = (0..t.row_count()).filter(|r| *t.value(*r, fi) == e.value).collect();
                if !rows.is_empty() && rows.iter().all(|r| !t.is_live(*r)) {
                    for id in [e.swatch, e.label_mark] {
                        if let Some(el) = v.chart.doc.element(v.chart.doc.marks[id.0].element) {
                            edits.extend(opacity_edit(id, el, 0.0));
                        }
                    }
                }
            }
        }
        edits
    }

    fn overlay_group(&self, v: &ViewSession) -> Option<Element> {
        let overlay = v.overlay.as_ref()?;
        v.chart.table.selection.as_ref()?;
        let meta = &v.chart.meta;
        let horizontal = meta.orientation == ChartOrientation::Horizontal;
        let val_axis = if horizontal { AxisOrientation::X } else { AxisOrientation::Y };
        let scale = meta.scale(val_axis);
        let mut g = Element::new("g").with_attr("class", OVERLAY_CLASS);
        if !v.navigation.is_identity() {
            g.set_attr("transform", v.navigation.matrix().to_svg());
        }
        for id in &meta.bars {
            let rows = v.chart.table.rows_of_mark(*id);
            let Some(r) = rows.first() else { continue };
            let Some(Some(value)) = overlay.get(*r) else { continue };
            let m = &v.chart.doc.marks[id.0];
            let b = m.bbox;
            let base = meta.baseline.unwrap_or(if horizontal { b.left } else { b.bottom });
            let Some(far) = scale.apply(*value) else { continue };
            let rect = if horizontal {
                Rect::new(base.min(far), base.max(far), b.top, b.bottom)
            } else {
                Rect::new(b.left, b.right, base.min(far), base.max(far))
            };
            g = g.with_child(
                Element::new("rect")
                    .with_attr("x", fmt_num(rect.left))
                    .with_attr("y", fmt_num(rect.top))
                    .with_attr("width", fmt_num(rect.width()))
                    .with_attr("height", fmt_num(rect.height()))
                    .with_attr("fill", m.style.fill.clone().unwrap_or_else(|| "#000000".into())),
            );
        }
        Some(g)
    }

    /// Edited SVG bytes for one view.
    pub fn render(&self, view: &str) -> Result<Vec<u8>, InteractionError> {
        let v = &self.views[self.view_index(view)?];
        let edits = self.materialize(view)?;
        crate::svg::write_svg(&v.chart.doc, &edits).map_err(|e| InteractionError::InvalidParams(e.to_string()))
    }

    /// Rows currently selected in a view (or the external table).
    pub fn selected_rows(&self, view: &str) -> Option<Vec<usize>> {
        self.table(view).and_then(|t| t.selection.as_ref()).map(|s| s.iter().copied().collect())
    }
}

fn nav_axes(target: &Target) -> Vec<AxisOrientation> {
    match target {
        Target::Axis { axis } => vec![*axis],
        _ => vec![AxisOrientation::X, AxisOrientation::Y],
    }
}

/// Views reachable from `view` over any edge, with the field `field` maps to.
fn linked_fields(graph: &LinkGraph, view: &str, field: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::from([view.to_string()]);
    let mut queue = VecDeque::from([(view.to_string(), field.to_string())]);
    while let Some((v, f)) = queue.pop_front() {
        let Some(node) = graph.node(&v) else { continue };
        for e in node.targets.iter().chain(&node.sources) {
            if seen.contains(&e.view) {
                continue;
            }
            if let Some((_, peer)) = e.fields.iter().find(|(mine, _)| *mine == f) {
                seen.insert(e.view.clone());
                out.push((e.view.clone(), peer.clone()));
                queue.push_back((e.view.clone(), peer.clone()));
            }
        }
    }
    out
}

/// Tooltip for a mark; line and area marks report the row nearest `point`.
fn tooltip_at(v: &ViewSession, id: MarkId, point: Option<[f64; 2]>) -> Result<Tooltip, InteractionError> {
    let t = &v.chart.table;
    let rows = t.rows_of_mark(id);
    let live: Vec<usize> = rows.iter().copied().filter(|r| t.is_live(*r)).collect();
    let Some(first) = live.first().copied() else {
        return Err(InteractionError::UnknownTarget(format!("mark {id} has no live rows")));
    };
    let row = match point {
        Some(p) if live.len() > 1 => {
            let x = v.navigation.unproject(AxisOrientation::X, p[0]);
            let scale = v.chart.meta.scale(AxisOrientation::X);
            live.iter()
                .copied()
                .filter_map(|r| scale.apply_value(t.value(r, 0)).map(|px| (r, (px - x).abs())))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                .map(|x| x.0)
                .unwrap_or(first)
        }
        _ => first,
    };
    let mut values = serde_json::Map::new();
    for (i, f) in t.fields.iter().enumerate() {
        values.insert(f.name.clone(), t.value(row, i).to_json());
    }
    Ok(Tooltip { chart: v.id().to_string(), mark: id, row, values })
}

/// Tick labels and category positions under the view's navigation.
fn materialize_navigation(v: &ViewSession, offsets: &mut BTreeMap<MarkId, (f64, f64)>, edits: &mut Vec<Edit>) {
    let nav = v.navigation;
    if nav.is_identity() {
        return;
    }
    for axis in &v.chart.meta.axes {
        let o = axis.orientation;
        let (k, t) = nav.axis(o);
        if (k, t) == (1.0, 0.0) {
            continue;
        }
        let (lo, hi) = v.clip_span(o);
        if axis.scale.is_continuous() && axis.bins.is_none() {
            let values: Vec<Option<f64>> = axis.ticks.iter().map(|tk| axis.scale.invert_f64(nav.unproject(o, tk.position))).collect();
            let step = values
                .windows(2)
                .filter_map(|w| Some((w[1]? - w[0]?).abs()))
                .fold(f64::INFINITY, f64::min);
            for (tk, val) in axis.ticks.iter().zip(values) {
                let Some(val) = val else { continue };
                let text = match axis.scale {
                    Scale::Date { .. } => format_date(val.round() as i64),
                    _ => format_tick(val, step),
                };
                edits.push(Edit::SetText { mark: tk.label_mark, text });
            }
        } else {
            for tk in &axis.ticks {
                let moved = k * tk.position + t;
                let d = moved - tk.position;
                let off = if o == AxisOrientation::X { (d, 0.0) } else { (0.0, d) };
                for id in [tk.label_mark, tk.tick_mark] {
                    let prev = offsets.get(&id).copied().unwrap_or((0.0, 0.0));
                    offsets.insert(id, (prev.0 + off.0, prev.1 + off.1));
                }
                if moved < lo - 0.5 || moved > hi + 0.5 {
                    for id in [tk.label_mark, tk.tick_mark] {
                        if let Some(el) = v.chart.doc.element(v.chart.doc.marks[id.0].element) {
                            edits.extend(opacity_edit(id, el, 0.0));
                        }
                    }
                }
            }
            for tk in &axis.ticks {
                // tick offsets are applied without the navigation matrix
                for id in [tk.label_mark, tk.tick_mark] {
                    let m = &v.chart.doc.marks[id.0];
                    let off = offsets.remove(&id).unwrap_or((0.0, 0.0));
                    if off != (0.0, 0.0) {
                        let extra = TransformMatrix::translate(off.0, off.1);
                        if let Some(pinv) = m.parent_matrix.inverse() {
                            let own = pinv.then_inner(&extra).then_inner(&m.parent_matrix).then_inner(&m.own_transform);
                            edits.push(Edit::set(id, "transform", own.to_svg()));
                        }
                    }
                }
            }
        }
    }
}

/// Rounds to one digit past the tick step's magnitude.
fn format_tick(v: f64, step: f64) -> String {
    if !step.is_finite() || step <= 0.0 {
        return format_number(v);
    }
    let decimals = (1 - step.log10().floor() as i32).clamp(0, 9);
    let scale = 10f64.powi(decimals);
    let r = (v * scale).round() / scale;
    format_number(if r == 0.0 { 0.0 } else { r })
}

/// Sets a mark's own opacity, respecting an inline `style` declaration.
fn opacity_edit(id: MarkId, el: &Element, value: f64) -> Vec<Edit> {
    let own = el
        .attr("style")
        .and_then(|s| s.split(';').find_map(|d| d.split_once(':').filter(|(k, _)| k.trim() == "opacity").map(|(_, v)| v.trim().parse::<f64>().ok())))
        .flatten()
        .or_else(|| el.attr("opacity").and_then(|o| o.trim().parse().ok()))
        .unwrap_or(1.0);
    let target = fmt_num(value * own);
    match el.attr("style") {
        Some(style) if style.split(';').any(|d| d.split_once(':').map(|(k, _)| k.trim() == "opacity").unwrap_or(false)) => {
            let rewritten: Vec<String> = style
                .split(';')
                .filter(|d| !d.trim().is_empty())
                .map(|d| match d.split_once(':') {
                    Some((k, _)) if k.trim() == "opacity" => format!("opacity:{target}"),
                    _ => d.trim().to_string(),
                })
                .collect();
            vec![Edit::set(id, "style", rewritten.join(";"))]
        }
        _ => vec![Edit::set(id, "opacity", target)],
    }
}

fn annotation_element(a: &Annotation) -> Element {
    Element::new("g")
        .with_attr("class", ANNOTATION_CLASS)
        .with_child(
            Element::new("line")
                .with_attr("x1", fmt_num(a.x))
                .with_attr("y1", fmt_num(a.y + 4.0))
                .with_attr("x2", fmt_num(a.x))
                .with_attr("y2", fmt_num(a.y + 24.0))
                .with_attr("stroke", "#333333"),
        )
        .with_child(
            Element::new("text")
                .with_attr("x", fmt_num(a.x))
                .with_attr("y", fmt_num(a.y))
                .with_attr("font-size", "12")
                .with_attr("fill", "#333333")
                .with_text(a.text.clone()),
        )
}
