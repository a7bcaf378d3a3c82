//! Browser demo: load an SVG chart, select marks by click or brush, and
//! export the recovered data.

use chartseam::deconstruct::AxisOrientation;
use chartseam::interact::{EventType, InteractionEvent, Mode, Session, SessionOptions, Target};
use chartseam::session::ChartView;
use chartseam::svg::MarkId;
use serde_json::json;
use wasm_bindgen::prelude::*;

const VIEW: &str = "chart";

/// One chart and its interaction state.
#[wasm_bindgen]
pub struct DemoSession {
    session: Session,
}

#[wasm_bindgen]
impl DemoSession {
    /// Parses and deconstructs SVG source text.
    #[wasm_bindgen(constructor)]
    pub fn new(svg: &str) -> Result<DemoSession, String> {
        let view = ChartView::from_bytes(VIEW, svg.as_bytes().to_vec()).map_err(|e| e.to_string())?;
        Ok(DemoSession {
            session: Session::new(vec![view], None, SessionOptions::default()),
        })
    }

    /// JSON summary: axes, legends, mark and row counts, diagnostics.
    pub fn summary(&self) -> String {
        let v = &self.session.views[0].chart;
        let axes: Vec<_> = v
            .meta
            .axes
            .iter()
            .map(|a| {
                json!({
                    "orientation": a.orientation,
                    "title": a.title,
                    "ticks": a.ticks.iter().map(|t| t.label.clone()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let legends: Vec<_> = v
            .meta
            .legends
            .iter()
            .map(|l| json!({ "type": l.legend_type, "title": l.title, "entries": l.entries.iter().map(|e| e.label.clone()).collect::<Vec<_>>() }))
            .collect();
        json!({
            "title": v.meta.title,
            "axes": axes,
            "legends": legends,
            "dataMarks": v.meta.marks.len(),
            "rows": v.table.row_count(),
            "fields": v.table.fields.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
            "diagnostics": v.meta.diagnostics.iter().map(|d| format!("{}: {}", d.code, d.message)).collect::<Vec<_>>(),
        })
        .to_string()
    }

    /// Current rendering with selections applied.
    pub fn svg(&self) -> Result<String, String> {
        let bytes = self.session.render(VIEW).map_err(|e| e.to_string())?;
        String::from_utf8(bytes).map_err(|e| e.to_string())
    }

    /// Topmost data mark containing a root-space point.
    #[wasm_bindgen(js_name = markAt)]
    pub fn mark_at(&self, x: f64, y: f64) -> Option<usize> {
        let v = &self.session.views[0].chart;
        v.meta
            .marks
            .iter()
            .rev()
            .find(|id| v.doc.marks[id.0].bbox.contains_point(x, y, 2.0) && !v.table.rows_of_mark(**id).is_empty())
            .map(|id| id.0)
    }

    /// Selects the mark under a point, appending with `meta`; a click on empty
    /// space clears the selection. Returns the new rendering.
    pub fn click(&mut self, x: f64, y: f64, meta: bool) -> Result<String, String> {
        let target = match self.mark_at(x, y) {
            Some(id) => Target::Mark { id: MarkId(id) },
            None => Target::Background,
        };
        let mut e = InteractionEvent::new(VIEW, target, EventType::Select);
        e.meta = meta;
        self.session.apply(&e).map_err(|e| e.to_string())?;
        self.svg()
    }

    /// Brushes a root-space rectangle; `axis` is "x", "y", or empty for both.
    pub fn brush(&mut self, x0: f64, y0: f64, x1: f64, y1: f64, axis: &str, meta: bool) -> Result<String, String> {
        let target = match axis {
            "x" => Target::Axis { axis: AxisOrientation::X },
            "y" => Target::Axis { axis: AxisOrientation::Y },
            _ => Target::Background,
        };
        let mut e = InteractionEvent::new(VIEW, target, EventType::Brush);
        e.mode = Some(Mode::Brush);
        e.meta = meta;
        e.params.rect = Some([x0, y0, x1, y1]);
        self.session.apply(&e).map_err(|e| e.to_string())?;
        self.svg()
    }

    /// Recovered table as CSV; with `selected_only`, just the selected rows.
    #[wasm_bindgen(js_name = exportCsv)]
    pub fn export_csv(&self, selected_only: bool) -> Result<String, String> {
        let t = &self.session.views[0].chart.table;
        let t = match (&t.selection, selected_only) {
            (Some(_), true) => t.subset(&t.selected_rows()),
            _ => t.clone(),
        };
        t.to_csv().map_err(|e| e.to_string())
    }
}
