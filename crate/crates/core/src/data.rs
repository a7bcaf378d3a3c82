//! Backing tables recovered from data marks, plus external table loading and
//! export.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deconstruct::{Axis, AxisOrientation, ChartMetadata, ChartOrientation, Diagnostic, LegendType, Scale, ScaleError};
use crate::svg::{MarkId, MarkKind, ResolvedMark, SvgDocument};
use crate::value::{parse_iso_date, FieldType, Value, DAY_MS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(String),
    #[error("row {row} has {got} cells, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error(transparent)]
    Scale(#[from] ScaleError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    #[serde(rename = "type")]
    pub field_type: FieldType,
}

impl Field {
    pub fn new(name: impl Into<String>, field_type: FieldType) -> Self {
        Field {
            name: name.into(),
            field_type,
        }
    }
}

/// Relational table behind one view, with mark bindings and interaction state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataTable {
    pub name: String,
    pub fields: Vec<Field>,
    /// Column-major values, one vector per field.
    pub columns: Vec<Vec<Value>>,
    pub row_mark: Vec<Option<MarkId>>,
    pub mark_rows: BTreeMap<MarkId, Vec<usize>>,
    /// `true` = live.
    pub filter_mask: Vec<bool>,
    pub selection: Option<BTreeSet<usize>>,
    /// Bin edges for fields read off a histogram axis.
    pub bins: BTreeMap<String, Vec<f64>>,
    /// Display order of categorical fields.
    pub orders: BTreeMap<String, Vec<String>>,
}

impl DataTable {
    pub fn new(name: impl Into<String>, fields: Vec<Field>) -> Self {
        let n = fields.len();
        DataTable {
            name: name.into(),
            fields,
            columns: vec![Vec::new(); n],
            row_mark: Vec::new(),
            mark_rows: BTreeMap::new(),
            filter_mask: Vec::new(),
            selection: None,
            bins: BTreeMap::new(),
            orders: BTreeMap::new(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.row_mark.len()
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&[Value]> {
        self.field_index(name).map(|i| self.columns[i].as_slice())
    }

    pub fn value(&self, row: usize, field: usize) -> &Value {
        &self.columns[field][row]
    }

    pub fn row(&self, row: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c[row].clone()).collect()
    }

    pub fn push_row(&mut self, values: Vec<Value>, mark: Option<MarkId>) -> Result<usize, DataError> {
        if values.len() != self.fields.len() {
            return Err(DataError::RaggedRow {
                row: self.row_count(),
                got: values.len(),
                expected: self.fields.len(),
            });
        }
        let idx = self.row_count();
        for (c, v) in self.columns.iter_mut().zip(values) {
            c.push(v);
        }
        self.row_mark.push(mark);
        if let Some(m) = mark {
            self.mark_rows.entry(m).or_default().push(idx);
        }
        self.filter_mask.push(true);
        Ok(idx)
    }

    pub fn is_live(&self, row: usize) -> bool {
        self.filter_mask.get(row).copied().unwrap_or(false)
    }

    pub fn live_rows(&self) -> Vec<usize> {
        (0..self.row_count()).filter(|r| self.is_live(*r)).collect()
    }

    pub fn rows_of_mark(&self, mark: MarkId) -> &[usize] {
        self.mark_rows.get(&mark).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Marks bound to any of `rows`.
    pub fn marks_of_rows<'a>(&self, rows: impl IntoIterator<Item = &'a usize>) -> BTreeSet<MarkId> {
        rows.into_iter().filter_map(|r| self.row_mark.get(*r).copied().flatten()).collect()
    }

    /// Copy of the schema and the given rows (bindings dropped).
    pub fn subset(&self, rows: &[usize]) -> DataTable {
        let mut out = DataTable::new(self.name.clone(), self.fields.clone());
        for r in rows {
            out.push_row(self.row(*r), None).expect("same schema");
        }
        out.bins = self.bins.clone();
        out.orders = self.orders.clone();
        out
    }

    /// Rows currently selected, or none when no selection is active.
    pub fn selected_rows(&self) -> Vec<usize> {
        match &self.selection {
            Some(s) => s.iter().copied().filter(|r| self.is_live(*r)).collect(),
            None => Vec::new(),
        }
    }

    /// RFC 4180 CSV with a header row; dates as ISO-8601.
    pub fn to_csv(&self) -> Result<String, DataError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(self.fields.iter().map(|f| f.name.as_str()))
            .map_err(|e| DataError::Csv(e.to_string()))?;
        for r in 0..self.row_count() {
            w.write_record(self.columns.iter().map(|c| c[r].render()))
                .map_err(|e| DataError::Csv(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| DataError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| DataError::Csv(e.to_string()))
    }

    /// Column-major JSON document.
    pub fn to_json(&self) -> serde_json::Value {
        let mut cols = serde_json::Map::new();
        for (f, c) in self.fields.iter().zip(&self.columns) {
            cols.insert(f.name.clone(), serde_json::Value::Array(c.iter().map(Value::to_json).collect()));
        }
        serde_json::json!({
            "schema": crate::deconstruct::SCHEMA,
            "name": self.name,
            "fields": self.fields,
            "columns": cols,
            "rowMark": self.row_mark,
        })
    }

    /// Parses a CSV with a header row, inferring each column's type.
    pub fn from_csv(name: &str, src: &str) -> Result<DataTable, DataError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(src.as_bytes());
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| DataError::Csv(e.to_string()))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| DataError::Csv(e.to_string()))?;
            if rec.len() != headers.len() {
                return Err(DataError::RaggedRow {
                    row: i,
                    got: rec.len(),
                    expected: headers.len(),
                });
            }
            for (c, cell) in raw.iter_mut().zip(rec.iter()) {
                c.push(cell.to_string());
            }
        }
        Ok(from_raw_columns(name, headers, raw))
    }

    /// Accepts an array of row objects or a column-major document.
    pub fn from_json(name: &str, src: &str) -> Result<DataTable, DataError> {
        let v: serde_json::Value = serde_json::from_str(src).map_err(|e| DataError::Json(e.to_string()))?;
        let cell = |x: &serde_json::Value| match x {
            serde_json::Value::Null => String::new(),
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        match v {
            serde_json::Value::Array(rows) => {
                let mut headers: Vec<String> = Vec::new();
                for r in &rows {
                    let obj = r.as_object().ok_or_else(|| DataError::Json("rows must be objects".into()))?;
                    for k in obj.keys() {
                        if !headers.contains(k) {
                            headers.push(k.clone());
                        }
                    }
                }
                let raw = headers
                    .iter()
                    .map(|h| rows.iter().map(|r| r.get(h).map(cell).unwrap_or_default()).collect())
                    .collect();
                Ok(from_raw_columns(name, headers, raw))
            }
            serde_json::Value::Object(obj) => {
                let cols = obj
                    .get("columns")
                    .and_then(|c| c.as_object())
                    .ok_or_else(|| DataError::Json("expected a \"columns\" object".into()))?;
                let headers: Vec<String> = cols.keys().cloned().collect();
                let raw: Vec<Vec<String>> = cols
                    .values()
                    .map(|c| c.as_array().map(|a| a.iter().map(cell).collect()).unwrap_or_default())
                    .collect();
                if let Some(n) = raw.first().map(Vec::len) {
                    if let Some((i, c)) = raw.iter().enumerate().find(|(_, c)| c.len() != n) {
                        return Err(DataError::RaggedRow {
                            row: i,
                            got: c.len(),
                            expected: n,
                        });
                    }
                }
                Ok(from_raw_columns(name, headers, raw))
            }
            _ => Err(DataError::Json("expected an array or object".into())),
        }
    }
}

fn from_raw_columns(name: &str, headers: Vec<String>, raw: Vec<Vec<String>>) -> DataTable {
    let mut fields = Vec::new();
    let mut columns = Vec::new();
    for (h, col) in headers.into_iter().zip(raw) {
        let (ty, vals) = infer_column(&col);
        fields.push(Field::new(h, ty));
        columns.push(vals);
    }
    let n = columns.first().map(Vec::len).unwrap_or(0);
    let mut t = DataTable::new(name, fields);
    t.columns = columns;
    t.row_mark = vec![None; n];
    t.filter_mask = vec![true; n];
    t
}

/// Number if every non-empty cell parses as a float, Date if every one is
/// ISO-8601, Text otherwise. Empty cells become nulls.
pub fn infer_column(cells: &[String]) -> (FieldType, Vec<Value>) {
    let present: Vec<&str> = cells.iter().map(|c| c.trim()).filter(|c| !c.is_empty()).collect();
    let nums: Option<Vec<f64>> = present.iter().map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite())).collect();
    if !present.is_empty() && nums.is_some() {
        let vals = cells
            .iter()
            .map(|c| c.trim().parse::<f64>().map(Value::Number).unwrap_or(Value::Null))
            .collect();
        return (FieldType::Number, vals);
    }
    if !present.is_empty() && present.iter().all(|c| parse_iso_date(c).is_some()) {
        let vals = cells
            .iter()
            .map(|c| parse_iso_date(c).map(Value::Date).unwrap_or(Value::Null))
            .collect();
        return (FieldType::Date, vals);
    }
    let vals = cells
        .iter()
        .map(|c| if c.trim().is_empty() { Value::Null } else { Value::Text(c.clone()) })
        .collect();
    (FieldType::Text, vals)
}

/// Label for one histogram bin: half-open, or closed for the last bin.
pub fn bin_label(lo: &Value, hi: &Value, last: bool) -> String {
    format!("[{}, {}{}", lo.render(), hi.render(), if last { "]" } else { ")" })
}

/// Pixel to data value. Dates on scales spanning more than a month snap to
/// the nearest day.
pub fn invert_position(scale: &Scale, px: f64) -> Result<Value, ScaleError> {
    let v = scale.invert(px)?;
    if let (Value::Date(ms), Scale::Date { domain, .. }) = (&v, scale) {
        if (domain[1] - domain[0]).abs() > 30.0 * DAY_MS as f64 {
            let d = (*ms as f64 / DAY_MS as f64).round() as i64;
            return Ok(Value::Date(d * DAY_MS));
        }
    }
    Ok(v)
}

fn scale_type(axis: Option<&Axis>) -> FieldType {
    match axis {
        None => FieldType::Number,
        Some(a) if a.bins.is_some() => FieldType::Text,
        Some(a) => match &a.scale {
            Scale::Date { .. } => FieldType::Date,
            Scale::Categorical { .. } => FieldType::Text,
            _ => FieldType::Number,
        },
    }
}

fn unique_name(taken: &mut Vec<String>, base: &str) -> String {
    let mut name = base.to_string();
    let mut k = 2;
    while taken.contains(&name) {
        name = format!("{base}_{k}");
        k += 1;
    }
    taken.push(name.clone());
    name
}

struct Reader {
    x: Scale,
    y: Scale,
    x_bins: Option<Vec<[f64; 2]>>,
    y_bins: Option<Vec<[f64; 2]>>,
}

impl Reader {
    fn scale(&self, o: AxisOrientation) -> &Scale {
        match o {
            AxisOrientation::X => &self.x,
            AxisOrientation::Y => &self.y,
        }
    }

    fn bins(&self, o: AxisOrientation) -> Option<&Vec<[f64; 2]>> {
        match o {
            AxisOrientation::X => self.x_bins.as_ref(),
            AxisOrientation::Y => self.y_bins.as_ref(),
        }
    }

    fn position(&self, o: AxisOrientation, px: f64) -> Value {
        let scale = self.scale(o);
        match self.bins(o) {
            Some(bins) => {
                let Some(v) = scale.invert_f64(px) else { return Value::Null };
                let date = matches!(scale, Scale::Date { .. });
                let wrap = |x: f64| if date { Value::Date(x.round() as i64) } else { Value::Number(x) };
                let n = bins.len();
                bins.iter()
                    .enumerate()
                    .find(|(i, b)| v >= b[0] && (v < b[1] || (*i == n - 1 && v <= b[1])))
                    .map(|(i, b)| Value::Text(bin_label(&wrap(b[0]), &wrap(b[1]), i == n - 1)))
                    .unwrap_or(Value::Null)
            }
            None => invert_position(scale, px).unwrap_or(Value::Null),
        }
    }

    /// Signed length of a bar between its baseline-side and far edges.
    fn length(&self, o: AxisOrientation, near: f64, far: f64) -> Value {
        let scale = self.scale(o);
        match scale {
            Scale::Log { .. } | Scale::Date { .. } => invert_position(scale, far).unwrap_or(Value::Null),
            Scale::Identity { .. } => Value::Number(match o {
                AxisOrientation::X => far - near,
                AxisOrientation::Y => near - far,
            }),
            _ => match (scale.invert_f64(far), scale.invert_f64(near)) {
                (Some(a), Some(b)) => Value::Number(a - b),
                _ => Value::Null,
            },
        }
    }
}

/// Vertices of an area outline reduced to (x, upper y, lower y) per x.
fn area_columns(points: &[(f64, f64)]) -> Vec<(f64, f64, Option<f64>)> {
    let mut by_x: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    for (x, y) in sorted {
        match by_x.last_mut() {
            Some((lx, ys)) if (x - *lx).abs() <= 1e-6 => ys.push(y),
            _ => by_x.push((x, vec![y])),
        }
    }
    by_x.into_iter()
        .map(|(x, ys)| {
            let top = ys.iter().copied().fold(f64::INFINITY, f64::min);
            let bottom = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (x, top, (ys.len() > 1 && bottom - top > 1e-9).then_some(bottom))
        })
        .collect()
}

/// Reads the backing table off the data marks.
pub fn infer_table(doc: &SvgDocument, meta: &ChartMetadata, name: &str) -> DataTable {
    infer_table_with_diagnostics(doc, meta, name).0
}

pub fn infer_table_with_diagnostics(doc: &SvgDocument, meta: &ChartMetadata, name: &str) -> (DataTable, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let xa = meta.axis(AxisOrientation::X);
    let ya = meta.axis(AxisOrientation::Y);
    let mut taken = Vec::new();
    let x_name = unique_name(&mut taken, xa.and_then(|a| a.title.as_deref()).unwrap_or("x"));
    let y_name = unique_name(&mut taken, ya.and_then(|a| a.title.as_deref()).unwrap_or("y"));
    let mut fields = vec![Field::new(x_name.clone(), scale_type(xa)), Field::new(y_name.clone(), scale_type(ya))];
    let horizontal = meta.orientation == ChartOrientation::Horizontal;
    if !meta.bars.is_empty() {
        // The value axis of a bar chart carries lengths.
        let vi = if horizontal { 0 } else { 1 };
        if fields[vi].field_type != FieldType::Date {
            fields[vi].field_type = FieldType::Number;
        }
    }
    for l in &meta.legends {
        let base = l.title.clone().unwrap_or_else(|| {
            match l.legend_type {
                LegendType::Color => "color",
                LegendType::Size => "size",
                LegendType::Shape => "shape",
            }
            .to_string()
        });
        let ty = if l.legend_type == LegendType::Size {
            FieldType::Number
        } else {
            l.entries.iter().find_map(|e| e.value.field_type()).unwrap_or(FieldType::Text)
        };
        fields.push(Field::new(unique_name(&mut taken, &base), ty));
    }
    let mut table = DataTable::new(name, fields);
    let reader = Reader {
        x: meta.scale(AxisOrientation::X),
        y: meta.scale(AxisOrientation::Y),
        x_bins: xa.and_then(|a| a.bins.clone()),
        y_bins: ya.and_then(|a| a.bins.clone()),
    };

    for (a, fname) in [(xa, &x_name), (ya, &y_name)] {
        let Some(a) = a else { continue };
        if let Some(bins) = &a.bins {
            let date = matches!(a.scale, Scale::Date { .. });
            let wrap = |x: f64| if date { Value::Date(x.round() as i64) } else { Value::Number(x) };
            let n = bins.len();
            table.orders.insert(
                fname.clone(),
                bins.iter().enumerate().map(|(i, b)| bin_label(&wrap(b[0]), &wrap(b[1]), i == n - 1)).collect(),
            );
            let contiguous = bins.windows(2).all(|w| (w[1][0] - w[0][1]).abs() <= 1e-9 * w[0][1].abs().max(1.0));
            if contiguous {
                let mut edges: Vec<f64> = bins.iter().map(|b| b[0]).collect();
                edges.push(bins[n - 1][1]);
                table.bins.insert(fname.clone(), edges);
            }
        } else if let Scale::Categorical { labels, .. } = &a.scale {
            table.orders.insert(fname.clone(), labels.clone());
        }
    }
    for (l, f) in meta.legends.iter().zip(2..) {
        if l.legend_type != LegendType::Size {
            let name = table.fields[f].name.clone();
            table.orders.insert(name, l.entries.iter().map(|e| e.label.clone()).collect());
        }
    }

    let legend_values = |m: &ResolvedMark, diagnostics: &mut Vec<Diagnostic>| -> Vec<Value> {
        meta.legends
            .iter()
            .map(|l| match l.lookup(m) {
                Some(v) => v,
                None => {
                    diagnostics.push(Diagnostic::new(
                        "unmapped-style",
                        format!("mark style not found in the {:?} legend", l.legend_type),
                        vec![m.id],
                    ));
                    Value::Null
                }
            })
            .collect()
    };

    let bars: BTreeSet<MarkId> = meta.bars.iter().copied().collect();
    for id in &meta.marks {
        let m = &doc.marks[id.0];
        let kind = meta.kind_of(m);
        if kind == MarkKind::Text {
            continue;
        }
        let legend = legend_values(m, &mut diagnostics);
        let mut push = |x: Value, y: Value| {
            let mut row = vec![x, y];
            row.extend(legend.iter().cloned());
            table.push_row(row, Some(*id)).expect("schema width");
        };
        let b = m.bbox;
        if bars.contains(id) {
            let base = meta.baseline.unwrap_or(if horizontal { b.left } else { b.bottom });
            let (cat, val, center, e0, e1) = if horizontal {
                (AxisOrientation::Y, AxisOrientation::X, b.center_y(), b.left, b.right)
            } else {
                (AxisOrientation::X, AxisOrientation::Y, b.center_x(), b.top, b.bottom)
            };
            let (near, far) = if (e0 - base).abs() <= (e1 - base).abs() { (e0, e1) } else { (e1, e0) };
            let c = reader.position(cat, center);
            let v = reader.length(val, near, far);
            if horizontal {
                push(v, c);
            } else {
                push(c, v);
            }
            continue;
        }
        match kind {
            MarkKind::Line => {
                for (px, py) in m.vertices() {
                    push(reader.position(AxisOrientation::X, px), reader.position(AxisOrientation::Y, py));
                }
            }
            MarkKind::Area => {
                for (px, top, bottom) in area_columns(&m.vertices()) {
                    let y = match bottom {
                        Some(bt) => reader.length(AxisOrientation::Y, bt, top),
                        None => reader.position(AxisOrientation::Y, top),
                    };
                    push(reader.position(AxisOrientation::X, px), y);
                }
            }
            _ => push(
                reader.position(AxisOrientation::X, b.center_x()),
                reader.position(AxisOrientation::Y, b.center_y()),
            ),
        }
    }
    (table, diagnostics)
}
