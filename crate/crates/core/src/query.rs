//! Relational operations over [`DataTable`]s: predicate selection, masking,
//! ordering, group-aggregate, derivation, and the ε-tolerant semi-join used
//! by linking.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::Datelike;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{bin_label, DataTable, Field};
use crate::value::{date_ms, naive_date, FieldType, Value, MONTHS, WEEKDAYS};

/// Pseudo-field addressing the row index of a table.
pub const INDEX_FIELD: &str = "$index";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("field {field:?} holds {expected:?} values, got {got}")]
    TypeMismatch { field: String, expected: FieldType, got: String },
    #[error("field {0:?} cannot be ordered")]
    NonOrderableField(String),
    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),
    #[error("invalid derive spec: {0}")]
    InvalidDerive(String),
    #[error("aggregate spec: {0}")]
    InvalidAggregate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "LE")]
    Le,
    #[serde(rename = "GE")]
    Ge,
    #[serde(rename = "ORDERBY")]
    OrderBy,
    #[serde(rename = "TRANSFORMBY")]
    TransformBy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "ASC")]
    Asc,
    #[serde(rename = "DESC")]
    Desc,
}

/// Zoom factor and pan offset of a navigation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformObject {
    pub k: f64,
    pub tx: f64,
    pub ty: f64,
}

impl TransformObject {
    pub const IDENTITY: TransformObject = TransformObject { k: 1.0, tx: 0.0, ty: 0.0 };

    pub fn pan(tx: f64, ty: f64) -> Self {
        TransformObject { k: 1.0, tx, ty }
    }

    pub fn is_valid(&self) -> bool {
        self.k.is_finite() && self.k > 0.0 && self.tx.is_finite() && self.ty.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateValue {
    Direction(Direction),
    Transform(TransformObject),
    Scalar(Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub field: String,
    pub op: Op,
    pub value: PredicateValue,
}

impl Predicate {
    pub fn eq(field: impl Into<String>, value: Value) -> Self {
        Predicate { field: field.into(), op: Op::Eq, value: PredicateValue::Scalar(value) }
    }

    pub fn le(field: impl Into<String>, value: Value) -> Self {
        Predicate { field: field.into(), op: Op::Le, value: PredicateValue::Scalar(value) }
    }

    pub fn ge(field: impl Into<String>, value: Value) -> Self {
        Predicate { field: field.into(), op: Op::Ge, value: PredicateValue::Scalar(value) }
    }

    pub fn order_by(field: impl Into<String>, dir: Direction) -> Self {
        Predicate { field: field.into(), op: Op::OrderBy, value: PredicateValue::Direction(dir) }
    }

    pub fn transform_by(field: impl Into<String>, t: TransformObject) -> Self {
        Predicate { field: field.into(), op: Op::TransformBy, value: PredicateValue::Transform(t) }
    }

    /// Checks the op/value pairing.
    pub fn validate(&self) -> Result<(), QueryError> {
        match (self.op, &self.value) {
            (Op::Eq | Op::Le | Op::Ge, PredicateValue::Scalar(_)) => Ok(()),
            (Op::OrderBy, PredicateValue::Direction(_)) => Ok(()),
            (Op::TransformBy, PredicateValue::Transform(t)) if t.is_valid() => Ok(()),
            (Op::TransformBy, PredicateValue::Transform(_)) => Err(QueryError::InvalidPredicate("transform scale must be positive".into())),
            (op, v) => Err(QueryError::InvalidPredicate(format!("{op:?} cannot take {v:?}"))),
        }
    }

    pub fn is_selection(&self) -> bool {
        matches!(self.op, Op::Eq | Op::Le | Op::Ge)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let value = match &self.value {
            PredicateValue::Scalar(v) => v.render(),
            PredicateValue::Direction(Direction::Asc) => "ASC".into(),
            PredicateValue::Direction(Direction::Desc) => "DESC".into(),
            PredicateValue::Transform(t) => format!("k={} tx={} ty={}", t.k, t.tx, t.ty),
        };
        let op = match self.op {
            Op::Eq => "EQ",
            Op::Le => "LE",
            Op::Ge => "GE",
            Op::OrderBy => "ORDERBY",
            Op::TransformBy => "TRANSFORMBY",
        };
        write!(f, "{} {} {}", self.field, op, value)
    }
}

fn field_type_of(table: &DataTable, field: &str) -> Result<FieldType, QueryError> {
    if field == INDEX_FIELD {
        return Ok(FieldType::Number);
    }
    table
        .field(field)
        .map(|f| f.field_type)
        .ok_or_else(|| QueryError::UnknownField(field.to_string()))
}

fn cell(table: &DataTable, field: Option<usize>, row: usize) -> Value {
    match field {
        Some(i) => table.value(row, i).clone(),
        None => Value::Number(row as f64),
    }
}

/// Brings a predicate value to the field's type, or fails.
fn coerce(field: &str, ty: FieldType, v: &Value) -> Result<Value, QueryError> {
    let mismatch = || QueryError::TypeMismatch {
        field: field.to_string(),
        expected: ty,
        got: format!("{v:?}"),
    };
    match (ty, v) {
        (FieldType::Number, Value::Number(_)) | (FieldType::Text, Value::Text(_)) | (FieldType::Date, Value::Date(_)) => Ok(v.clone()),
        (FieldType::Date, Value::Text(s)) => crate::value::parse_iso_date(s).map(Value::Date).ok_or_else(mismatch),
        (FieldType::Date, Value::Number(n)) if n.fract() == 0.0 => Ok(Value::Date(*n as i64)),
        _ => Err(mismatch()),
    }
}

/// Live rows satisfying an EQ/LE/GE predicate. Comparisons are exact.
pub fn select(table: &DataTable, p: &Predicate) -> Result<BTreeSet<usize>, QueryError> {
    select_within(table, p, &table.live_rows())
}

/// [`select`] restricted to `rows` (dead rows are dropped).
pub fn select_within(table: &DataTable, p: &Predicate, rows: &[usize]) -> Result<BTreeSet<usize>, QueryError> {
    p.validate()?;
    let PredicateValue::Scalar(raw) = &p.value else {
        return Err(QueryError::InvalidPredicate(format!("{:?} is not a selection", p.op)));
    };
    let ty = field_type_of(table, &p.field)?;
    let target = coerce(&p.field, ty, raw)?;
    if ty == FieldType::Text && p.op != Op::Eq {
        return Err(QueryError::TypeMismatch {
            field: p.field.clone(),
            expected: ty,
            got: "range bound on text".into(),
        });
    }
    let idx = if p.field == INDEX_FIELD { None } else { table.field_index(&p.field) };
    let mut out = BTreeSet::new();
    for &r in rows {
        if !table.is_live(r) {
            continue;
        }
        let v = cell(table, idx, r);
        if v.is_null() {
            continue;
        }
        let hit = match p.op {
            Op::Eq => v == target,
            Op::Le => v.cmp_same(&target) != std::cmp::Ordering::Greater,
            Op::Ge => v.cmp_same(&target) != std::cmp::Ordering::Less,
            _ => false,
        };
        if hit {
            out.insert(r);
        }
    }
    Ok(out)
}

/// Replaces or extends the table's selection. Rows outside the live set are
/// ignored.
pub fn compose_selection(table: &mut DataTable, new_rows: &BTreeSet<usize>, append: bool) -> BTreeSet<usize> {
    let live: BTreeSet<usize> = new_rows.iter().copied().filter(|r| table.is_live(*r)).collect();
    let next = match (&table.selection, append) {
        (Some(cur), true) => cur.union(&live).copied().collect(),
        _ => live,
    };
    table.selection = Some(next.clone());
    next
}

/// Updates the filter mask: inclusive keeps only `rows` live, exclusive kills
/// them. Selections lose dead rows.
pub fn filter(table: &mut DataTable, rows: &BTreeSet<usize>, inclusive: bool) -> Vec<bool> {
    for r in 0..table.row_count() {
        let listed = rows.contains(&r);
        if inclusive != listed {
            table.filter_mask[r] = false;
        }
    }
    if let Some(sel) = &mut table.selection {
        let mask = &table.filter_mask;
        sel.retain(|r| mask.get(*r).copied().unwrap_or(false));
    }
    table.filter_mask.clone()
}

/// Stable ordering of live rows by a numeric or date field. Nulls go last.
pub fn order_by(table: &DataTable, field: &str, dir: Direction) -> Result<Vec<usize>, QueryError> {
    let ty = field_type_of(table, field)?;
    if ty == FieldType::Text {
        return Err(QueryError::NonOrderableField(field.to_string()));
    }
    let idx = if field == INDEX_FIELD { None } else { table.field_index(field) };
    let mut rows = table.live_rows();
    rows.sort_by(|a, b| {
        let (va, vb) = (cell(table, idx, *a), cell(table, idx, *b));
        match (va.is_null(), vb.is_null()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            _ => match dir {
                Direction::Asc => va.cmp_same(&vb),
                Direction::Desc => vb.cmp_same(&va),
            },
        }
    });
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggOp {
    Min,
    Max,
    Mean,
    Sum,
    Count,
    Stdev,
    Median,
}

impl AggOp {
    pub const ALL: [AggOp; 7] = [AggOp::Min, AggOp::Max, AggOp::Mean, AggOp::Sum, AggOp::Count, AggOp::Stdev, AggOp::Median];

    pub fn name(self) -> &'static str {
        match self {
            AggOp::Min => "min",
            AggOp::Max => "max",
            AggOp::Mean => "mean",
            AggOp::Sum => "sum",
            AggOp::Count => "count",
            AggOp::Stdev => "stdev",
            AggOp::Median => "median",
        }
    }

    /// Null for empty input (and for stdev of fewer than two values).
    pub fn apply(self, xs: &[f64]) -> Option<f64> {
        let n = xs.len();
        if self == AggOp::Count {
            return Some(n as f64);
        }
        if n == 0 {
            return None;
        }
        let sum: f64 = xs.iter().sum();
        let mean = sum / n as f64;
        Some(match self {
            AggOp::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            AggOp::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            AggOp::Mean => mean,
            AggOp::Sum => sum,
            AggOp::Stdev => {
                if n < 2 {
                    return None;
                }
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            }
            AggOp::Median => {
                let mut s = xs.to_vec();
                s.sort_by(f64::total_cmp);
                if n % 2 == 1 {
                    s[n / 2]
                } else {
                    (s[n / 2 - 1] + s[n / 2]) / 2.0
                }
            }
            AggOp::Count => unreachable!(),
        })
    }
}

/// One aggregated output column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aggregate {
    /// Source field; ignored by `count`.
    pub field: String,
    pub op: AggOp,
}

impl Aggregate {
    pub fn new(field: impl Into<String>, op: AggOp) -> Self {
        Aggregate { field: field.into(), op }
    }

    pub fn count() -> Self {
        Aggregate { field: String::new(), op: AggOp::Count }
    }

    pub fn output_name(&self) -> String {
        if self.op == AggOp::Count {
            "count".into()
        } else {
            format!("{}_{}", self.op.name(), self.field)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AggregateSpec {
    pub groupby: Vec<String>,
    pub aggs: Vec<Aggregate>,
}

impl fmt::Display for AggregateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "groupby({})", self.groupby.join(", "))?;
        for a in &self.aggs {
            if a.op == AggOp::Count {
                write!(f, " count")?;
            } else {
                write!(f, " {}({})", a.op.name(), a.field)?;
            }
        }
        Ok(())
    }
}

/// Aggregated table plus, per output row, the source rows it summarizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouped {
    pub table: DataTable,
    pub provenance: Vec<Vec<usize>>,
}

/// One row per distinct groupby tuple over live rows, in first-seen order.
pub fn group_aggregate(table: &DataTable, spec: &AggregateSpec) -> Result<Grouped, QueryError> {
    let mut key_idx = Vec::new();
    for g in &spec.groupby {
        key_idx.push(table.field_index(g).ok_or_else(|| QueryError::UnknownField(g.clone()))?);
    }
    let mut agg_idx = Vec::new();
    for a in &spec.aggs {
        if a.op == AggOp::Count {
            agg_idx.push(None);
            continue;
        }
        if spec.groupby.contains(&a.field) {
            return Err(QueryError::InvalidAggregate(format!("{:?} is both grouped and aggregated", a.field)));
        }
        let i = table.field_index(&a.field).ok_or_else(|| QueryError::UnknownField(a.field.clone()))?;
        if table.fields[i].field_type != FieldType::Number {
            return Err(QueryError::TypeMismatch {
                field: a.field.clone(),
                expected: FieldType::Number,
                got: format!("{:?}", table.fields[i].field_type),
            });
        }
        agg_idx.push(Some(i));
    }
    let mut fields: Vec<Field> = key_idx.iter().map(|i| table.fields[*i].clone()).collect();
    let mut names: BTreeSet<String> = fields.iter().map(|f| f.name.clone()).collect();
    for a in &spec.aggs {
        let mut name = a.output_name();
        let base = name.clone();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        names.insert(name.clone());
        fields.push(Field::new(name, FieldType::Number));
    }

    let mut groups: Vec<(Vec<Value>, Vec<usize>)> = Vec::new();
    let mut lookup: HashMap<Vec<String>, usize> = HashMap::new();
    for r in table.live_rows() {
        let key: Vec<Value> = key_idx.iter().map(|i| table.value(r, *i).clone()).collect();
        let hkey: Vec<String> = key.iter().map(|v| format!("{v:?}")).collect();
        let g = *lookup.entry(hkey).or_insert_with(|| {
            groups.push((key.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push(r);
    }

    let mut out = DataTable::new(format!("{}:{}", table.name, spec), fields);
    let mut provenance = Vec::with_capacity(groups.len());
    for (key, rows) in groups {
        let mut values = key;
        for (a, idx) in spec.aggs.iter().zip(&agg_idx) {
            let xs: Vec<f64> = match idx {
                Some(i) => rows.iter().filter_map(|r| table.value(*r, *i).as_f64()).collect(),
                None => vec![0.0; rows.len()],
            };
            values.push(a.op.apply(&xs).map(Value::Number).unwrap_or(Value::Null));
        }
        out.push_row(values, None).expect("schema built above");
        provenance.push(rows);
    }
    for g in &spec.groupby {
        if let Some(o) = table.orders.get(g) {
            out.orders.insert(g.clone(), o.clone());
        }
    }
    Ok(Grouped { table: out, provenance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatePart {
    Year,
    /// First day of the month, as a date.
    Month,
    /// The calendar day, time dropped.
    Day,
    MonthOfYear,
    DayOfMonth,
    DayOfWeek,
    /// `MM-DD`, the date without its year.
    MonthDay,
}

impl DatePart {
    pub const ALL: [DatePart; 7] = [
        DatePart::Year,
        DatePart::Month,
        DatePart::Day,
        DatePart::MonthOfYear,
        DatePart::DayOfMonth,
        DatePart::DayOfWeek,
        DatePart::MonthDay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatePart::Year => "year",
            DatePart::Month => "month",
            DatePart::Day => "day",
            DatePart::MonthOfYear => "month-of-year",
            DatePart::DayOfMonth => "day-of-month",
            DatePart::DayOfWeek => "day-of-week",
            DatePart::MonthDay => "month-day",
        }
    }

    pub fn output_type(self) -> FieldType {
        match self {
            DatePart::Year | DatePart::DayOfMonth => FieldType::Number,
            DatePart::Month | DatePart::Day => FieldType::Date,
            DatePart::MonthOfYear | DatePart::DayOfWeek | DatePart::MonthDay => FieldType::Text,
        }
    }

    pub fn apply(self, ms: i64) -> Value {
        let Some(d) = naive_date(ms) else { return Value::Null };
        match self {
            DatePart::Year => Value::Number(d.year() as f64),
            DatePart::Month => date_ms(d.year(), d.month(), 1).map(Value::Date).unwrap_or(Value::Null),
            DatePart::Day => date_ms(d.year(), d.month(), d.day()).map(Value::Date).unwrap_or(Value::Null),
            DatePart::MonthOfYear => Value::Text(MONTHS[d.month0() as usize].to_string()),
            DatePart::DayOfMonth => Value::Number(d.day() as f64),
            DatePart::DayOfWeek => Value::Text(WEEKDAYS[d.weekday().num_days_from_monday() as usize].to_string()),
            DatePart::MonthDay => Value::Text(format!("{:02}-{:02}", d.month(), d.day())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum DeriveSpec {
    DateFormat { part: DatePart },
    NumericBin { edges: Vec<f64> },
}

impl DeriveSpec {
    pub fn validate(&self) -> Result<(), QueryError> {
        if let DeriveSpec::NumericBin { edges } = self {
            if edges.len() < 2 {
                return Err(QueryError::InvalidDerive("at least two bin edges required".into()));
            }
            if edges.windows(2).any(|w| !(w[1] > w[0])) || edges.iter().any(|e| !e.is_finite()) {
                return Err(QueryError::InvalidDerive("bin edges must be strictly ascending".into()));
            }
        }
        Ok(())
    }

    pub fn output_name(&self, field: &str) -> String {
        match self {
            DeriveSpec::DateFormat { part } => format!("{}_{}", part.name(), field),
            DeriveSpec::NumericBin { .. } => format!("bin_{field}"),
        }
    }
}

impl fmt::Display for DeriveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeriveSpec::DateFormat { part } => write!(f, "{}", part.name()),
            DeriveSpec::NumericBin { edges } => write!(f, "bin[{} edges]", edges.len()),
        }
    }
}

/// Index of the bin holding `v`: half-open, the last bin closed.
pub fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len();
    if n < 2 || !(v >= edges[0]) || v > edges[n - 1] {
        return None;
    }
    if v == edges[n - 1] {
        return Some(n - 2);
    }
    Some(edges.partition_point(|e| *e <= v) - 1)
}

/// Derived column plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub table: DataTable,
    pub field: String,
    /// Rows whose value fell outside every bin.
    pub out_of_bins: Vec<usize>,
}

/// Appends a derived column computed from `field`.
pub fn derive(table: &DataTable, field: &str, spec: &DeriveSpec) -> Result<Derived, QueryError> {
    spec.validate()?;
    let i = table.field_index(field).ok_or_else(|| QueryError::UnknownField(field.to_string()))?;
    let ty = table.fields[i].field_type;
    let (out_ty, expected) = match spec {
        DeriveSpec::DateFormat { part } => (part.output_type(), FieldType::Date),
        DeriveSpec::NumericBin { .. } => (FieldType::Text, FieldType::Number),
    };
    if ty != expected {
        return Err(QueryError::TypeMismatch {
            field: field.to_string(),
            expected,
            got: format!("{ty:?}"),
        });
    }
    let mut name = spec.output_name(field);
    while table.field_index(&name).is_some() {
        name.push('_');
    }
    let mut out_of_bins = Vec::new();
    let col: Vec<Value> = table.columns[i]
        .iter()
        .enumerate()
        .map(|(r, v)| match (spec, v) {
            (_, Value::Null) => Value::Null,
            (DeriveSpec::DateFormat { part }, Value::Date(ms)) => part.apply(*ms),
            (DeriveSpec::NumericBin { edges }, Value::Number(x)) => match bin_index(edges, *x) {
                Some(b) => Value::Text(bin_label(&Value::Number(edges[b]), &Value::Number(edges[b + 1]), b + 2 == edges.len())),
                None => {
                    out_of_bins.push(r);
                    Value::Null
                }
            },
            _ => Value::Null,
        })
        .collect();
    let mut t = table.clone();
    t.fields.push(Field::new(name.clone(), out_ty));
    t.columns.push(col);
    if let DeriveSpec::NumericBin { edges } = spec {
        let labels = edges
            .windows(2)
            .enumerate()
            .map(|(b, w)| bin_label(&Value::Number(w[0]), &Value::Number(w[1]), b + 2 == edges.len()))
            .collect();
        t.orders.insert(name.clone(), labels);
    }
    Ok(Derived { table: t, field: name, out_of_bins })
}

/// ε for one column: `fraction` of its numeric range, zero for other types.
pub fn epsilon_for(col: &[Value], fraction: f64) -> f64 {
    let nums: Vec<f64> = col
        .iter()
        .filter_map(|v| match v {
            Value::Number(n) => Some(*n),
            _ => None,
        })
        .collect();
    if nums.is_empty() {
        return 0.0;
    }
    let lo = nums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = nums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    fraction * (hi - lo)
}

/// Matches every value of `b` to a distinct value of `a`. Numbers match
/// within `epsilon`; text, dates and nulls match exactly.
/// Returns, per index of `b`, the chosen index of `a`.
pub fn semi_join_match(a: &[Value], b: &[Value], epsilon: f64) -> Option<Vec<usize>> {
    if b.len() > a.len() {
        return None;
    }
    let mut out = vec![usize::MAX; b.len()];
    let mut exact_pool: HashMap<String, Vec<usize>> = HashMap::new();
    let mut nums: BTreeMap<OrdF64, Vec<usize>> = BTreeMap::new();
    for (i, v) in a.iter().enumerate().rev() {
        match v {
            Value::Number(n) => nums.entry(OrdF64(*n)).or_default().push(i),
            other => exact_pool.entry(exact_key(other)).or_default().push(i),
        }
    }
    let mut numeric_b: Vec<(f64, usize)> = Vec::new();
    for (j, v) in b.iter().enumerate() {
        match v {
            Value::Number(n) => numeric_b.push((*n, j)),
            other => {
                let i = exact_pool.get_mut(&exact_key(other)).and_then(|pool| pool.pop())?;
                out[j] = i;
            }
        }
    }
    // Equal-width windows: smallest free value in [b-ε, b+ε], b ascending.
    numeric_b.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let eps = epsilon.max(0.0);
    for (x, j) in numeric_b {
        let lo = OrdF64(x - eps);
        let key = nums.range(lo..).next().map(|(k, _)| *k)?;
        if key.0 > x + eps {
            return None;
        }
        let pool = nums.get_mut(&key).expect("key from range");
        out[j] = pool.pop().expect("pools are never left empty");
        if pool.is_empty() {
            nums.remove(&key);
        }
    }
    Some(out)
}

fn exact_key(v: &Value) -> String {
    match v {
        Value::Null => "n".into(),
        Value::Text(s) => format!("t{s}"),
        Value::Date(ms) => format!("d{ms}"),
        Value::Number(n) => format!("f{n}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
