//! Link discovery between view tables (relationship and transform linking),
//! the source/target link graph, and dataflow planning for propagation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DataTable;
use crate::deconstruct::Diagnostic;
use crate::query::{self, AggOp, Aggregate, AggregateSpec, DatePart, DeriveSpec, QueryError};
use crate::value::{FieldType, Value};

/// Id of the external table node.
pub const EXTERNAL: &str = "external";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("unknown view {0:?}")]
    UnknownView(String),
    #[error("source edges form a cycle through {0:?}")]
    CycleDetected(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Linking knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct LinkOptions {
    /// Fraction of the target column's range allowed as numeric error.
    pub epsilon: f64,
    /// Candidate transform specs tried per direction.
    pub budget: usize,
}

impl Default for LinkOptions {
    fn default() -> Self {
        LinkOptions { epsilon: 0.01, budget: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnMatch {
    pub field_from: String,
    pub field_to: String,
    /// Per live row of D2 (in order), the matching D1 row.
    pub row_map: Vec<(usize, usize)>,
    pub epsilon_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "camelCase")]
pub enum TransformStep {
    Derive { field: String, spec: DeriveSpec },
    Aggregate { spec: AggregateSpec },
}

/// Ordered derive steps followed by at most one aggregate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransformSpec {
    pub steps: Vec<TransformStep>,
}

impl TransformSpec {
    pub fn aggregate(&self) -> Option<&AggregateSpec> {
        self.steps.iter().rev().find_map(|s| match s {
            TransformStep::Aggregate { spec } => Some(spec),
            _ => None,
        })
    }

    /// Human-readable steps, e.g. `["groupby(weather)", "sum(temp_max)"]`.
    pub fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.steps {
            match s {
                TransformStep::Derive { field, spec } => match spec {
                    DeriveSpec::NumericBin { .. } => out.push(format!("bin({field})")),
                    DeriveSpec::DateFormat { part } => out.push(format!("{}({field})", part.name())),
                },
                TransformStep::Aggregate { spec } => {
                    out.push(format!("groupby({})", spec.groupby.join(", ")));
                    for a in &spec.aggs {
                        if a.op == AggOp::Count {
                            out.push("count".into());
                        } else {
                            out.push(format!("{}({})", a.op.name(), a.field));
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe().join(" "))
    }
}

/// Output of [`apply_transform`]: the derived table and, per output row, the
/// input rows it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub table: DataTable,
    pub provenance: Vec<Vec<usize>>,
}

pub fn apply_transform(table: &DataTable, spec: &TransformSpec) -> Result<Applied, QueryError> {
    let mut cur = table.clone();
    let mut provenance: Vec<Vec<usize>> = (0..table.row_count()).map(|r| vec![r]).collect();
    let mut aggregated = false;
    for step in &spec.steps {
        match step {
            TransformStep::Derive { field, spec } => {
                if aggregated {
                    return Err(QueryError::InvalidAggregate("derive after aggregate".into()));
                }
                let d = query::derive(&cur, field, spec)?;
                cur = d.table;
                for r in d.out_of_bins {
                    cur.filter_mask[r] = false;
                }
            }
            TransformStep::Aggregate { spec } => {
                if aggregated {
                    return Err(QueryError::InvalidAggregate("more than one aggregate step".into()));
                }
                let g = query::group_aggregate(&cur, spec)?;
                provenance = g.provenance.iter().map(|rows| rows.iter().flat_map(|r| provenance[*r].clone()).collect()).collect();
                cur = g.table;
                aggregated = true;
            }
        }
    }
    if !aggregated {
        let live = cur.live_rows();
        provenance = live.iter().map(|r| provenance[*r].clone()).collect();
        cur = cur.subset(&live);
    }
    Ok(Applied { table: cur, provenance })
}

fn cells_match(a: &Value, b: &Value, eps: f64) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => (x - y).abs() <= eps,
        _ => a == b,
    }
}

/// Maximum bipartite matching (Hopcroft-Karp). `adj[j]` lists candidate
/// right-side indices for left vertex `j`. Returns `None` unless every left
/// vertex is matched.
fn perfect_matching(adj: &[Vec<usize>], right: usize) -> Option<Vec<usize>> {
    const NIL: usize = usize::MAX;
    let n = adj.len();
    let mut match_l = vec![NIL; n];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0usize; n];
    loop {
        let mut queue = VecDeque::new();
        let mut found = false;
        for u in 0..n {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        fn dfs(u: usize, adj: &[Vec<usize>], match_l: &mut [usize], match_r: &mut [usize], dist: &mut [usize]) -> bool {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && dfs(w, adj, match_l, match_r, dist)) {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        let mut progressed = false;
        for u in 0..n {
            if match_l[u] == NIL && dfs(u, adj, &mut match_l, &mut match_r, &mut dist) {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    if match_l.contains(&NIL) {
        None
    } else {
        Some(match_l)
    }
}

struct Pair {
    c1: usize,
    c2: usize,
    eps: f64,
}

/// Row correspondence satisfying every column pair at once.
fn joint_match(d1: &DataTable, rows1: &[usize], d2: &DataTable, rows2: &[usize], pairs: &[Pair]) -> Option<Vec<usize>> {
    let key = pairs
        .iter()
        .position(|p| d2.fields[p.c2].field_type != FieldType::Number)
        .unwrap_or(0);
    let kp = &pairs[key];
    let mut adj = Vec::with_capacity(rows2.len());
    if d2.fields[kp.c2].field_type == FieldType::Number {
        let mut sorted: Vec<(f64, usize)> = rows1
            .iter()
            .enumerate()
            .filter_map(|(pos, r)| d1.value(*r, kp.c1).as_f64().map(|v| (v, pos)))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nulls: Vec<usize> = rows1.iter().enumerate().filter(|(_, r)| d1.value(**r, kp.c1).is_null()).map(|(p, _)| p).collect();
        for r2 in rows2 {
            let b = d2.value(*r2, kp.c2);
            let cands: Vec<usize> = match b.as_f64() {
                Some(x) => {
                    let lo = sorted.partition_point(|e| e.0 < x - kp.eps);
                    sorted[lo..].iter().take_while(|e| e.0 <= x + kp.eps).map(|e| e.1).collect()
                }
                None if b.is_null() => nulls.clone(),
                None => Vec::new(),
            };
            adj.push(cands);
        }
    } else {
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (pos, r) in rows1.iter().enumerate() {
            index.entry(format!("{:?}", d1.value(*r, kp.c1))).or_default().push(pos);
        }
        for r2 in rows2 {
            adj.push(index.get(&format!("{:?}", d2.value(*r2, kp.c2))).cloned().unwrap_or_default());
        }
    }
    for (j, r2) in rows2.iter().enumerate() {
        adj[j].retain(|pos| {
            pairs
                .iter()
                .all(|p| cells_match(d1.value(rows1[*pos], p.c1), d2.value(*r2, p.c2), p.eps))
        });
        adj[j].sort_unstable();
        if adj[j].is_empty() {
            return None;
        }
    }
    perfect_matching(&adj, rows1.len()).map(|m| m.into_iter().map(|pos| rows1[pos]).collect())
}

/// Column matches of D2 against D1: every live D2 value must be covered by a
/// distinct live D1 row, jointly across all matched pairs.
pub fn relationship_link(d1: &DataTable, d2: &DataTable, opts: &LinkOptions, diagnostics: &mut Vec<Diagnostic>) -> Option<Vec<ColumnMatch>> {
    let rows1 = d1.live_rows();
    let rows2 = d2.live_rows();
    if rows1.is_empty() || rows2.is_empty() || rows2.len() > rows1.len() {
        return None;
    }
    let mut pairs: Vec<Pair> = Vec::new();
    let mut used1: BTreeSet<usize> = BTreeSet::new();
    let mut current: Option<Vec<usize>> = None;
    for c2 in 0..d2.fields.len() {
        let col2: Vec<Value> = rows2.iter().map(|r| d2.value(*r, c2).clone()).collect();
        let eps = query::epsilon_for(&col2, opts.epsilon);
        for c1 in 0..d1.fields.len() {
            if used1.contains(&c1) || d1.fields[c1].field_type != d2.fields[c2].field_type {
                continue;
            }
            let col1: Vec<Value> = rows1.iter().map(|r| d1.value(*r, c1).clone()).collect();
            if query::semi_join_match(&col1, &col2, eps).is_none() {
                continue;
            }
            pairs.push(Pair { c1, c2, eps });
            match joint_match(d1, &rows1, d2, &rows2, &pairs) {
                Some(map) => {
                    used1.insert(c1);
                    current = Some(map);
                    break;
                }
                None => {
                    pairs.pop();
                    diagnostics.push(Diagnostic::new(
                        "conflicting-row-maps",
                        format!(
                            "{}.{} matches {}.{} alone but not together with earlier matches",
                            d2.name, d2.fields[c2].name, d1.name, d1.fields[c1].name
                        ),
                        Vec::new(),
                    ));
                }
            }
        }
    }
    let map = current?;
    let row_map: Vec<(usize, usize)> = rows2.iter().copied().zip(map).collect();
    Some(
        pairs
            .iter()
            .map(|p| ColumnMatch {
                field_from: d1.fields[p.c1].name.clone(),
                field_to: d2.fields[p.c2].name.clone(),
                row_map: row_map.clone(),
                epsilon_used: p.eps,
            })
            .collect(),
    )
}

fn unique_on(table: &DataTable, rows: &[usize], fields: &[usize]) -> bool {
    let mut seen = BTreeSet::new();
    rows.iter().all(|r| seen.insert(fields.iter().map(|f| format!("{:?}", table.value(*r, *f))).collect::<Vec<_>>()))
}

/// A relationship linking counts as direct when it covers every D2 field, or
/// when its matched fields include text or dates and form a key on both
/// sides.
pub fn is_direct(d1: &DataTable, d2: &DataTable, matches: &[ColumnMatch]) -> bool {
    if matches.is_empty() {
        return false;
    }
    if matches.len() == d2.fields.len() {
        return true;
    }
    let f1: Vec<usize> = matches.iter().filter_map(|m| d1.field_index(&m.field_from)).collect();
    let f2: Vec<usize> = matches.iter().filter_map(|m| d2.field_index(&m.field_to)).collect();
    let keyed = f2.iter().any(|f| d2.fields[*f].field_type != FieldType::Number);
    keyed && unique_on(d1, &d1.live_rows(), &f1) && unique_on(d2, &d2.live_rows(), &f2)
}

/// Bin edges suggested by a counterpart view: its axis bins, bin labels in
/// its text columns, then quartiles of `values`.
fn candidate_edges(counterpart: &DataTable, values: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = counterpart.bins.values().cloned().collect();
    for (i, f) in counterpart.fields.iter().enumerate() {
        if f.field_type != FieldType::Text {
            continue;
        }
        let mut edges: Vec<f64> = Vec::new();
        let mut ok = true;
        for v in &counterpart.columns[i] {
            let Some(s) = v.as_text() else { continue };
            match parse_bin_label(s) {
                Some((lo, hi)) => {
                    edges.push(lo);
                    edges.push(hi);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && !edges.is_empty() {
            edges.sort_by(f64::total_cmp);
            edges.dedup();
            if !out.contains(&edges) {
                out.push(edges);
            }
        }
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    if sorted.len() >= 4 {
        let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
        let mut edges = vec![q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)];
        edges.dedup();
        if edges.len() >= 2 && !out.contains(&edges) {
            out.push(edges);
        }
    }
    out
}

/// Parses `[lo, hi)` or `[lo, hi]`.
pub fn parse_bin_label(s: &str) -> Option<(f64, f64)> {
    let inner = s.trim().strip_prefix('[')?;
    let inner = inner.strip_suffix(')').or_else(|| inner.strip_suffix(']'))?;
    let (lo, hi) = inner.split_once(',')?;
    let lo: f64 = lo.trim().parse().ok()?;
    let hi: f64 = hi.trim().parse().ok()?;
    (hi > lo).then_some((lo, hi))
}

const VALUE_OPS: [AggOp; 6] = [AggOp::Min, AggOp::Max, AggOp::Mean, AggOp::Sum, AggOp::Stdev, AggOp::Median];

fn agg_specs(groupby: &[String], numeric: &[String]) -> Vec<AggregateSpec> {
    let mut out = Vec::new();
    for op in VALUE_OPS {
        for f in numeric {
            if groupby.contains(f) {
                continue;
            }
            out.push(AggregateSpec {
                groupby: groupby.to_vec(),
                aggs: vec![Aggregate::new(f.clone(), op)],
            });
        }
    }
    out.push(AggregateSpec {
        groupby: groupby.to_vec(),
        aggs: vec![Aggregate::count()],
    });
    out
}

/// Candidate transforms of `d` in a fixed order: single-field groupby, then
/// one derive step before groupby, then two-field groupby. At most `budget`
/// specs; the flag reports truncation.
pub fn enumerate_transforms(d: &DataTable, counterpart: Option<&DataTable>, budget: usize) -> (Vec<TransformSpec>, bool) {
    let mut out = Vec::new();
    let names: Vec<String> = d.fields.iter().map(|f| f.name.clone()).collect();
    let numeric: Vec<String> = d.fields.iter().filter(|f| f.field_type == FieldType::Number).map(|f| f.name.clone()).collect();
    let push = |spec: TransformSpec, out: &mut Vec<TransformSpec>| -> bool {
        if out.len() >= budget {
            return false;
        }
        out.push(spec);
        true
    };
    for g in &names {
        for a in agg_specs(std::slice::from_ref(g), &numeric) {
            if !push(TransformSpec { steps: vec![TransformStep::Aggregate { spec: a }] }, &mut out) {
                return (out, true);
            }
        }
    }
    for f in &d.fields {
        let derives: Vec<DeriveSpec> = match f.field_type {
            FieldType::Date => DatePart::ALL.iter().map(|p| DeriveSpec::DateFormat { part: *p }).collect(),
            FieldType::Number => {
                let values: Vec<f64> = d.column(&f.name).unwrap_or(&[]).iter().filter_map(|v| v.as_f64()).collect();
                let empty = DataTable::new("", Vec::new());
                candidate_edges(counterpart.unwrap_or(&empty), &values)
                    .into_iter()
                    .map(|edges| DeriveSpec::NumericBin { edges })
                    .collect()
            }
            FieldType::Text => Vec::new(),
        };
        for spec in derives {
            let derived = spec.output_name(&f.name);
            for a in agg_specs(std::slice::from_ref(&derived), &numeric) {
                let steps = vec![
                    TransformStep::Derive { field: f.name.clone(), spec: spec.clone() },
                    TransformStep::Aggregate { spec: a },
                ];
                if !push(TransformSpec { steps }, &mut out) {
                    return (out, true);
                }
            }
        }
    }
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let g = vec![names[i].clone(), names[j].clone()];
            for a in agg_specs(&g, &numeric) {
                if !push(TransformSpec { steps: vec![TransformStep::Aggregate { spec: a }] }, &mut out) {
                    return (out, true);
                }
            }
        }
    }
    (out, false)
}

/// A transform linking found by [`transform_link`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatch {
    pub spec: TransformSpec,
    pub matches: Vec<ColumnMatch>,
    pub applied: Applied,
}

/// First spec whose output covers every D2 field; otherwise the earliest
/// spec with the most matched fields. Outputs must have D2's row count.
pub fn transform_link(d1: &DataTable, d2: &DataTable, opts: &LinkOptions, diagnostics: &mut Vec<Diagnostic>) -> Option<TransformMatch> {
    let (specs, truncated) = enumerate_transforms(d1, Some(d2), opts.budget);
    if truncated {
        diagnostics.push(Diagnostic::new(
            "budget-exhausted",
            format!("transform enumeration for {} → {} stopped at {} specs", d1.name, d2.name, opts.budget),
            Vec::new(),
        ));
    }
    let target_rows = d2.live_rows().len();
    let mut best: Option<TransformMatch> = None;
    let mut scratch = Vec::new();
    for spec in specs {
        let Ok(applied) = apply_transform(d1, &spec) else { continue };
        if applied.table.row_count() != target_rows {
            continue;
        }
        let Some(matches) = relationship_link(&applied.table, d2, opts, &mut scratch) else { continue };
        let full = matches.len() == d2.fields.len();
        if best.as_ref().map(|b| matches.len() > b.matches.len()).unwrap_or(true) {
            best = Some(TransformMatch { spec, matches, applied });
        }
        if full {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "AtoB")]
    AToB,
    #[serde(rename = "BtoA")]
    BToA,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum LinkKind {
    Direct,
    Transformed { direction: Direction, transforms: TransformSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkResult {
    pub pair: (String, String),
    pub kind: LinkKind,
    pub matches: Vec<ColumnMatch>,
}

/// Links one pair of tables. Direct linking in either orientation wins;
/// otherwise transforms of A, then of B, are searched.
pub fn link_pair(a: &DataTable, b: &DataTable, opts: &LinkOptions, diagnostics: &mut Vec<Diagnostic>) -> Option<(LinkResult, Option<Applied>)> {
    let pair = (a.name.clone(), b.name.clone());
    for (d1, d2, flip) in [(a, b, false), (b, a, true)] {
        if let Some(m) = relationship_link(d1, d2, opts, diagnostics) {
            if is_direct(d1, d2, &m) {
                let matches = if flip { m.into_iter().map(invert_match).collect() } else { m };
                return Some((LinkResult { pair, kind: LinkKind::Direct, matches }, None));
            }
        }
    }
    let ab = transform_link(a, b, opts, diagnostics);
    let full_ab = ab.as_ref().map(|t| t.matches.len() == b.fields.len()).unwrap_or(false);
    let ba = if full_ab { None } else { transform_link(b, a, opts, diagnostics) };
    let pick = match (ab, ba) {
        (Some(x), Some(y)) => {
            if y.matches.len() > x.matches.len() {
                (y, Direction::BToA)
            } else {
                (x, Direction::AToB)
            }
        }
        (Some(x), None) => (x, Direction::AToB),
        (None, Some(y)) => (y, Direction::BToA),
        (None, None) => return None,
    };
    let (t, direction) = pick;
    Some((
        LinkResult {
            pair,
            kind: LinkKind::Transformed { direction, transforms: t.spec },
            matches: t.matches,
        },
        Some(t.applied),
    ))
}

/// Swaps the orientation of a direct match (D1 and D2 exchange roles).
fn invert_match(m: ColumnMatch) -> ColumnMatch {
    ColumnMatch {
        field_from: m.field_to,
        field_to: m.field_from,
        row_map: m.row_map.into_iter().map(|(x, y)| (y, x)).collect(),
        epsilon_used: m.epsilon_used,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkEdge {
    /// The view at the other end.
    pub view: String,
    pub transforms: Option<TransformSpec>,
    pub matched_fields: usize,
    /// Field pairs as (this view's field, peer's field).
    pub fields: Vec<(String, String)>,
    /// Row correspondences as (this view's row, peer's row).
    pub rows: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkNode {
    pub view: String,
    pub sources: Vec<LinkEdge>,
    pub targets: Vec<LinkEdge>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkGraph {
    pub nodes: Vec<LinkNode>,
    pub external_tables: Vec<String>,
    pub links: Vec<LinkResult>,
    pub diagnostics: Vec<Diagnostic>,
}

impl LinkGraph {
    pub fn node(&self, view: &str) -> Option<&LinkNode> {
        self.nodes.iter().find(|n| n.view == view)
    }

    /// Compact form: nodes with their source and target views.
    pub fn to_json(&self) -> serde_json::Value {
        let edge = |e: &LinkEdge, key: &str| {
            serde_json::json!({
                key: e.view,
                "transforms": e.transforms.as_ref().map(|t| t.describe()).unwrap_or_default(),
                "matchedFields": e.matched_fields,
                "fields": e.fields,
            })
        };
        serde_json::json!({
            "schema": crate::deconstruct::SCHEMA,
            "nodes": self.nodes.iter().map(|n| serde_json::json!({
                "viewId": n.view,
                "sources": n.sources.iter().map(|e| edge(e, "from")).collect::<Vec<_>>(),
                "targets": n.targets.iter().map(|e| edge(e, "to")).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "externalTables": self.external_tables,
            "links": self.links.iter().map(|l| serde_json::json!({
                "pair": [l.pair.0, l.pair.1],
                "kind": match &l.kind { LinkKind::Direct => "direct", LinkKind::Transformed { .. } => "transformed" },
                "direction": match &l.kind { LinkKind::Transformed { direction: Direction::AToB, .. } => Some("AtoB"), LinkKind::Transformed { .. } => Some("BtoA"), _ => None },
                "transforms": match &l.kind { LinkKind::Transformed { transforms, .. } => Some(transforms), _ => None },
                "matches": l.matches.iter().map(|m| serde_json::json!({
                    "fieldFrom": m.field_from, "fieldTo": m.field_to, "epsilonUsed": m.epsilon_used,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }
}

/// Links every pair (external tables first, then document order) and keeps,
/// per view, only the best transformed source.
pub fn build_link_graph(views: &[DataTable], external: &[DataTable], opts: &LinkOptions) -> LinkGraph {
    let mut graph = LinkGraph {
        external_tables: external.iter().map(|t| t.name.clone()).collect(),
        ..Default::default()
    };
    let all: Vec<&DataTable> = external.iter().chain(views.iter()).collect();
    for t in &all {
        graph.nodes.push(LinkNode { view: t.name.clone(), ..Default::default() });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            pairs.push((i, j));
        }
    }
    struct Candidate {
        source: usize,
        target: usize,
        result: usize,
        edge_s: LinkEdge,
        edge_t: LinkEdge,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, j) in pairs {
        let (a, b) = (all[i], all[j]);
        let Some((result, applied)) = link_pair(a, b, opts, &mut diagnostics) else { continue };
        let fields: Vec<(String, String)> = result.matches.iter().map(|m| (m.field_from.clone(), m.field_to.clone())).collect();
        let flipped: Vec<(String, String)> = fields.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        match &result.kind {
            LinkKind::Direct => {
                // row_map is (b row, a row)
                let rows_ab: Vec<(usize, usize)> = result.matches[0].row_map.iter().map(|(rb, ra)| (*ra, *rb)).collect();
                let rows_ba: Vec<(usize, usize)> = result.matches[0].row_map.clone();
                let n = result.matches.len();
                graph.links.push(result);
                graph.nodes[i].targets.push(LinkEdge {
                    view: b.name.clone(),
                    transforms: None,
                    matched_fields: n,
                    fields: flipped.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
                    rows: rows_ab,
                });
                graph.nodes[j].targets.push(LinkEdge {
                    view: a.name.clone(),
                    transforms: None,
                    matched_fields: n,
                    fields: flipped,
                    rows: rows_ba,
                });
            }
            LinkKind::Transformed { direction, transforms } => {
                let applied = applied.expect("transformed links carry their output");
                let (s, t) = match direction {
                    Direction::AToB => (i, j),
                    Direction::BToA => (j, i),
                };
                // row_map is (target row, derived row); provenance maps derived rows to source rows.
                let mut rows_st: Vec<(usize, usize)> = Vec::new();
                for (rt, rd) in &result.matches[0].row_map {
                    for rs in &applied.provenance[*rd] {
                        rows_st.push((*rs, *rt));
                    }
                }
                rows_st.sort_unstable();
                let n = result.matches.len();
                let spec = transforms.clone();
                graph.links.push(result);
                candidates.push(Candidate {
                    source: s,
                    target: t,
                    result: graph.links.len() - 1,
                    edge_s: LinkEdge {
                        view: all[t].name.clone(),
                        transforms: Some(spec.clone()),
                        matched_fields: n,
                        fields: flipped.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
                        rows: rows_st.clone(),
                    },
                    edge_t: LinkEdge {
                        view: all[s].name.clone(),
                        transforms: Some(spec),
                        matched_fields: n,
                        fields: flipped,
                        rows: rows_st.into_iter().map(|(x, y)| (y, x)).collect(),
                    },
                });
            }
        }
    }
    // Greedy dedup: per target view keep the source matching the most fields,
    // preferring external tables and then earlier views; drop sources that
    // match fewer fields than the view's best direct link.
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for t in 0..all.len() {
        let best_direct = graph.nodes[t].targets.iter().map(|e| e.matched_fields).max().unwrap_or(0);
        let best = candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.target == t && c.edge_t.matched_fields >= best_direct.max(1))
            .min_by_key(|(_, c)| (std::cmp::Reverse(c.edge_t.matched_fields), c.source >= external.len(), c.source));
        if let Some((k, _)) = best {
            keep.insert(k);
        }
    }
    let mut dropped: Vec<usize> = Vec::new();
    for (k, c) in candidates.into_iter().enumerate() {
        if keep.contains(&k) {
            graph.nodes[c.source].targets.push(c.edge_s);
            graph.nodes[c.target].sources.push(c.edge_t);
        } else {
            dropped.push(c.result);
            diagnostics.push(Diagnostic::new(
                "source-dropped",
                format!("{} → {} matches fewer fields than the kept link", all[c.source].name, all[c.target].name),
                Vec::new(),
            ));
        }
    }
    let mut idx = 0;
    graph.links.retain(|_| {
        let k = !dropped.contains(&idx);
        idx += 1;
        k
    });
    graph.diagnostics = diagnostics;
    graph
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "camelCase")]
pub enum PlanAction {
    UpdateRoot { view: String },
    MapRows { from: String, to: String },
    TransformRender { from: String, to: String, transforms: TransformSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataflowPlan {
    pub origin: String,
    pub root: String,
    /// Views from the origin up to the root, following source edges.
    pub lift: Vec<String>,
    pub actions: Vec<PlanAction>,
}

/// Follows source edges from `origin` to the root, then visits every view
/// reachable over target edges breadth-first.
pub fn dataflow_plan(graph: &LinkGraph, origin: &str) -> Result<DataflowPlan, LinkError> {
    let mut cur = graph.node(origin).ok_or_else(|| LinkError::UnknownView(origin.to_string()))?;
    let mut lift = vec![cur.view.clone()];
    let mut seen: BTreeSet<String> = BTreeSet::from([cur.view.clone()]);
    while let Some(src) = cur.sources.first() {
        if !seen.insert(src.view.clone()) {
            return Err(LinkError::CycleDetected(src.view.clone()));
        }
        cur = graph.node(&src.view).ok_or_else(|| LinkError::UnknownView(src.view.clone()))?;
        lift.push(cur.view.clone());
    }
    let root = cur.view.clone();
    let mut actions = vec![PlanAction::UpdateRoot { view: root.clone() }];
    let mut visited: BTreeSet<String> = BTreeSet::from([root.clone()]);
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        let node = graph.node(&v).expect("queued views exist");
        for e in &node.targets {
            if visited.contains(&e.view) {
                continue;
            }
            visited.insert(e.view.clone());
            actions.push(match &e.transforms {
                // a target edge with transforms means the peer aggregates this view
                Some(t) if graph.node(&e.view).map(|n| n.sources.iter().any(|s| s.view == v)).unwrap_or(false) => PlanAction::TransformRender {
                    from: v.clone(),
                    to: e.view.clone(),
                    transforms: t.clone(),
                },
                _ => PlanAction::MapRows { from: v.clone(), to: e.view.clone() },
            });
            queue.push_back(e.view.clone());
        }
    }
    Ok(DataflowPlan { origin: origin.to_string(), root, lift, actions })
}

/// Per-view outcome of propagating a selection.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViewUpdate {
    pub selected: BTreeSet<usize>,
    /// Aggregated views: per row, the aggregate over selected source rows
    /// (`None` where the row's group has no selected rows).
    pub overlay: Option<Vec<Option<f64>>>,
}

fn edge_between<'a>(graph: &'a LinkGraph, from: &str, to: &str, sources: bool) -> Option<&'a LinkEdge> {
    let n = graph.node(from)?;
    let list = if sources { &n.sources } else { &n.targets };
    list.iter().find(|e| e.view == to)
}

/// Pushes a selection made on the plan's origin through the graph.
pub fn propagate(
    graph: &LinkGraph,
    plan: &DataflowPlan,
    tables: &BTreeMap<String, DataTable>,
    origin_rows: &BTreeSet<usize>,
) -> Result<BTreeMap<String, ViewUpdate>, LinkError> {
    let table = |v: &str| tables.get(v).ok_or_else(|| LinkError::UnknownView(v.to_string()));
    // lift the selection to the root through source edges
    let mut sel = origin_rows.clone();
    for w in plan.lift.windows(2) {
        let e = edge_between(graph, &w[0], &w[1], true).ok_or_else(|| LinkError::UnknownView(w[1].clone()))?;
        let src = table(&w[1])?;
        sel = e.rows.iter().filter(|(mine, _)| sel.contains(mine)).map(|(_, theirs)| *theirs).filter(|r| src.is_live(*r)).collect();
    }
    let mut out: BTreeMap<String, ViewUpdate> = BTreeMap::new();
    out.insert(plan.root.clone(), ViewUpdate { selected: sel, overlay: None });
    for action in &plan.actions {
        match action {
            PlanAction::UpdateRoot { .. } => {}
            PlanAction::MapRows { from, to } => {
                let e = edge_between(graph, from, to, false).ok_or_else(|| LinkError::UnknownView(to.clone()))?;
                let src_sel = out.get(from).map(|u| u.selected.clone()).unwrap_or_default();
                let dst = table(to)?;
                let selected = e.rows.iter().filter(|(mine, _)| src_sel.contains(mine)).map(|(_, theirs)| *theirs).filter(|r| dst.is_live(*r)).collect();
                out.insert(to.clone(), ViewUpdate { selected, overlay: None });
            }
            PlanAction::TransformRender { from, to, transforms } => {
                let e = edge_between(graph, from, to, false).ok_or_else(|| LinkError::UnknownView(to.clone()))?;
                let src = table(from)?;
                let dst = table(to)?;
                let src_sel = out.get(from).map(|u| u.selected.clone()).unwrap_or_default();
                let agg = transforms.aggregate();
                let agg_col = agg.and_then(|a| a.aggs.first()).and_then(|a| if a.op == AggOp::Count { None } else { src.field_index(&a.field) });
                let op = agg.and_then(|a| a.aggs.first()).map(|a| a.op).unwrap_or(AggOp::Count);
                let mut per_row: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
                for (s, t) in &e.rows {
                    if src_sel.contains(s) && src.is_live(*s) {
                        let x = match agg_col {
                            Some(c) => src.value(*s, c).as_f64(),
                            None => Some(0.0),
                        };
                        let entry = per_row.entry(*t).or_default();
                        if let Some(x) = x {
                            entry.push(x);
                        }
                    }
                }
                let overlay: Vec<Option<f64>> = (0..dst.row_count())
                    .map(|r| per_row.get(&r).and_then(|xs| op.apply(xs)))
                    .collect();
                let selected = per_row.keys().copied().filter(|r| dst.is_live(*r)).collect();
                out.insert(to.clone(), ViewUpdate { selected, overlay: Some(overlay) });
            }
        }
    }
    Ok(out)
}
