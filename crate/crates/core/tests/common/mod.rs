//! Fixture discovery and sidecar comparison shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chartseam::data::{infer_table, DataTable};
use chartseam::deconstruct::{deconstruct, ChartMetadata};
use chartseam::link::LinkGraph;
use chartseam::svg::{parse_svg, SvgDocument};
use serde_json::Value as Json;

pub fn fixture_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every SVG with a sidecar, sorted.
pub fn fixtures() -> Vec<PathBuf> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(&path, out);
            } else if path.extension().is_some_and(|x| x == "svg") && path.with_extension("json").exists() {
                out.push(path);
            }
        }
    }
    let mut out = Vec::new();
    walk(&fixture_root(), &mut out);
    out.sort();
    out
}

pub fn name(path: &Path) -> String {
    path.strip_prefix(fixture_root()).unwrap_or(path).display().to_string()
}

pub struct Loaded {
    pub sidecar: Json,
    pub doc: SvgDocument,
    pub meta: ChartMetadata,
    pub table: DataTable,
    /// Parse, deconstruction, and table inference.
    pub elapsed: Duration,
}

pub fn load(path: &Path) -> Loaded {
    let sidecar: Json = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json")).unwrap()).unwrap();
    let bytes = std::fs::read(path).unwrap();
    let start = Instant::now();
    let doc = parse_svg(&bytes).unwrap();
    let meta = deconstruct(&doc);
    let table = infer_table(&doc, &meta, "chart");
    let elapsed = start.elapsed();
    Loaded { sidecar, doc, meta, table, elapsed }
}

fn strings(v: &Json) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

/// Axis count and tick labels, legend entries, and data-mark count against the sidecar.
pub fn structure_problems(l: &Loaded) -> Vec<String> {
    let side = &l.sidecar;
    let meta = &l.meta;
    let mut bad = Vec::new();
    let axes = side["axes"].as_array().unwrap();
    if axes.len() != meta.axes.len() {
        bad.push(format!("axis count {} != {}", meta.axes.len(), axes.len()));
    }
    for ax in axes {
        let o = ax["orientation"].as_str().unwrap();
        let Some(a) = meta.axes.iter().find(|a| format!("{:?}", a.orientation).to_lowercase() == o) else {
            bad.push(format!("missing {o} axis"));
            continue;
        };
        let got: Vec<String> = a.ticks.iter().map(|t| t.label.clone()).collect();
        if ax["title"].as_str() != a.title.as_deref() {
            bad.push(format!("{o} axis title {:?} != {}", a.title, ax["title"]));
        }
        if ax["labels"].is_null() {
            continue;
        }
        let want = strings(&ax["labels"]);
        // y ticks are listed by ascending pixel, i.e. top to bottom
        let mut rev = want.clone();
        rev.reverse();
        if got != want && !(o == "y" && got == rev) {
            bad.push(format!("{o} tick labels {got:?} != {want:?}"));
        }
    }
    let legends = side["legends"].as_array().unwrap();
    if legends.len() != meta.legends.len() {
        bad.push(format!("legend count {} != {}", meta.legends.len(), legends.len()));
    }
    for (want, got) in legends.iter().zip(&meta.legends) {
        let labels: Vec<String> = got.entries.iter().map(|e| e.label.clone()).collect();
        if labels != strings(&want["labels"]) {
            bad.push(format!("legend entries {labels:?} != {}", want["labels"]));
        }
        if want["title"].as_str() != got.title.as_deref() {
            bad.push(format!("legend title {:?} != {}", got.title, want["title"]));
        }
        if serde_json::to_value(got.legend_type).unwrap() != want["type"] {
            bad.push(format!("legend type {:?} != {}", got.legend_type, want["type"]));
        }
    }
    if side["title"].as_str() != meta.title.as_deref() {
        bad.push(format!("title {:?} != {}", meta.title, side["title"]));
    }
    if serde_json::to_value(meta.orientation).unwrap() != side["orientation"] {
        bad.push(format!("orientation {:?} != {}", meta.orientation, side["orientation"]));
    }
    let stacks = side["stacking"].as_array().unwrap().len();
    if stacks != meta.stacking.len() {
        bad.push(format!("stack groups {} != {stacks}", meta.stacking.len()));
    }
    if let Some(n) = side["markCount"].as_u64() {
        if n as usize != l.doc.marks.len() {
            bad.push(format!("mark count {} != {n}", l.doc.marks.len()));
        }
    }
    let marks = side["dataMarks"].as_u64().unwrap() as usize;
    if marks != meta.marks.len() {
        bad.push(format!("data marks {} != {marks}", meta.marks.len()));
    }
    bad
}

/// Rows matched one-to-one within 1% of each numeric field's range, text exact.
pub struct RoundTrip {
    pub matched: usize,
    pub total: usize,
    pub problems: Vec<String>,
}

impl RoundTrip {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.matched as f64 / self.total as f64
        }
    }
}

pub fn round_trip(l: &Loaded) -> RoundTrip {
    let side = &l.sidecar;
    let t = &l.table;
    let mut problems = Vec::new();
    let names: Vec<String> = t.fields.iter().map(|f| f.name.clone()).collect();
    let want_names: Vec<String> = side["fields"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap().to_string()).collect();
    let rows = side["rows"].as_array().unwrap();
    if names != want_names {
        problems.push(format!("fields {names:?} != {want_names:?}"));
        return RoundTrip { matched: 0, total: rows.len(), problems };
    }
    let types: Vec<String> = t.fields.iter().map(|f| format!("{:?}", f.field_type).to_lowercase()).collect();
    let want_types: Vec<String> = side["fields"].as_array().unwrap().iter().map(|f| f["type"].as_str().unwrap().to_string()).collect();
    if types != want_types {
        problems.push(format!("types {types:?} != {want_types:?}"));
    }
    let ncol = names.len();
    let ranges: Vec<f64> = (0..ncol)
        .map(|c| {
            let nums: Vec<f64> = rows.iter().filter_map(|r| r[c].as_f64()).collect();
            let hi = nums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = nums.iter().copied().fold(f64::INFINITY, f64::min);
            if nums.is_empty() { 0.0 } else { hi - lo }
        })
        .collect();
    let got: Vec<Vec<String>> = (0..t.row_count()).map(|r| (0..ncol).map(|c| t.value(r, c).render()).collect()).collect();
    let fits = |want: &Json, g: &[String]| {
        (0..ncol).all(|c| match &want[c] {
            Json::Number(n) => g[c].parse::<f64>().map(|v| (v - n.as_f64().unwrap()).abs() <= 0.01 * ranges[c] + 1e-9).unwrap_or(false),
            Json::String(s) => g[c] == *s,
            Json::Null => g[c].is_empty(),
            _ => false,
        })
    };
    let adj: Vec<Vec<usize>> = rows.iter().map(|r| (0..got.len()).filter(|i| fits(r, &got[*i])).collect()).collect();
    let matched = max_matching(&adj, got.len());
    if t.row_count() != rows.len() {
        problems.push(format!("row count {} != {}", t.row_count(), rows.len()));
    }
    RoundTrip { matched, total: rows.len(), problems }
}

/// Size of a maximum bipartite matching (augmenting paths).
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> usize {
    fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, owner, seen)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    (0..adj.len()).filter(|u| augment(*u, adj, &mut owner, &mut vec![false; right])).count()
}

/// Compares views, targets, and source edges (with transforms and matched
/// field counts) against the expected graph.
pub fn graph_diff(g: &LinkGraph, expected: &Json) -> Vec<String> {
    let mut problems = Vec::new();
    let nodes = expected["nodes"].as_array().unwrap();
    if nodes.len() != g.nodes.len() {
        problems.push(format!("node count {} != {}", g.nodes.len(), nodes.len()));
    }
    for en in nodes {
        let view = en["view"].as_str().unwrap();
        let Some(n) = g.node(view) else {
            problems.push(format!("missing node {view}"));
            continue;
        };
        let mut want_t: Vec<&str> = en["targets"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        let mut got_t: Vec<&str> = n.targets.iter().map(|t| t.view.as_str()).collect();
        want_t.sort();
        got_t.sort();
        if want_t != got_t {
            problems.push(format!("{view} targets {got_t:?} != {want_t:?}"));
        }
        let want_s: Vec<(String, Vec<String>, u64)> = en["sources"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| {
                (
                    s["from"].as_str().unwrap().to_string(),
                    s["transforms"].as_array().unwrap().iter().map(|t| t.as_str().unwrap().to_string()).collect(),
                    s["matchedFields"].as_u64().unwrap(),
                )
            })
            .collect();
        let got_s: Vec<(String, Vec<String>, u64)> = n
            .sources
            .iter()
            .map(|s| (s.view.clone(), s.transforms.as_ref().map(|t| t.describe()).unwrap_or_default(), s.matched_fields as u64))
            .collect();
        if want_s != got_s {
            problems.push(format!("{view} sources {got_s:?} != {want_s:?}"));
        }
    }
    if let Some(direct) = expected["directMatchedFields"].as_object() {
        let ext = g.node("external").unwrap();
        for (view, k) in direct {
            let got = ext.targets.iter().find(|t| &t.view == view && t.transforms.is_none()).map(|t| t.matched_fields as u64);
            if got != k.as_u64() {
                problems.push(format!("external→{view} direct fields {got:?} != {k}"));
            }
        }
    }
    problems
}
