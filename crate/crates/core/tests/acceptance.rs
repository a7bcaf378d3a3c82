//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chartseam::data::{DataTable, Field};
use chartseam::deconstruct::{AxisOrientation, ChartOrientation};
use chartseam::interact::*;
use chartseam::link::{apply_transform, build_link_graph, parse_bin_label, transform_link, LinkOptions, TransformSpec, TransformStep};
use chartseam::query::*;
use chartseam::session::{load_manifest, ChartView, SessionManifest};
use chartseam::svg::{parse_svg, Edit, MarkId};
use chartseam::value::{FieldType, Value, DAY_MS};
use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value as Json;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("deconstruction accuracy", deconstruction_accuracy),
        ("data round-trip", data_round_trip),
        ("linking recovery", linking_recovery),
        ("transform-search oracle", transform_search_oracle),
        ("propagation oracle", propagation_oracle),
        ("interaction materialization", interaction_materialization),
        ("query brute-force equivalence", query_brute_force),
        ("taxonomy dispatch coverage", taxonomy_coverage),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn fixture(rel: &str) -> PathBuf {
    fixture_root().join(rel)
}

fn single(rel: &str) -> Session {
    let path = fixture(rel);
    let id = path.file_stem().unwrap().to_string_lossy().into_owned();
    Session::new(vec![ChartView::load(&id, &path).unwrap()], None, SessionOptions::default())
}

fn suite(name: &str) -> (Session, SessionManifest) {
    let m = SessionManifest::load(&fixture(&format!("suites/{name}/manifest.json"))).unwrap();
    let (views, external) = load_manifest(&m).unwrap();
    let s = Session::new(views, external, SessionOptions { link: m.link_options(), ..Default::default() });
    (s, m)
}

fn deconstruction_accuracy() -> Outcome {
    let paths = fixtures();
    let mut types = BTreeSet::new();
    let mut slowest = Duration::ZERO;
    let mut problems = Vec::new();
    for p in &paths {
        let l = load(p);
        types.insert(l.sidecar["chartType"].as_str().unwrap_or("?").to_string());
        slowest = slowest.max(l.elapsed);
        if l.elapsed >= Duration::from_secs(1) {
            problems.push(format!("{}: took {:?}", name(p), l.elapsed));
        }
        problems.extend(structure_problems(&l).into_iter().map(|x| format!("{}: {x}", name(p))));
    }
    ensure!(paths.len() >= 12 && types.len() >= 4, "only {} fixtures across {} chart types", paths.len(), types.len());
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    Ok(format!("{} fixtures, {} chart types, slowest {:.1?}", paths.len(), types.len(), slowest))
}

fn data_round_trip() -> Outcome {
    let mut worst = (1.0f64, String::new());
    let mut problems = Vec::new();
    let paths = fixtures();
    for p in &paths {
        let rt = round_trip(&load(p));
        problems.extend(rt.problems.iter().map(|x| format!("{}: {x}", name(p))));
        if rt.fraction() < 0.95 {
            problems.push(format!("{}: {}/{} rows matched", name(p), rt.matched, rt.total));
        }
        if rt.fraction() < worst.0 {
            worst = (rt.fraction(), format!("{} {}/{}", name(p), rt.matched, rt.total));
        }
    }
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    Ok(format!("{} fixtures within 1% of range, worst {}", paths.len(), if worst.1.is_empty() { "100%".into() } else { worst.1 }))
}

fn linking_recovery() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for name in ["weather-trio", "crossfilter-trio"] {
        let dir = fixture(&format!("suites/{name}"));
        let m = SessionManifest::load(&dir.join("manifest.json")).map_err(|e| e.to_string())?;
        let (views, external) = load_manifest(&m).map_err(|e| e.to_string())?;
        let tables: Vec<DataTable> = views.iter().map(|v| v.table.clone()).collect();
        let ext: Vec<DataTable> = external.into_iter().collect();
        let g = build_link_graph(&tables, &ext, &m.link_options());
        let expected: Json = serde_json::from_str(&std::fs::read_to_string(dir.join("expected_graph.json")).unwrap()).unwrap();
        problems.extend(graph_diff(&g, &expected).into_iter().map(|p| format!("{name}: {p}")));
        let edges: usize = g.nodes.iter().map(|n| n.sources.len()).sum();
        let want: usize = expected["nodes"].as_array().unwrap().iter().map(|n| n["sources"].as_array().unwrap().len()).sum();
        if edges != want {
            problems.push(format!("{name}: {edges} source edges, expected {want}"));
        }
    }
    let elapsed = start.elapsed();
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("both suites match their expected graphs in {elapsed:.1?}"))
}

const CATS: [&str; 4] = ["north", "south", "east", "west"];
/// 2021-01-01.
const EPOCH_DAYS: i64 = 18_628;

fn random_base(rng: &mut StdRng) -> DataTable {
    let n = rng.gen_range(5..=50);
    let cats = rng.gen_range(2..=4);
    let mut t = DataTable::new(
        "base",
        vec![
            Field::new("k", FieldType::Text),
            Field::new("v0", FieldType::Number),
            Field::new("v1", FieldType::Number),
            Field::new("d", FieldType::Date),
        ],
    );
    for _ in 0..n {
        t.push_row(
            vec![
                Value::Text(CATS[rng.gen_range(0..cats)].into()),
                Value::Number(rng.gen_range(-400..400) as f64 / 4.0),
                Value::Number(rng.gen_range(0..1000) as f64),
                Value::Date((EPOCH_DAYS + rng.gen_range(0..730)) * DAY_MS),
            ],
            None,
        )
        .unwrap();
    }
    t
}

fn random_spec(rng: &mut StdRng, t: &DataTable) -> TransformSpec {
    let mut steps = Vec::new();
    let key = match rng.gen_range(0..3) {
        0 => "k".to_string(),
        1 => {
            let xs: Vec<f64> = t.column("v0").unwrap().iter().filter_map(|v| v.as_f64()).collect();
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min).floor();
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil().max(lo + 1.0);
            let bins = rng.gen_range(2..=5);
            let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
            steps.push(TransformStep::Derive { field: "v0".into(), spec: DeriveSpec::NumericBin { edges } });
            "bin_v0".to_string()
        }
        _ => {
            let parts = [DatePart::Year, DatePart::Month, DatePart::MonthOfYear, DatePart::DayOfWeek];
            let part = parts[rng.gen_range(0..parts.len())];
            let spec = DeriveSpec::DateFormat { part };
            let name = spec.output_name("d");
            steps.push(TransformStep::Derive { field: "d".into(), spec });
            name
        }
    };
    let op = AggOp::ALL[rng.gen_range(0..AggOp::ALL.len())];
    let agg = if op == AggOp::Count { Aggregate::count() } else { Aggregate::new(if rng.gen() { "v0" } else { "v1" }, op) };
    steps.push(TransformStep::Aggregate { spec: AggregateSpec { groupby: vec![key], aggs: vec![agg] } });
    TransformSpec { steps }
}

fn row_multiset(t: &DataTable, fields: &[usize]) -> Vec<String> {
    let mut rows: Vec<String> = t.live_rows().iter().map(|r| format!("{:?}", fields.iter().map(|c| t.value(*r, *c)).collect::<Vec<_>>())).collect();
    rows.sort();
    rows
}

fn transform_search_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let opts = LinkOptions::default();
    let mut failures = Vec::new();
    let mut tables = 0;
    let mut derived = 0;
    while tables < 100 {
        let base = random_base(&mut rng);
        let spec = random_spec(&mut rng, &base);
        let mut known = apply_transform(&base, &spec).map_err(|e| e.to_string())?.table;
        // a null aggregate (stdev of one row) has no mark to recover it from
        if known.columns.iter().flatten().any(Value::is_null) || known.row_count() < 2 {
            continue;
        }
        known.name = "known".into();
        tables += 1;
        derived += usize::from(spec.steps.len() > 1);
        let Some(found) = transform_link(&base, &known, &opts, &mut Vec::new()) else {
            failures.push(format!("table {tables}: no transform for {:?}", spec.describe()));
            continue;
        };
        let cols: Option<Vec<usize>> = known
            .fields
            .iter()
            .map(|f| found.matches.iter().find(|m| m.field_to == f.name).and_then(|m| found.applied.table.field_index(&m.field_from)))
            .collect();
        let Some(cols) = cols else {
            failures.push(format!("table {tables}: {:?} covers {} of {} fields", found.spec.describe(), found.matches.len(), known.fields.len()));
            continue;
        };
        let all: Vec<usize> = (0..known.fields.len()).collect();
        if row_multiset(&found.applied.table, &cols) != row_multiset(&known, &all) {
            failures.push(format!("table {tables}: {:?} recovered as {:?}", spec.describe(), found.spec.describe()));
        }
    }
    ensure!(failures.is_empty(), "{} failures: {}", failures.len(), failures.join("; "));
    Ok(format!("{tables} tables ({derived} with a derive step) recovered exactly"))
}

/// Sample standard deviation and the usual summaries, written out longhand.
fn oracle_agg(op: AggOp, xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    match op {
        AggOp::Count => Some(n as f64),
        _ if n == 0 => None,
        AggOp::Sum => Some(xs.iter().fold(0.0, |a, b| a + b)),
        AggOp::Mean => Some(xs.iter().fold(0.0, |a, b| a + b) / n as f64),
        AggOp::Min => xs.iter().copied().reduce(f64::min),
        AggOp::Max => xs.iter().copied().reduce(f64::max),
        AggOp::Median => {
            let mut s = xs.to_vec();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Some(if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 })
        }
        AggOp::Stdev if n < 2 => None,
        AggOp::Stdev => {
            let m = xs.iter().sum::<f64>() / n as f64;
            Some((xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64).sqrt())
        }
    }
}

fn propagation_oracle() -> Outcome {
    let (base, _) = suite("crossfilter-trio");
    let ids: Vec<String> = base.views.iter().map(|v| v.id().to_string()).collect();
    let mut checked = 0;
    let mut problems = Vec::new();
    for origin in &ids {
        let marks = base.view(origin).unwrap().chart.meta.marks.clone();
        for bin in marks {
            let mut s = base.clone();
            s.apply(&InteractionEvent::new(origin, Target::Mark { id: bin }, EventType::Select)).map_err(|e| e.to_string())?;
            let ext = s.external.as_ref().unwrap();
            let picked: Vec<usize> = ext.selection.clone().unwrap_or_default().into_iter().collect();
            for v in ids.iter().filter(|v| *v != origin) {
                let view = s.view(v).unwrap();
                let spec = s.graph.node(v).unwrap().sources[0].transforms.clone().unwrap();
                let Some(TransformStep::Derive { field, .. }) = spec.steps.first() else {
                    return Err(format!("{v}: source transform has no derive step"));
                };
                let agg = spec.aggregate().unwrap().aggs[0].clone();
                let overlay = view.overlay.clone().ok_or(format!("{v}: no overlay after brushing {origin}"))?;
                let t = &view.chart.table;
                let bins: Vec<(f64, f64)> = (0..t.row_count()).map(|r| parse_bin_label(&t.value(r, 0).render()).unwrap()).collect();
                let top = bins.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
                let fx = ext.field_index(field).unwrap();
                let ax = ext.field_index(&agg.field);
                for (r, (lo, hi)) in bins.iter().enumerate() {
                    let xs: Vec<f64> = picked
                        .iter()
                        .filter(|row| {
                            let x = ext.value(**row, fx).as_f64().unwrap();
                            *lo <= x && (x < *hi || (x == *hi && *hi == top))
                        })
                        .map(|row| ax.map(|a| ext.value(*row, a).as_f64().unwrap()).unwrap_or(0.0))
                        .collect();
                    let want = oracle_agg(agg.op, &xs);
                    let got = overlay[r];
                    let ok = match (got, want) {
                        _ if xs.is_empty() => got.unwrap_or(0.0) == 0.0,
                        (Some(g), Some(w)) if matches!(agg.op, AggOp::Count | AggOp::Sum) => g == w,
                        (Some(g), Some(w)) => (g - w).abs() <= 1e-9 * w.abs().max(f64::MIN_POSITIVE),
                        (g, w) => g == w,
                    };
                    checked += 1;
                    if !ok {
                        problems.push(format!("{origin} bin {} → {v} row {r} ({}): {got:?} vs {want:?}", bin.0, agg.op.name()));
                    }
                }
            }
        }
    }
    ensure!(problems.is_empty(), "{}", problems.join("; "));
    Ok(format!("{checked} re-aggregated bins match"))
}

fn opacity_dimmed(edits: &[Edit]) -> BTreeSet<MarkId> {
    edits
        .iter()
        .filter_map(|e| match e {
            Edit::SetAttr { mark, name, .. } if name == "opacity" || name == "style" => Some(*mark),
            _ => None,
        })
        .collect()
}

fn interaction_materialization() -> Outcome {
    // selection opacity count
    for rel in ["d3/bar/barchart_basic.svg", "d3/scatter/scatter_basic.svg", "vega/groupedBar/grouped_bar.svg"] {
        let mut s = single(rel);
        let v = s.views[0].id().to_string();
        let marks = s.views[0].chart.meta.marks.clone();
        for (i, m) in marks.iter().step_by(3).enumerate() {
            let mut e = InteractionEvent::new(&v, Target::Mark { id: *m }, EventType::Select);
            e.meta = i > 0;
            s.apply(&e).map_err(|e| e.to_string())?;
        }
        let t = &s.views[0].chart.table;
        let live = marks.iter().filter(|m| !t.rows_of_mark(**m).is_empty()).count();
        let selected = t.marks_of_rows(t.selection.as_ref().unwrap()).len();
        let dimmed = opacity_dimmed(&s.materialize(&v).map_err(|e| e.to_string())?).len();
        ensure!(dimmed == live - selected, "{rel}: {dimmed} dimmed, {live} live, {selected} selected");
    }
    // sort permutation against argsort
    for rel in ["ggplot/bar/column_chart.svg", "vega/bar/horizontal_bar.svg", "d3/bar/barchart_basic.svg"] {
        for dir in [Direction::Asc, Direction::Desc] {
            let mut s = single(rel);
            let v = s.views[0].id().to_string();
            let chart = s.views[0].chart.clone();
            let bars = chart.meta.marks.clone();
            let horizontal = chart.meta.orientation == ChartOrientation::Horizontal;
            let along = |bytes: &[u8]| -> Vec<f64> {
                let doc = parse_svg(bytes).unwrap();
                bars.iter().map(|m| doc.marks[m.0].bbox).map(|b| if horizontal { b.center_y() } else { b.center_x() }).collect()
            };
            let mut slots = along(&s.render(&v).unwrap());
            slots.sort_by(f64::total_cmp);
            let mut e = InteractionEvent::new(&v, Target::Mark { id: bars[0] }, EventType::Sort);
            e.params.direction = Some(dir);
            s.apply(&e).map_err(|e| e.to_string())?;
            let got = along(&s.render(&v).unwrap());
            let value_field = if horizontal { 0 } else { 1 };
            let t = &chart.table;
            let val = |i: usize| t.value(t.rows_of_mark(bars[i])[0], value_field).as_f64().unwrap();
            let mut argsort: Vec<usize> = (0..bars.len()).collect();
            argsort.sort_by(|a, b| if dir == Direction::Asc { val(*a).total_cmp(&val(*b)) } else { val(*b).total_cmp(&val(*a)) });
            for (rank, bar) in argsort.iter().enumerate() {
                ensure!((got[*bar] - slots[rank]).abs() < 1e-6, "{rel} {dir:?}: bar {bar} at {} not slot {rank}", got[*bar]);
            }
        }
    }
    // zoom k=2 then reset
    for rel in ["d3/scatter/scatter_basic.svg", "ggplot/line/multiline_legend.svg", "d3/bar/barchart_basic.svg", "matplotlib/area/area_fill.svg"] {
        let mut s = single(rel);
        let v = s.views[0].id().to_string();
        let initial = s.render(&v).unwrap();
        let c = s.views[0].chart.meta.clip;
        let mut dbl = InteractionEvent::new(&v, Target::Background, EventType::Navigate);
        dbl.input = Some(Input::DoubleClick);
        dbl.params.point = Some([c.center_x(), c.center_y()]);
        s.apply(&dbl).map_err(|e| e.to_string())?;
        ensure!(s.views[0].navigation.x.k == 2.0 && s.views[0].navigation.y.k == 2.0, "{rel}: zoom factor not 2");
        let zoomed = String::from_utf8(s.render(&v).unwrap()).unwrap();
        ensure!(zoomed.contains("vector-effect=\"non-scaling-stroke\""), "{rel}: zoomed output lacks non-scaling-stroke");
        s.apply(&dbl).map_err(|e| e.to_string())?;
        ensure!(s.render(&v).unwrap() == initial, "{rel}: reset is not byte-exact");
    }
    // filter, then brush every view
    let (mut s, _) = suite("weather-trio");
    let scatter = s.views.iter().find(|v| !v.chart.meta.legends.is_empty()).unwrap().id().to_string();
    let label = s.view(&scatter).unwrap().chart.meta.legends[0].entries[0].label.clone();
    let mut f = InteractionEvent::new(&scatter, Target::Legend { label, legend: 0 }, EventType::Filter);
    f.params.filter = Some(FilterMode::Exclusive);
    s.apply(&f).map_err(|e| e.to_string())?;
    let dead: BTreeSet<usize> = {
        let ext = s.external.as_ref().unwrap();
        (0..ext.row_count()).filter(|r| !ext.is_live(*r)).collect()
    };
    ensure!(!dead.is_empty(), "filter removed no external rows");
    let ids: Vec<String> = s.views.iter().map(|v| v.id().to_string()).collect();
    for origin in &ids {
        let c = s.view(origin).unwrap().chart.meta.clip;
        let mut b = InteractionEvent::new(origin, Target::Background, EventType::Brush);
        b.mode = Some(Mode::Brush);
        b.params.rect = Some([c.left - 5.0, c.top - 5.0, c.right + 5.0, c.bottom + 5.0]);
        s.apply(&b).map_err(|e| e.to_string())?;
        let ext = s.external.as_ref().unwrap();
        ensure!(ext.selection.as_ref().is_some_and(|sel| sel.is_disjoint(&dead)), "brushing {origin} selected filtered external rows");
        for t in s.views.iter().map(|v| &v.chart.table) {
            if let Some(sel) = &t.selection {
                ensure!(sel.iter().all(|r| t.is_live(*r)), "brushing {origin} selected a filtered row in {}", t.name);
            }
        }
    }
    Ok("opacity count, argsort, zoom/reset, non-scaling-stroke, filter-then-select".into())
}

#[derive(Clone, Copy, PartialEq)]
enum Col {
    N,
    C,
    D,
}

fn grid_value(col: Col, x: u32) -> Value {
    match col {
        Col::N if x == 4 => Value::Null,
        Col::N => Value::Number(x as f64 - 1.0),
        Col::C => Value::Text(["a", "b", "c"][x as usize % 3].into()),
        Col::D => Value::Date((x as i64 % 4) * DAY_MS),
    }
}

/// Numeric reading of a cell for the reference comparisons.
fn key(v: &Value) -> Option<f64> {
    match v {
        Value::Number(x) => Some(*x),
        Value::Date(ms) => Some(*ms as f64),
        _ => None,
    }
}

fn query_brute_force() -> Outcome {
    let layouts: [&[Col]; 7] = [&[Col::N], &[Col::C], &[Col::D], &[Col::N, Col::C], &[Col::N, Col::D], &[Col::C, Col::D], &[Col::N, Col::C, Col::D]];
    let names = |c: Col| match c {
        Col::N => "n",
        Col::C => "c",
        Col::D => "d",
    };
    let mut rng = StdRng::seed_from_u64(11);
    let mut cases = 0;
    let mut checks = 0usize;
    for rows in 0..=8usize {
        for layout in layouts {
            for _ in 0..20 {
                cases += 1;
                let fields: Vec<Field> = layout
                    .iter()
                    .map(|c| Field::new(names(*c), match c { Col::N => FieldType::Number, Col::C => FieldType::Text, Col::D => FieldType::Date }))
                    .collect();
                let mut t = DataTable::new("grid", fields);
                for _ in 0..rows {
                    t.push_row(layout.iter().map(|c| grid_value(*c, rng.gen_range(0..5))).collect(), None).unwrap();
                }
                let live: Vec<bool> = (0..rows).map(|_| rng.gen_bool(0.8)).collect();
                t.filter_mask = live.clone();
                let live_rows: Vec<usize> = (0..rows).filter(|r| live[*r]).collect();
                for (ci, col) in layout.iter().enumerate() {
                    let name = names(*col);
                    // EQ / LE / GE over the field's whole domain
                    for x in 0..5 {
                        let target = grid_value(*col, x);
                        if target.is_null() {
                            continue;
                        }
                        let mut preds = vec![(Predicate::eq(name, target.clone()), 0)];
                        if *col != Col::C {
                            preds.push((Predicate::le(name, target.clone()), 1));
                            preds.push((Predicate::ge(name, target.clone()), 2));
                        }
                        for (p, op) in preds {
                            let got = select(&t, &p).map_err(|e| e.to_string())?;
                            let want: BTreeSet<usize> = live_rows
                                .iter()
                                .copied()
                                .filter(|r| {
                                    let v = t.value(*r, ci);
                                    match (op, key(v), key(&target)) {
                                        (0, _, _) => *v == target,
                                        (1, Some(a), Some(b)) => a <= b,
                                        (2, Some(a), Some(b)) => a >= b,
                                        _ => false,
                                    }
                                })
                                .collect();
                            checks += 1;
                            ensure!(got == want, "select {p} on {rows}-row table: {got:?} vs {want:?}");
                        }
                    }
                    // ORDERBY: stable insertion sort, nulls last
                    if *col != Col::C {
                        for dir in [Direction::Asc, Direction::Desc] {
                            let got = order_by(&t, name, dir).map_err(|e| e.to_string())?;
                            let mut want: Vec<usize> = Vec::new();
                            for &r in &live_rows {
                                let before = |j: &usize| match (key(t.value(*j, ci)), key(t.value(r, ci))) {
                                    (None, Some(_)) => true,
                                    (Some(a), Some(b)) => if dir == Direction::Asc { a > b } else { a < b },
                                    _ => false,
                                };
                                let pos = want.iter().position(before).unwrap_or(want.len());
                                want.insert(pos, r);
                            }
                            checks += 1;
                            ensure!(got == want, "order_by {name} {dir:?}: {got:?} vs {want:?}");
                        }
                    }
                    // GROUP BY this field, aggregate every other numeric field
                    let mut aggs = vec![Aggregate::count()];
                    if *col != Col::N && layout.contains(&Col::N) {
                        aggs.extend(AggOp::ALL.iter().filter(|op| **op != AggOp::Count).map(|op| Aggregate::new("n", *op)));
                    }
                    let spec = AggregateSpec { groupby: vec![name.into()], aggs: aggs.clone() };
                    let g = group_aggregate(&t, &spec).map_err(|e| e.to_string())?;
                    let mut groups: Vec<(Value, Vec<usize>)> = Vec::new();
                    for &r in &live_rows {
                        let v = t.value(r, ci).clone();
                        match groups.iter_mut().find(|(k, _)| *k == v) {
                            Some((_, members)) => members.push(r),
                            None => groups.push((v, vec![r])),
                        }
                    }
                    checks += 1;
                    ensure!(g.table.row_count() == groups.len(), "groupby {name}: {} groups vs {}", g.table.row_count(), groups.len());
                    let ni = layout.iter().position(|c| *c == Col::N);
                    for (gi, (k, members)) in groups.iter().enumerate() {
                        ensure!(g.table.value(gi, 0) == k && &g.provenance[gi] == members, "groupby {name}: group {gi} differs");
                        for (ai, a) in aggs.iter().enumerate() {
                            let xs: Vec<f64> = match (a.op, ni) {
                                (AggOp::Count, _) => vec![0.0; members.len()],
                                (_, Some(ni)) => members.iter().filter_map(|r| t.value(*r, ni).as_f64()).collect(),
                                _ => unreachable!(),
                            };
                            let want = oracle_agg(a.op, &xs);
                            let got = g.table.value(gi, ai + 1).as_f64();
                            let ok = match (got, want) {
                                (Some(x), Some(y)) => (x - y).abs() <= 1e-12 * y.abs().max(1.0),
                                (x, y) => x == y,
                            };
                            ensure!(ok, "groupby {name} {}: {got:?} vs {want:?}", a.op.name());
                        }
                    }
                }
                // selection composition and filtering against set algebra
                let a: BTreeSet<usize> = (0..rows).filter(|_| rng.gen_bool(0.4)).collect();
                let b: BTreeSet<usize> = (0..rows).filter(|_| rng.gen_bool(0.4)).collect();
                let live_set: BTreeSet<usize> = live_rows.iter().copied().collect();
                let mut u = t.clone();
                let first = compose_selection(&mut u, &a, false);
                let both = compose_selection(&mut u, &b, true);
                let ab: BTreeSet<usize> = a.union(&b).copied().filter(|r| live_set.contains(r)).collect();
                ensure!(first == a.intersection(&live_set).copied().collect() && both == ab, "compose on {rows} rows");
                let inclusive = rng.gen_bool(0.5);
                let mask = filter(&mut u, &a, inclusive);
                let want: Vec<bool> = (0..rows).map(|r| live[r] && (a.contains(&r) == inclusive)).collect();
                ensure!(mask == want, "filter inclusive={inclusive} on {rows} rows: {mask:?} vs {want:?}");
                ensure!(u.selection.as_ref().unwrap().iter().all(|r| want[*r]), "selection kept a filtered row");
                checks += 2;
            }
        }
    }
    ensure!(cases >= 1000, "only {cases} tables");
    Ok(format!("{cases} tables, {checks} operator checks"))
}

/// Builds a valid event for one taxonomy row on the first view.
fn event_for(row: &TaxonomyRow, s: &Session) -> InteractionEvent {
    let view = &s.views[0];
    let meta = &view.chart.meta;
    let clip = meta.clip;
    let target = match row.target {
        TargetKind::Mark => Target::Mark { id: meta.marks[0] },
        TargetKind::Legend => Target::Legend { label: meta.legends[0].entries[0].label.clone(), legend: 0 },
        TargetKind::Background => Target::Background,
        TargetKind::Axis => Target::Axis { axis: AxisOrientation::Y },
    };
    let mut e = InteractionEvent::new(view.id(), target, row.event_type);
    e.input = Some(row.input);
    e.meta = row.meta;
    let mid = [clip.center_x(), clip.center_y()];
    let p = &mut e.params;
    match row.branch {
        Branch::ViewBrush | Branch::ViewBrushAppend | Branch::AxisBrush | Branch::AxisBrushAppend => {
            e.mode = Some(Mode::Brush);
            p.rect = Some([clip.left, clip.top, mid[0], mid[1]]);
        }
        Branch::ViewPan | Branch::AxisPan => {
            e.mode = Some(Mode::Pan);
            p.delta = Some([12.0, -8.0]);
        }
        Branch::ViewAreaZoom | Branch::AxisAreaZoom => {
            e.mode = Some(Mode::Pan);
            p.rect = Some([clip.left, clip.top, mid[0], mid[1]]);
        }
        Branch::ViewZoomScroll | Branch::AxisZoomScroll => p.factor = Some(1.25),
        Branch::ViewZoomDoubleClick | Branch::AxisZoomDoubleClick => p.point = Some(mid),
        Branch::MarkFilter | Branch::LegendFilter => p.filter = Some(FilterMode::Exclusive),
        Branch::MarkSort => p.direction = Some(Direction::Desc),
        Branch::ViewAnnotate => {
            p.point = Some(mid);
            p.text = Some("note".into());
        }
        Branch::MarkTooltip => p.point = Some(mid),
        _ => {}
    }
    e
}

/// `(target, type)` cells listed under the README's out-of-scope table.
fn documented_out_of_scope() -> BTreeSet<(String, String)> {
    let readme = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap_or_default();
    let Some(start) = readme.find("### Outside the taxonomy") else { return BTreeSet::new() };
    readme[start..]
        .lines()
        .skip(1)
        .skip_while(|l| !l.starts_with('|'))
        .take_while(|l| l.starts_with('|'))
        .filter_map(|l| {
            let cells: Vec<&str> = l.split('|').map(str::trim).filter(|c| !c.is_empty()).collect();
            (cells.len() >= 2 && !cells[0].starts_with('-') && cells[0] != "target").then(|| (cells[0].to_string(), cells[1].to_string()))
        })
        .collect()
}

fn lower<T: serde::Serialize>(x: T) -> String {
    serde_json::to_value(x).unwrap().as_str().unwrap().to_string()
}

fn taxonomy_coverage() -> Outcome {
    let base = single("d3/stackedBar/stacked_bar.svg");
    let documented = documented_out_of_scope();
    let targets = [TargetKind::Mark, TargetKind::Legend, TargetKind::Background, TargetKind::Axis];
    let types = [EventType::Select, EventType::Brush, EventType::Filter, EventType::Sort, EventType::Navigate, EventType::Annotate, EventType::Hover, EventType::Reset];
    let inputs = [Input::Click, Input::DoubleClick, Input::Hover, Input::Drag, Input::Scroll];
    let mut branches = BTreeMap::new();
    let mut outside = 0;
    for target in targets {
        for ty in types {
            let rows: Vec<&TaxonomyRow> = TAXONOMY.iter().filter(|r| r.target == target && r.event_type == ty).collect();
            let cell = (format!("{target:?}").to_lowercase(), lower(ty));
            if rows.is_empty() {
                outside += 1;
                ensure!(documented.contains(&cell), "{cell:?} has no branch and is not documented as out of scope");
                let probe = TaxonomyRow { target, event_type: ty, ..TAXONOMY[0] };
                for input in inputs {
                    let mut e = event_for(&probe, &base);
                    e.input = Some(input);
                    ensure!(dispatch(&e, false).is_err() && dispatch(&e, true).is_err(), "{cell:?} by {input:?} dispatched");
                }
                continue;
            }
            ensure!(!documented.contains(&cell), "{cell:?} is documented as out of scope but has a branch");
            for row in rows {
                let e = event_for(row, &base);
                e.validate().map_err(|err| format!("{:?}: {err}", row.branch))?;
                let mut s = base.clone();
                let out = s.apply(&e).map_err(|err| format!("{:?}: {err}", row.branch))?;
                ensure!(out.branch == row.branch, "{cell:?} dispatched to {:?}, table says {:?}", out.branch, row.branch);
                s.materialize(s.views[0].id()).map_err(|err| err.to_string())?;
                branches.insert(format!("{:?}", row.branch), ());
            }
        }
    }
    ensure!(branches.len() == TAXONOMY.len(), "{} distinct branches for {} rows", branches.len(), TAXONOMY.len());
    ensure!(documented.len() == outside, "README lists {} out-of-scope cells, {} exist", documented.len(), outside);
    Ok(format!("{} rows dispatch to distinct branches; {outside} cells documented out of scope", TAXONOMY.len()))
}
