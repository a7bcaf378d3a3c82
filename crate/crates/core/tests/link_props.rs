use std::collections::{BTreeMap, BTreeSet};

use chartseam::data::{DataTable, Field};
use chartseam::link::*;
use chartseam::query::{group_aggregate, AggOp, Aggregate, AggregateSpec};
use chartseam::value::{FieldType, Value};
use proptest::prelude::*;

const CATS: [&str; 4] = ["a", "b", "c", "d"];

fn base_table() -> impl Strategy<Value = DataTable> {
    (2usize..=50, 1usize..=3).prop_flat_map(|(n, nums)| {
        (
            prop::collection::vec(0usize..4, n),
            prop::collection::vec(prop::collection::vec(-1000i32..1000, n), nums),
        )
            .prop_map(move |(cats, cols)| {
                let mut fields = vec![Field::new("k", FieldType::Text)];
                for i in 0..cols.len() {
                    fields.push(Field::new(format!("v{i}"), FieldType::Number));
                }
                let mut t = DataTable::new("base", fields);
                for r in 0..cats.len() {
                    let mut row = vec![Value::Text(CATS[cats[r]].into())];
                    for c in &cols {
                        row.push(Value::Number(c[r] as f64 / 4.0));
                    }
                    t.push_row(row, None).unwrap();
                }
                t
            })
    })
}

fn rows_of(t: &DataTable) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = t.live_rows().iter().map(|r| t.row(*r).iter().map(|v| v.render()).collect()).collect();
    out.sort();
    out
}

fn project(t: &DataTable, fields: &[String]) -> DataTable {
    let idx: Vec<usize> = fields.iter().map(|f| t.field_index(f).unwrap()).collect();
    let mut out = DataTable::new(t.name.clone(), idx.iter().map(|i| Field::new(fields[idx.iter().position(|x| x == i).unwrap()].clone(), t.fields[*i].field_type)).collect());
    for r in t.live_rows() {
        out.push_row(idx.iter().map(|i| t.value(r, *i).clone()).collect(), None).unwrap();
    }
    out
}

fn renamed(mut t: DataTable, name: &str) -> DataTable {
    t.name = name.into();
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_are_sound(a in base_table(), keep in 1usize..20) {
        let b = renamed(a.subset(&(0..a.row_count().min(keep)).collect::<Vec<_>>()), "b");
        let opts = LinkOptions::default();
        if let Some(ms) = relationship_link(&a, &b, &opts, &mut Vec::new()) {
            for m in &ms {
                let ca = a.field_index(&m.field_from).unwrap();
                let cb = b.field_index(&m.field_to).unwrap();
                let mut used = BTreeSet::new();
                for (rb, ra) in &m.row_map {
                    prop_assert!(used.insert(*ra));
                    match (a.value(*ra, ca), b.value(*rb, cb)) {
                        (Value::Number(x), Value::Number(y)) => prop_assert!((x - y).abs() <= m.epsilon_used + 1e-12),
                        (x, y) => prop_assert_eq!(x, y),
                    }
                }
            }
        }
    }

    #[test]
    fn subset_links_directly(a in base_table(), keep in 1usize..50) {
        let rows: Vec<usize> = (0..a.row_count()).filter(|r| r % 2 == 0 || *r < keep).collect();
        let b = renamed(a.subset(&rows), "b");
        let (r, _) = link_pair(&a, &b, &LinkOptions::default(), &mut Vec::new()).unwrap();
        prop_assert_eq!(&r.kind, &LinkKind::Direct);
        prop_assert_eq!(r.matches.len(), a.fields.len());
    }

    #[test]
    fn direct_is_symmetric(a in base_table(), keep in 1usize..50) {
        let rows: Vec<usize> = (0..a.row_count().min(keep)).collect();
        let b = renamed(a.subset(&rows), "b");
        let opts = LinkOptions::default();
        let ab = link_pair(&a, &b, &opts, &mut Vec::new()).map(|x| x.0);
        let ba = link_pair(&b, &a, &opts, &mut Vec::new()).map(|x| x.0);
        let dab = ab.as_ref().map(|r| r.kind == LinkKind::Direct).unwrap_or(false);
        let dba = ba.as_ref().map(|r| r.kind == LinkKind::Direct).unwrap_or(false);
        prop_assert_eq!(dab, dba);
        if dab {
            let mut m1: Vec<(usize, usize)> = ab.unwrap().matches[0].row_map.iter().map(|(x, y)| (*y, *x)).collect();
            let mut m2 = ba.unwrap().matches[0].row_map.clone();
            m1.sort();
            m2.sort();
            prop_assert_eq!(m1, m2);
        }
    }

    #[test]
    fn known_transform_recovered(a in base_table(), op_i in 0usize..7) {
        let op = AggOp::ALL[op_i];
        let agg = if op == AggOp::Count { Aggregate::count() } else { Aggregate::new("v0", op) };
        let spec = AggregateSpec { groupby: vec!["k".into()], aggs: vec![agg] };
        let g = group_aggregate(&a, &spec).unwrap();
        prop_assume!((0..g.table.row_count()).all(|r| !g.table.value(r, 1).is_null()));
        let target = renamed(g.table.clone(), "agg");
        let found = transform_link(&a, &target, &LinkOptions::default(), &mut Vec::new()).expect("transform found");
        prop_assert_eq!(found.matches.len(), 2);
        let applied = apply_transform(&a, &found.spec).unwrap();
        let names: Vec<String> = target.fields.iter().map(|f| found.matches.iter().find(|m| m.field_to == f.name).unwrap().field_from.clone()).collect();
        let got = project(&applied.table, &names);
        prop_assert_eq!(rows_of(&got), rows_of(&g.table));
    }

    #[test]
    fn plan_visits_each_view_once(a in base_table()) {
        let b = renamed(a.subset(&(0..a.row_count()).collect::<Vec<_>>()), "b");
        let spec = AggregateSpec { groupby: vec!["k".into()], aggs: vec![Aggregate::count()] };
        let c = renamed(group_aggregate(&a, &spec).unwrap().table, "c");
        let ext = renamed(a.clone(), EXTERNAL);
        let g = build_link_graph(&[b, c], &[ext], &LinkOptions::default());
        for origin in ["external", "b", "c"] {
            let p1 = dataflow_plan(&g, origin).unwrap();
            let p2 = dataflow_plan(&g, origin).unwrap();
            prop_assert_eq!(&p1, &p2);
            let mut seen = BTreeSet::new();
            for act in &p1.actions {
                let v = match act {
                    PlanAction::UpdateRoot { view } => view.clone(),
                    PlanAction::MapRows { to, .. } | PlanAction::TransformRender { to, .. } => to.clone(),
                };
                prop_assert!(seen.insert(v));
            }
        }
    }

    #[test]
    fn reaggregation_matches_oracle(a in base_table(), picks in prop::collection::vec(any::<bool>(), 50), op_i in 0usize..7) {
        let op = AggOp::ALL[op_i];
        let agg = if op == AggOp::Count { Aggregate::count() } else { Aggregate::new("v0", op) };
        let spec = AggregateSpec { groupby: vec!["k".into()], aggs: vec![agg] };
        let full = group_aggregate(&a, &spec).unwrap().table;
        prop_assume!((0..full.row_count()).all(|r| !full.value(r, 1).is_null()));
        let c = renamed(full, "c");
        let ext = renamed(a.clone(), EXTERNAL);
        let g = build_link_graph(std::slice::from_ref(&c), std::slice::from_ref(&ext), &LinkOptions::default());
        let node = g.node("c").unwrap();
        prop_assume!(node.sources.len() == 1);
        let plan = dataflow_plan(&g, EXTERNAL).unwrap();
        let sel: BTreeSet<usize> = (0..a.row_count()).filter(|r| picks[*r]).collect();
        let mut tables = BTreeMap::new();
        tables.insert(EXTERNAL.to_string(), ext.clone());
        tables.insert("c".to_string(), c.clone());
        let out = propagate(&g, &plan, &tables, &sel).unwrap();
        let overlay = out["c"].overlay.clone().unwrap();
        // oracle: aggregate the selected rows directly
        let spec_used = node.sources[0].transforms.as_ref().unwrap().aggregate().unwrap().clone();
        let sub = ext.subset(&sel.iter().copied().collect::<Vec<_>>());
        let oracle = group_aggregate(&sub, &spec_used).unwrap().table;
        for r in 0..c.row_count() {
            let key = c.value(r, 0);
            let want = (0..oracle.row_count()).find(|o| oracle.value(*o, 0) == key).and_then(|o| oracle.value(o, 1).as_f64());
            match (overlay[r], want) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-9),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
        prop_assert!(out.values().all(|u| u.selected.iter().all(|r| *r < 1000)));
    }

    #[test]
    fn direct_selection_conserved(a in base_table(), picks in prop::collection::vec(any::<bool>(), 50)) {
        let b = renamed(a.subset(&(0..a.row_count()).collect::<Vec<_>>()), "b");
        let ext = renamed(a.clone(), EXTERNAL);
        let g = build_link_graph(std::slice::from_ref(&b), std::slice::from_ref(&ext), &LinkOptions::default());
        let plan = dataflow_plan(&g, "b").unwrap();
        let sel: BTreeSet<usize> = (0..b.row_count()).filter(|r| picks[*r]).collect();
        let mut tables = BTreeMap::new();
        tables.insert(EXTERNAL.to_string(), ext);
        tables.insert("b".to_string(), b);
        let out = propagate(&g, &plan, &tables, &sel).unwrap();
        prop_assert_eq!(out[EXTERNAL].selected.len(), sel.len());
    }
}

#[test]
fn unrelated_tables_do_not_link() {
    let mut a = DataTable::new("a", vec![Field::new("name", FieldType::Text)]);
    let mut b = DataTable::new("b", vec![Field::new("city", FieldType::Text)]);
    for s in ["x", "y"] {
        a.push_row(vec![Value::Text(s.into())], None).unwrap();
    }
    for s in ["p", "q"] {
        b.push_row(vec![Value::Text(s.into())], None).unwrap();
    }
    let g = build_link_graph(&[a, b], &[], &LinkOptions::default());
    assert!(g.nodes.iter().all(|n| n.sources.is_empty() && n.targets.is_empty()));
    assert!(g.links.is_empty());
}

#[test]
fn cycle_is_reported() {
    let mut g = LinkGraph::default();
    for (v, src) in [("a", "b"), ("b", "a")] {
        g.nodes.push(LinkNode {
            view: v.into(),
            sources: vec![LinkEdge { view: src.into(), transforms: None, matched_fields: 1, fields: vec![], rows: vec![] }],
            targets: vec![],
        });
    }
    assert!(matches!(dataflow_plan(&g, "a"), Err(LinkError::CycleDetected(_))));
}

#[test]
fn budget_truncates() {
    let mut a = DataTable::new("a", vec![Field::new("k", FieldType::Text), Field::new("v", FieldType::Number)]);
    a.push_row(vec![Value::Text("x".into()), Value::Number(1.0)], None).unwrap();
    let (specs, truncated) = enumerate_transforms(&a, None, 3);
    assert_eq!(specs.len(), 3);
    assert!(truncated);
    let (specs, truncated) = enumerate_transforms(&a, None, 10_000);
    assert!(!truncated);
    assert_eq!(specs[0].describe(), vec!["groupby(k)", "min(v)"]);
}
