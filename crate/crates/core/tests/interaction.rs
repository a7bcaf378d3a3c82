use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chartseam::deconstruct::{deconstruct, AxisOrientation};
use chartseam::interact::*;
use chartseam::query::{group_aggregate, Direction};
use chartseam::session::{load_manifest, ChartView, SessionManifest};
use chartseam::svg::{parse_svg, Edit, MarkId};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn single(rel: &str) -> Session {
    let path = fixture(rel);
    let id = path.file_stem().unwrap().to_string_lossy().into_owned();
    Session::new(vec![ChartView::load(&id, &path).unwrap()], None, SessionOptions::default())
}

fn suite(name: &str) -> Session {
    let m = SessionManifest::load(&fixture(&format!("suites/{name}/manifest.json"))).unwrap();
    let (views, external) = load_manifest(&m).unwrap();
    Session::new(views, external, SessionOptions { link: m.link_options(), ..Default::default() })
}

fn opacity_edits(edits: &[Edit]) -> BTreeSet<MarkId> {
    edits
        .iter()
        .filter_map(|e| match e {
            Edit::SetAttr { mark, name, .. } if name == "opacity" || name == "style" => Some(*mark),
            _ => None,
        })
        .collect()
}

fn click(chart: &str, id: MarkId) -> InteractionEvent {
    InteractionEvent::new(chart, Target::Mark { id }, EventType::Select)
}

fn brush(chart: &str, rect: [f64; 4]) -> InteractionEvent {
    let mut e = InteractionEvent::new(chart, Target::Background, EventType::Brush);
    e.mode = Some(Mode::Brush);
    e.params.rect = Some(rect);
    e
}

fn mark_centers(bytes: &[u8], ids: &[MarkId]) -> Vec<(f64, f64)> {
    let doc = parse_svg(bytes).unwrap();
    ids.iter().map(|id| {
        let b = doc.marks[id.0].bbox;
        ((b.left + b.right) / 2.0, (b.top + b.bottom) / 2.0)
    }).collect()
}

#[test]
fn clicking_a_bar_dims_the_rest() {
    let mut s = single("d3/bar/barchart_basic.svg");
    let v = "barchart_basic";
    assert!(s.materialize(v).unwrap().is_empty());
    let bar = s.view(v).unwrap().chart.meta.marks[3];
    let out = s.apply(&click(v, bar)).unwrap();
    assert_eq!(out.branch, Branch::MarkSelect);
    let edits = s.materialize(v).unwrap();
    let dimmed = opacity_edits(&edits);
    assert_eq!(dimmed.len(), 7);
    assert!(!dimmed.contains(&bar));
}

#[test]
fn meta_click_appends_then_removes() {
    let mut s = single("d3/bar/barchart_basic.svg");
    let v = "barchart_basic";
    let marks = s.view(v).unwrap().chart.meta.marks.clone();
    s.apply(&click(v, marks[0])).unwrap();
    let mut e = click(v, marks[1]);
    e.meta = true;
    assert_eq!(s.apply(&e).unwrap().branch, Branch::MarkSelectAppend);
    assert_eq!(s.selected_rows(v).unwrap().len(), 2);
    assert_eq!(opacity_edits(&s.materialize(v).unwrap()).len(), 6);
    s.apply(&e).unwrap();
    assert_eq!(s.selected_rows(v).unwrap().len(), 1);
}

#[test]
fn background_click_clears() {
    let mut s = single("d3/bar/barchart_basic.svg");
    let v = "barchart_basic";
    let bar = s.view(v).unwrap().chart.meta.marks[0];
    s.apply(&click(v, bar)).unwrap();
    s.apply(&InteractionEvent::new(v, Target::Background, EventType::Select)).unwrap();
    assert!(s.selected_rows(v).is_none());
    assert!(s.materialize(v).unwrap().is_empty());
}

#[test]
fn legend_selects_class_marks() {
    let mut s = single("d3/stackedBar/stacked_bar.svg");
    let v = "stacked_bar";
    let legend = s.view(v).unwrap().chart.meta.legends[0].clone();
    let label = legend.entries[0].label.clone();
    s.apply(&InteractionEvent::new(v, Target::Legend { label: label.clone(), legend: 0 }, EventType::Select)).unwrap();
    let view = s.view(v).unwrap();
    let t = &view.chart.table;
    let sel = s.selected_rows(v).unwrap();
    assert!(!sel.is_empty());
    for r in 0..t.row_count() {
        assert_eq!(sel.contains(&r), t.value(r, 2).render() == label);
    }
    let live_marks = view.chart.meta.marks.iter().filter(|m| !t.rows_of_mark(**m).is_empty()).count();
    let selected_marks = t.marks_of_rows(&sel).len();
    assert_eq!(opacity_edits(&s.materialize(v).unwrap()).len(), live_marks - selected_marks);
}

#[test]
fn inclusive_filter_hides_other_classes_and_legend_keys() {
    let mut s = single("ggplot/line/multiline_legend.svg");
    let v = "multiline_legend";
    let legend = s.view(v).unwrap().chart.meta.legends[0].clone();
    let mut e = InteractionEvent::new(v, Target::Legend { label: legend.entries[1].label.clone(), legend: 0 }, EventType::Filter);
    e.params.filter = Some(FilterMode::Inclusive);
    s.apply(&e).unwrap();
    let edits = s.materialize(v).unwrap();
    let hidden: BTreeSet<MarkId> = edits
        .iter()
        .filter_map(|e| match e {
            Edit::SetAttr { mark, name, value } if name == "opacity" && value == "0" => Some(*mark),
            _ => None,
        })
        .collect();
    let lines = s.view(v).unwrap().chart.meta.marks.len();
    let keys: usize = legend.entries.len() - 1;
    // other lines plus swatch and label of each other legend key
    assert_eq!(hidden.len(), (lines - 1) + 2 * keys);
    assert!(!hidden.contains(&legend.entries[1].swatch));
}

#[test]
fn zoom_then_reset_is_byte_exact() {
    for rel in ["d3/scatter/scatter_basic.svg", "ggplot/line/multiline_legend.svg", "d3/bar/barchart_basic.svg"] {
        let mut s = single(rel);
        let v = s.views[0].id().to_string();
        let initial = s.render(&v).unwrap();
        let clip = s.views[0].chart.meta.clip;
        let mut dbl = InteractionEvent::new(&v, Target::Background, EventType::Navigate);
        dbl.input = Some(Input::DoubleClick);
        dbl.params.point = Some([(clip.left + clip.right) / 2.0, (clip.top + clip.bottom) / 2.0]);
        assert_eq!(s.apply(&dbl).unwrap().branch, Branch::ViewZoomDoubleClick);
        assert_eq!(s.views[0].navigation.x.k, 2.0);
        let zoomed = String::from_utf8(s.render(&v).unwrap()).unwrap();
        assert!(zoomed.contains("vector-effect=\"non-scaling-stroke\""), "{rel}");
        assert!(zoomed.contains("clip-path=\"url(#chartseam-clip-"));
        assert_eq!(s.apply(&dbl).unwrap().branch, Branch::ViewReset);
        assert_eq!(s.render(&v).unwrap(), initial, "{rel}");
    }
}

#[test]
fn zoomed_lines_keep_stroke_width() {
    let mut s = single("d3/line/multiline.svg");
    let v = "multiline";
    let mut e = InteractionEvent::new(v, Target::Background, EventType::Navigate);
    e.params.factor = Some(1.5);
    e.params.point = Some([200.0, 150.0]);
    assert_eq!(s.apply(&e).unwrap().branch, Branch::ViewZoomScroll);
    let out = String::from_utf8(s.render(v).unwrap()).unwrap();
    assert!(out.contains("vector-effect=\"non-scaling-stroke\""));
}

#[test]
fn pan_shifts_marks_and_axis_domain() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    let ids = s.views[0].chart.meta.marks.clone();
    let before = mark_centers(&s.render(v).unwrap(), &ids);
    let mut e = InteractionEvent::new(v, Target::Background, EventType::Navigate);
    e.mode = Some(Mode::Pan);
    e.params.delta = Some([10.0, 0.0]);
    let out = s.apply(&e).unwrap();
    assert_eq!(out.branch, Branch::ViewPan);
    assert_eq!(out.predicates.clauses[0].len(), 2);
    let after = mark_centers(&s.render(v).unwrap(), &ids);
    for (a, b) in before.iter().zip(&after) {
        assert!((b.0 - a.0 - 10.0).abs() < 1e-6 && (b.1 - a.1).abs() < 1e-6);
    }
    // tick labels now read the domain under their original positions
    let edits = s.materialize(v).unwrap();
    let ax = s.views[0].chart.meta.axis(AxisOrientation::X).unwrap().clone();
    let t0 = &ax.ticks[0];
    let want = ax.scale.invert_f64(t0.position - 10.0).unwrap();
    let text = edits.iter().find_map(|e| match e {
        Edit::SetText { mark, text } if *mark == t0.label_mark => Some(text.clone()),
        _ => None,
    });
    let got: f64 = text.unwrap().replace('\u{2212}', "-").parse().unwrap();
    let step = (ax.scale.invert_f64(ax.ticks[1].position).unwrap() - ax.scale.invert_f64(t0.position).unwrap()).abs();
    assert!((got - want).abs() <= step / 10.0);
}

#[test]
fn axis_zoom_constrains_one_dimension() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    let mut e = InteractionEvent::new(v, Target::Axis { axis: AxisOrientation::X }, EventType::Navigate);
    e.params.factor = Some(2.0);
    assert_eq!(s.apply(&e).unwrap().branch, Branch::AxisZoomScroll);
    assert_eq!(s.views[0].navigation.x.k, 2.0);
    assert_eq!(s.views[0].navigation.y.k, 1.0);
}

#[test]
fn sort_matches_argsort_oracle() {
    for rel in ["ggplot/bar/column_chart.svg", "vega/bar/horizontal_bar.svg", "d3/bar/barchart_basic.svg"] {
        for dir in [Direction::Asc, Direction::Desc] {
            let mut s = single(rel);
            let v = s.views[0].id().to_string();
            let view = &s.views[0];
            let t = view.chart.table.clone();
            let bars = view.chart.meta.marks.clone();
            let horizontal = view.chart.meta.orientation == chartseam::deconstruct::ChartOrientation::Horizontal;
            let before = mark_centers(&s.render(&v).unwrap(), &bars);
            let along = |c: &(f64, f64)| if horizontal { c.1 } else { c.0 };
            let mut slots: Vec<f64> = before.iter().map(along).collect();
            slots.sort_by(f64::total_cmp);
            let mut e = InteractionEvent::new(&v, Target::Mark { id: bars[0] }, EventType::Sort);
            e.params.direction = Some(dir);
            s.apply(&e).unwrap();
            let after = mark_centers(&s.render(&v).unwrap(), &bars);
            let mut got: Vec<f64> = after.iter().map(along).collect();
            // permutation of the original positions
            let mut sorted = got.clone();
            sorted.sort_by(f64::total_cmp);
            for (a, b) in sorted.iter().zip(&slots) {
                assert!((a - b).abs() < 1e-6, "{rel} {dir:?} {sorted:?} {slots:?}");
            }
            // independent argsort of the bar values
            let mut oracle: Vec<usize> = (0..bars.len()).collect();
            let vf = if horizontal { 0 } else { 1 };
            let val = |i: usize| t.value(t.rows_of_mark(bars[i])[0], vf).as_f64().unwrap();
            oracle.sort_by(|a, b| {
                let o = val(*a).total_cmp(&val(*b));
                if dir == Direction::Asc { o } else { o.reverse() }
            });
            for (rank, bar) in oracle.iter().enumerate() {
                assert!((got[*bar] - slots[rank]).abs() < 1e-6, "{rel} {dir:?}");
            }
            got.clear();
        }
    }
}

#[test]
fn sort_by_dragging_the_largest_bar() {
    let mut s = single("ggplot/bar/column_chart.svg");
    let v = "column_chart";
    let t = s.views[0].chart.table.clone();
    let bars = s.views[0].chart.meta.marks.clone();
    let biggest = *bars
        .iter()
        .max_by(|a, b| t.value(t.rows_of_mark(**a)[0], 1).as_f64().unwrap().total_cmp(&t.value(t.rows_of_mark(**b)[0], 1).as_f64().unwrap()))
        .unwrap();
    let mut e = InteractionEvent::new(v, Target::Mark { id: biggest }, EventType::Sort);
    e.params.from = Some([300.0, 200.0]);
    e.params.to = Some([0.0, 200.0]);
    let out = s.apply(&e).unwrap();
    assert_eq!(s.views[0].sort.as_ref().unwrap().1, Direction::Desc);
    assert_eq!(out.predicates.clauses[0].len(), 1);
}

#[test]
fn sort_needs_categorical_axis() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    let id = s.views[0].chart.meta.marks[0];
    let mut e = InteractionEvent::new(v, Target::Mark { id }, EventType::Sort);
    e.params.direction = Some(Direction::Asc);
    assert_eq!(s.apply(&e).unwrap_err(), InteractionError::NoCategoricalAxis);
}

#[test]
fn quartet_brush_highlights_the_other_three() {
    let mut s = suite("scatter-quartet");
    let origin = s.views[0].id().to_string();
    let clip = s.views[0].chart.meta.clip;
    let rect = [clip.left, clip.top, (clip.left + clip.right) / 2.0, clip.bottom];
    s.apply(&brush(&origin, rect)).unwrap();
    let picked = s.selected_rows(&origin).unwrap();
    assert!(!picked.is_empty() && picked.len() < s.views[0].chart.table.row_count());
    let ext = s.selected_rows("external").unwrap();
    assert_eq!(ext.len(), picked.len());
    for v in &s.views[1..] {
        let sel = s.selected_rows(v.id()).unwrap();
        assert_eq!(sel.len(), picked.len(), "{}", v.id());
        let edits = s.materialize(v.id()).unwrap();
        assert_eq!(opacity_edits(&edits).len(), v.chart.meta.marks.len() - sel.len());
    }
}

#[test]
fn axis_brush_constrains_one_field() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    let clip = s.views[0].chart.meta.clip;
    let mut e = InteractionEvent::new(v, Target::Axis { axis: AxisOrientation::X }, EventType::Brush);
    e.mode = Some(Mode::Brush);
    e.params.rect = Some([clip.left, 0.0, (clip.left + clip.right) / 2.0, 0.0]);
    let out = s.apply(&e).unwrap();
    assert_eq!(out.branch, Branch::AxisBrush);
    assert_eq!(out.predicates.clauses, vec![out.predicates.clauses[0].clone()]);
    assert!(out.predicates.clauses[0].iter().all(|p| p.field == s.views[0].chart.table.fields[0].name));
    assert!(!s.selected_rows(v).unwrap().is_empty());
}

#[test]
fn filter_then_select_never_shows_filtered_rows() {
    let mut s = suite("weather-trio");
    let scatter = s.views.iter().find(|v| !v.chart.meta.legends.is_empty()).unwrap().id().to_string();
    let label = s.view(&scatter).unwrap().chart.meta.legends[0].entries[0].label.clone();
    let mut f = InteractionEvent::new(&scatter, Target::Legend { label, legend: 0 }, EventType::Filter);
    f.params.filter = Some(FilterMode::Exclusive);
    s.apply(&f).unwrap();
    let ids: Vec<String> = s.views.iter().map(|v| v.id().to_string()).collect();
    for origin in &ids {
        let clip = s.view(origin).unwrap().chart.meta.clip;
        s.apply(&brush(origin, [clip.left - 5.0, clip.top - 5.0, clip.right + 5.0, clip.bottom + 5.0])).unwrap();
        for v in ids.iter().map(String::as_str).chain(["external"]) {
            let t = if v == "external" { s.external.as_ref().unwrap() } else { &s.view(v).unwrap().chart.table };
            if let Some(sel) = &t.selection {
                assert!(sel.iter().all(|r| t.is_live(*r)), "{origin} → {v}");
            }
        }
    }
    let ext = s.external.as_ref().unwrap();
    assert!(ext.live_rows().len() < ext.row_count());
}

#[test]
fn crossfilter_overlay_matches_direct_aggregation() {
    let mut s = suite("crossfilter-trio");
    let origin = "distance_hist";
    let bin = s.view(origin).unwrap().chart.meta.marks[2];
    s.apply(&click(origin, bin)).unwrap();
    let ext = s.external.clone().unwrap();
    let picked: Vec<usize> = ext.selection.clone().unwrap().into_iter().collect();
    assert!(!picked.is_empty());
    let sub = ext.subset(&picked);
    for v in ["delay_hist", "time_stdev"] {
        let node = s.graph.node(v).unwrap();
        let spec = node.sources[0].transforms.clone().unwrap();
        let applied = chartseam::link::apply_transform(&sub, &spec).unwrap();
        let view = s.view(v).unwrap();
        let overlay = view.overlay.clone().expect("overlay");
        let t = &view.chart.table;
        let agg = spec.aggregate().unwrap();
        let oracle = group_aggregate(&applied.table, &chartseam::query::AggregateSpec { groupby: agg.groupby.clone(), aggs: vec![] }).ok();
        let _ = oracle;
        for r in 0..t.row_count() {
            let key = t.value(r, 0).render();
            let want = (0..applied.table.row_count())
                .find(|o| applied.table.value(*o, 0).render() == key)
                .and_then(|o| applied.table.value(o, applied.table.fields.len() - 1).as_f64());
            match (overlay[r], want) {
                (Some(x), Some(y)) => assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{v} row {r}: {x} vs {y}"),
                (None, None) => {}
                (x, None) if x == Some(0.0) => {}
                (x, y) => panic!("{v} row {r}: {x:?} vs {y:?}"),
            }
        }
        let out = String::from_utf8(s.render(v).unwrap()).unwrap();
        assert!(out.contains("class=\"chartseam-overlay\""));
    }
}

#[test]
fn annotation_is_excluded_from_deconstruction() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    for (i, text) in ["peak", "dip"].iter().enumerate() {
        let mut e = InteractionEvent::new(v, Target::Background, EventType::Annotate);
        e.params.point = Some([100.0 + 50.0 * i as f64, 50.0]);
        e.params.text = Some(text.to_string());
        assert_eq!(s.apply(&e).unwrap().branch, Branch::ViewAnnotate);
    }
    let out = s.render(v).unwrap();
    let text = String::from_utf8(out.clone()).unwrap();
    assert_eq!(text.matches("class=\"chartseam-annotation\"").count(), 2);
    assert!(text.contains("<text x=\"100\" y=\"50\""));
    let doc = parse_svg(&out).unwrap();
    let meta = deconstruct(&doc);
    assert_eq!(meta.marks, s.views[0].chart.meta.marks);
}

#[test]
fn hover_reports_each_line() {
    let mut s = single("ggplot/line/multiline_legend.svg");
    let v = "multiline_legend";
    let clip = s.views[0].chart.meta.clip;
    let id = s.views[0].chart.meta.marks[0];
    let mut e = InteractionEvent::new(v, Target::Mark { id }, EventType::Hover);
    e.params.point = Some([(clip.left + clip.right) / 2.0, clip.top + 10.0]);
    let out = s.apply(&e).unwrap();
    assert_eq!(out.tooltips.len(), s.views[0].chart.meta.marks.len());
    let xs: BTreeSet<String> = out.tooltips.iter().map(|t| t.values.values().next().unwrap().to_string()).collect();
    assert_eq!(xs.len(), 1);
}

#[test]
fn mark_hover_gives_its_row() {
    let mut s = single("d3/scatter/scatter_basic.svg");
    let v = "scatter_basic";
    let id = s.views[0].chart.meta.marks[5];
    let out = s.apply(&InteractionEvent::new(v, Target::Mark { id }, EventType::Hover)).unwrap();
    assert_eq!(out.tooltips.len(), 1);
    let t = &s.views[0].chart.table;
    let row = t.rows_of_mark(id)[0];
    assert_eq!(out.tooltips[0].row, row);
    assert_eq!(out.tooltips[0].values.len(), t.fields.len());
}

#[test]
fn brush_on_lines_reports_endpoints() {
    let mut s = single("vega/stackedArea/stacked_area.svg");
    let v = "stacked_area";
    let clip = s.views[0].chart.meta.clip;
    let mut e = InteractionEvent::new(v, Target::Axis { axis: AxisOrientation::X }, EventType::Brush);
    e.mode = Some(Mode::Brush);
    e.params.rect = Some([clip.left + 20.0, 0.0, clip.left + 120.0, 0.0]);
    let out = s.apply(&e).unwrap();
    assert_eq!(out.tooltips.len(), 2 * s.views[0].chart.meta.marks.len());
}

#[test]
fn unknown_mark_is_rejected() {
    let mut s = single("d3/bar/barchart_basic.svg");
    let err = s.apply(&click("barchart_basic", MarkId(0))).unwrap_err();
    assert!(matches!(err, InteractionError::UnknownTarget(_)));
    assert!(matches!(s.apply(&click("nope", MarkId(0))).unwrap_err(), InteractionError::UnknownView(_)));
}

#[test]
fn script_errors_name_the_event() {
    let src = r#"[
        {"chart": "a", "target": {"kind": "background"}, "type": "select"},
        {"chart": "a", "target": {"kind": "background"}, "type": "brush"}
    ]"#;
    match parse_script(src) {
        Err(InteractionError::Schema { index, .. }) => assert_eq!(index, 1),
        other => panic!("{other:?}"),
    }
    let src = r#"[{"chart": "a", "target": {"kind": "mark", "id": 3}, "type": "teleport"}]"#;
    assert!(matches!(parse_script(src), Err(InteractionError::Schema { index: 0, .. })));
    let ok = r#"[{"chart": "a", "target": {"kind": "axis", "axis": "x"}, "type": "brush", "mode": "brush", "params": {"rect": [0, 0, 5, 5]}}]"#;
    assert_eq!(parse_script(ok).unwrap().len(), 1);
}

/// An event exercising one taxonomy row on the stacked-bar fixture.
fn event_for(row: &TaxonomyRow, s: &Session) -> InteractionEvent {
    let view = &s.views[0];
    let v = view.id();
    let meta = &view.chart.meta;
    let clip = meta.clip;
    let target = match row.target {
        TargetKind::Mark => Target::Mark { id: meta.marks[0] },
        TargetKind::Legend => Target::Legend { label: meta.legends[0].entries[0].label.clone(), legend: 0 },
        TargetKind::Background => Target::Background,
        TargetKind::Axis => Target::Axis { axis: AxisOrientation::Y },
    };
    let mut e = InteractionEvent::new(v, target, row.event_type);
    e.input = Some(row.input);
    e.meta = row.meta;
    let mid = [(clip.left + clip.right) / 2.0, (clip.top + clip.bottom) / 2.0];
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

#[test]
fn taxonomy_dispatch_coverage() {
    let base = single("d3/stackedBar/stacked_bar.svg");
    let mut seen = BTreeSet::new();
    for row in TAXONOMY.iter() {
        let e = event_for(row, &base);
        e.validate().unwrap();
        assert_eq!(dispatch(&e, false).unwrap(), row.branch, "{row:?}");
        let mut s = base.clone();
        let out = s.apply(&e).unwrap_or_else(|err| panic!("{:?}: {err}", row.branch));
        assert_eq!(out.branch, row.branch);
        s.materialize(s.views[0].id()).unwrap();
        assert!(seen.insert(row.branch));
    }
    assert_eq!(seen.len(), 24);
}

#[test]
fn ambiguous_drags_need_mode() {
    let s = single("d3/stackedBar/stacked_bar.svg");
    for row in TAXONOMY.iter().filter(|r| r.input == Input::Drag && r.target != TargetKind::Mark) {
        let mut e = event_for(row, &s);
        e.mode = None;
        assert!(matches!(dispatch(&e, false), Err(InteractionError::AmbiguousWithoutMode(_))), "{row:?}");
    }
}
