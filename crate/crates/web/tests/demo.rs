use std::path::Path;

use chartseam_web::DemoSession;

fn load(rel: &str) -> DemoSession {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel);
    DemoSession::new(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn summary_lists_structure() {
    let d = load("d3/bar/barchart_basic.svg");
    let s: serde_json::Value = serde_json::from_str(&d.summary()).unwrap();
    assert_eq!(s["dataMarks"], 8);
    assert_eq!(s["fields"], serde_json::json!(["letter", "frequency"]));
}

#[test]
fn click_selects_and_exports() {
    let mut d = load("d3/bar/barchart_basic.svg");
    // inside the third bar (C, x ≈ 235 in root space)
    let id = d.mark_at(235.0, 300.0);
    let svg = d.click(235.0, 300.0, false).unwrap();
    assert!(id.is_some());
    assert_eq!(svg.matches("opacity=\"0.2\"").count(), 7);
    let csv = d.export_csv(true).unwrap();
    assert_eq!(csv, "letter,frequency\r\nC,88.4\r\n");
    let svg = d.click(5.0, 5.0, false).unwrap();
    assert!(!svg.contains("opacity=\"0.2\""));
}

#[test]
fn brush_selects_points() {
    let mut d = load("d3/scatter/scatter_basic.svg");
    d.brush(0.0, 0.0, 320.0, 400.0, "x", false).unwrap();
    let rows = d.export_csv(true).unwrap().lines().count() - 1;
    assert!(rows > 0 && rows < 30);
}

#[test]
fn bad_svg_is_an_error() {
    assert!(DemoSession::new("<svg><g></svg>").is_err());
}
