use std::collections::BTreeSet;

use super::cluster::{cluster_field, AlignField};
use super::labels::{parse_labels, ParsedLabels};
use super::pairing::ordered_pairing;
use super::scale::Scale;
use super::{DeconstructOptions, Diagnostic, Legend, LegendEntry, LegendScale, LegendType, SizeMeasure};
use crate::svg::{fmt_num, Geometry, MarkId, MarkKind, Rect, ResolvedMark, SvgDocument};
use crate::value::Value;

/// Size-independent outline signature used to compare symbol shapes.
pub fn shape_key(m: &ResolvedMark) -> String {
    let near = |a: f64, b: f64| (a - b).abs() <= 0.05 * a.abs().max(b.abs()).max(1e-9);
    match &m.geometry {
        Geometry::Ellipse { .. } => {
            if near(m.bbox.width(), m.bbox.height()) {
                "circle".into()
            } else {
                "ellipse".into()
            }
        }
        Geometry::Rect { .. } => {
            if near(m.bbox.width(), m.bbox.height()) {
                "square".into()
            } else {
                "rect".into()
            }
        }
        Geometry::Use { href, inner: MarkKind::Use, .. } => format!("use:{href}"),
        Geometry::Text { content, .. } => format!("text:{content}"),
        Geometry::Line { .. } => "line".into(),
        _ => {
            if m.shape_kind() == MarkKind::Rectangle {
                return if near(m.bbox.width(), m.bbox.height()) { "square".into() } else { "rect".into() };
            }
            if m.shape_kind() == MarkKind::Ellipse {
                return "circle".into();
            }
            let b = m.bbox;
            let size = b.width().max(b.height()).max(1e-9);
            let pts: Vec<String> = m
                .vertices()
                .iter()
                .map(|p| {
                    let x = ((p.0 - b.center_x()) / size * 10.0).round() / 10.0;
                    let y = ((p.1 - b.center_y()) / size * 10.0).round() / 10.0;
                    format!("{},{}", fmt_num(x), fmt_num(y))
                })
                .collect();
            format!("{:?}:{}", m.shape_kind(), pts.join(" "))
        }
    }
}

pub(crate) fn measure(m: &ResolvedMark, which: SizeMeasure) -> f64 {
    match which {
        SizeMeasure::Area => m.area(),
        SizeMeasure::Width => m.bbox.width(),
        SizeMeasure::Height => m.bbox.height(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Column,
    Row,
}

#[derive(Debug)]
struct Candidate {
    pairs: Vec<(MarkId, MarkId)>,
    offset: f64,
    min_id: MarkId,
    family: Family,
}

fn dedup(mut sets: Vec<Vec<MarkId>>) -> Vec<Vec<MarkId>> {
    sets.sort();
    sets.dedup();
    sets
}

fn union(doc: &SvgDocument, ids: &[MarkId]) -> Option<Rect> {
    let boxes: Vec<Rect> = ids.iter().map(|id| doc.marks[id.0].bbox).collect();
    Rect::union_all(&boxes)
}

fn channels(doc: &SvgDocument, swatches: &[MarkId]) -> Vec<LegendType> {
    let ms: Vec<&ResolvedMark> = swatches.iter().map(|id| &doc.marks[id.0]).collect();
    let mut out = Vec::new();
    let colors: BTreeSet<Option<&str>> = ms.iter().map(|m| m.style.color_key()).collect();
    if colors.len() == ms.len() {
        out.push(LegendType::Color);
    }
    let areas: Vec<f64> = ms.iter().map(|m| m.area().max(m.bbox.width()).max(m.bbox.height())).collect();
    let lo = areas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = areas.iter().copied().fold(0.0, f64::max);
    let mut sorted = areas.clone();
    sorted.sort_by(f64::total_cmp);
    if lo > 0.0 && hi / lo > 1.2 && sorted.windows(2).all(|w| w[1] > w[0]) {
        out.push(LegendType::Size);
    }
    let shapes: BTreeSet<String> = ms.iter().map(|m| shape_key(m)).collect();
    if shapes.len() == ms.len() {
        out.push(LegendType::Shape);
    }
    out
}

fn candidates(
    doc: &SvgDocument,
    texts: &[&ResolvedMark],
    swatches: &[&ResolvedMark],
    opts: &DeconstructOptions,
) -> Vec<Candidate> {
    let threshold = opts.distance_fraction * doc.width.max(doc.height);
    let mut out = Vec::new();
    for (family, fields) in [(Family::Column, AlignField::VERTICAL_COLUMN), (Family::Row, AlignField::HORIZONTAL_ROW)] {
        let tsets = dedup(
            fields
                .iter()
                .flat_map(|f| cluster_field(texts, *f, opts.align_tolerance, opts.min_legend_cluster))
                .map(|c| c.members)
                .collect(),
        );
        let msets = dedup(
            fields
                .iter()
                .flat_map(|f| cluster_field(swatches, *f, opts.align_tolerance, opts.min_legend_cluster))
                .map(|c| c.members)
                .collect(),
        );
        for t in &tsets {
            let Some(tb) = union(doc, t) else { continue };
            for s in &msets {
                let Some(sb) = union(doc, s) else { continue };
                if tb.gap(&sb) > threshold {
                    continue;
                }
                // Rows pair each label's left edge with the preceding swatch's right edge.
                let key_t = |r: &Rect| match family {
                    Family::Column => r.center_y(),
                    Family::Row => r.left,
                };
                let key_s = |r: &Rect| match family {
                    Family::Column => r.center_y(),
                    Family::Row => r.right,
                };
                let mut ts: Vec<(f64, MarkId)> = t.iter().map(|id| (key_t(&doc.marks[id.0].bbox), *id)).collect();
                let mut ss: Vec<(f64, MarkId)> = s.iter().map(|id| (key_s(&doc.marks[id.0].bbox), *id)).collect();
                ts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                ss.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let av: Vec<f64> = ts.iter().map(|x| x.0).collect();
                let bv: Vec<f64> = ss.iter().map(|x| x.0).collect();
                let pairs: Vec<(MarkId, MarkId)> = if ts.len() <= ss.len() {
                    let Some((picks, _)) = ordered_pairing(&av, &bv) else { continue };
                    ts.iter().zip(&picks).map(|(t, j)| (t.1, ss[*j].1)).collect()
                } else {
                    let Some((picks, _)) = ordered_pairing(&bv, &av) else { continue };
                    ss.iter().zip(&picks).map(|(s, j)| (ts[*j].1, s.1)).collect()
                };
                if pairs.len() < opts.min_legend_cluster {
                    continue;
                }
                let mut offset = 0.0;
                let mut ok = true;
                for (tid, sid) in &pairs {
                    let tbx = doc.marks[tid.0].bbox;
                    let sbx = doc.marks[sid.0].bbox;
                    let h = tbx.height().max(1.0);
                    let (along, across) = match family {
                        Family::Column => ((tbx.center_y() - sbx.center_y()).abs(), tbx.gap(&sbx)),
                        Family::Row => ((tbx.center_y() - sbx.center_y()).abs(), (tbx.left - sbx.right).abs()),
                    };
                    if along > (0.6 * h).max(3.0) || across > 2.5 * h {
                        ok = false;
                        break;
                    }
                    offset += along + across;
                }
                if !ok {
                    continue;
                }
                let sw: Vec<MarkId> = pairs.iter().map(|p| p.1).collect();
                let found = channels(doc, &sw);
                let labels: Vec<String> = pairs.iter().map(|p| doc.marks[p.0 .0].text().unwrap_or("").to_string()).collect();
                let numeric = matches!(parse_labels(&labels), Ok(ParsedLabels::Number(_)));
                if found.is_empty() || (found == [LegendType::Size] && !numeric) {
                    continue;
                }
                let min_id = pairs.iter().flat_map(|p| [p.0, p.1]).min().unwrap_or(MarkId(0));
                out.push(Candidate {
                    pairs,
                    offset,
                    min_id,
                    family,
                });
            }
        }
    }
    out
}

fn label_values(labels: &[String]) -> Vec<Value> {
    match parse_labels(labels) {
        Ok(ParsedLabels::Number(v)) => v.into_iter().map(Value::Number).collect(),
        Ok(ParsedLabels::Date(v)) => v.into_iter().map(Value::Date).collect(),
        _ => labels.iter().map(|l| Value::Text(l.clone())).collect(),
    }
}

/// Least-squares line of `ys` on `xs`, returned as a scale from the value
/// extremes to fitted measures. `None` unless strictly monotone.
fn fit_size(values: &[f64], measures: &[f64]) -> Option<Scale> {
    let mut pts: Vec<(f64, f64)> = values.iter().copied().zip(measures.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let inc = pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
    let dec = pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1);
    if !(inc || dec) {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    Some(Scale::Linear {
        domain: [lo, hi],
        range: [slope * lo + icpt, slope * hi + icpt],
    })
}

fn build(
    doc: &SvgDocument,
    c: &Candidate,
    free: &BTreeSet<MarkId>,
    used: &BTreeSet<MarkId>,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<Legend> {
    let labels: Vec<String> = c.pairs.iter().map(|p| doc.marks[p.0 .0].text().unwrap_or("").trim().to_string()).collect();
    let values = label_values(&labels);
    let swatches: Vec<MarkId> = c.pairs.iter().map(|p| p.1).collect();
    let entry_ids: Vec<MarkId> = c.pairs.iter().flat_map(|p| [p.0, p.1]).collect();
    let Some(ubox) = union(doc, &entry_ids) else { return vec![] };

    // Title: nearest unclaimed text just above the entries (or left of a row).
    let h = c.pairs.iter().map(|p| doc.marks[p.0 .0].bbox.height()).fold(0.0, f64::max).max(1.0);
    let title_mark = free
        .iter()
        .filter(|id| !used.contains(id))
        .filter_map(|id| {
            let m = &doc.marks[id.0];
            if m.shape_kind() != MarkKind::Text {
                return None;
            }
            let b = m.bbox;
            let above = b.bottom <= ubox.top + 1.0
                && b.right >= ubox.left - h
                && b.left <= ubox.right
                && ubox.top - b.bottom <= 3.0 * h;
            let left_of = c.family == Family::Row
                && b.right <= ubox.left + 1.0
                && b.bottom >= ubox.top
                && b.top <= ubox.bottom
                && ubox.left - b.right <= 3.0 * h;
            (above || left_of).then(|| (b.gap(&ubox), *id))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|x| x.1);
    let with_title = match title_mark {
        Some(t) => ubox.union(&doc.marks[t.0].bbox),
        None => ubox,
    };
    let frame: Vec<MarkId> = free
        .iter()
        .filter(|id| !used.contains(id) && Some(**id) != title_mark)
        .copied()
        .filter(|id| {
            let m = &doc.marks[id.0];
            matches!(m.shape_kind(), MarkKind::Rectangle | MarkKind::Polygon | MarkKind::PathGeneric)
                && m.bbox.contains(&with_title, 1.0)
                && m.bbox.area() <= 6.0 * with_title.area().max(1.0)
        })
        .collect();

    let mut out = Vec::new();
    for ty in channels(doc, &swatches) {
        let (style_values, scale): (Vec<String>, LegendScale) = match ty {
            LegendType::Color => {
                let sv: Vec<String> = swatches
                    .iter()
                    .map(|id| doc.marks[id.0].style.color_key().unwrap_or("none").to_string())
                    .collect();
                let pairs = sv.iter().cloned().zip(labels.iter().cloned()).collect();
                (sv, LegendScale::Mapping { pairs })
            }
            LegendType::Shape => {
                let sv: Vec<String> = swatches.iter().map(|id| shape_key(&doc.marks[id.0])).collect();
                let pairs = sv.iter().cloned().zip(labels.iter().cloned()).collect();
                (sv, LegendScale::Mapping { pairs })
            }
            LegendType::Size => {
                let nums: Option<Vec<f64>> = values.iter().map(|v| match v {
                    Value::Number(n) => Some(*n),
                    _ => None,
                }).collect();
                let Some(nums) = nums else {
                    diagnostics.push(Diagnostic::new("size-legend-labels", "size legend labels are not numeric", swatches.clone()));
                    continue;
                };
                let mut found = None;
                for which in [SizeMeasure::Area, SizeMeasure::Width, SizeMeasure::Height] {
                    let ms: Vec<f64> = swatches.iter().map(|id| measure(&doc.marks[id.0], which)).collect();
                    if let Some(s) = fit_size(&nums, &ms) {
                        found = Some((which, s, ms));
                        break;
                    }
                }
                let Some((which, s, ms)) = found else {
                    diagnostics.push(Diagnostic::new("size-legend-fit", "swatch sizes are not monotone in the labels", swatches.clone()));
                    continue;
                };
                (ms.iter().map(|m| fmt_num((m * 1000.0).round() / 1000.0)).collect(), LegendScale::Size { measure: which, scale: s })
            }
        };
        let entries = c
            .pairs
            .iter()
            .zip(labels.iter().zip(&values))
            .zip(style_values)
            .map(|((p, (l, v)), sv)| LegendEntry {
                label: l.clone(),
                label_mark: p.0,
                swatch: p.1,
                style_value: sv,
                value: v.clone(),
            })
            .collect();
        out.push(Legend {
            legend_type: ty,
            title: title_mark.and_then(|t| doc.marks[t.0].text().map(|s| s.trim().to_string())),
            title_mark,
            entries,
            scale,
            frame: frame.clone(),
        });
    }
    // Only the first legend of a shared entry set owns the frame.
    for l in out.iter_mut().skip(1) {
        l.frame.clear();
    }
    out
}

/// Finds legends among the marks still unassigned.
pub(crate) fn infer_legends(
    doc: &SvgDocument,
    free: &BTreeSet<MarkId>,
    opts: &DeconstructOptions,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<Legend> {
    let limit = 0.1 * doc.width.max(doc.height);
    let mut used: BTreeSet<MarkId> = BTreeSet::new();
    let mut out = Vec::new();
    loop {
        let texts: Vec<&ResolvedMark> = free
            .iter()
            .filter(|id| !used.contains(id))
            .map(|id| &doc.marks[id.0])
            .filter(|m| m.shape_kind() == MarkKind::Text)
            .collect();
        let swatches: Vec<&ResolvedMark> = free
            .iter()
            .filter(|id| !used.contains(id))
            .map(|id| &doc.marks[id.0])
            .filter(|m| m.shape_kind() != MarkKind::Text && m.bbox.width().max(m.bbox.height()) <= limit)
            .collect();
        let cands = candidates(doc, &texts, &swatches, opts);
        let best = cands.into_iter().min_by(|a, b| {
            b.pairs
                .len()
                .cmp(&a.pairs.len())
                .then(a.offset.total_cmp(&b.offset))
                .then(a.min_id.cmp(&b.min_id))
        });
        let Some(best) = best else { break };
        for p in &best.pairs {
            used.insert(p.0);
            used.insert(p.1);
        }
        let legends = build(doc, &best, free, &used, diagnostics);
        if legends.is_empty() {
            continue;
        }
        for l in &legends {
            used.extend(l.frame.iter().copied());
            used.extend(l.title_mark);
        }
        out.extend(legends);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::parse_svg;

    #[test]
    fn shape_keys_ignore_size() {
        let doc = parse_svg(
            br#"<svg width="100" height="100"><path d="M0 0 L10 0 L5 10 Z"/><path d="M50 50 L70 50 L60 70 Z"/><path d="M0 0 L10 0 L10 10 L0 10 Z"/></svg>"#,
        )
        .unwrap();
        assert_eq!(shape_key(&doc.marks[0]), shape_key(&doc.marks[1]));
        assert_ne!(shape_key(&doc.marks[0]), shape_key(&doc.marks[2]));
    }

    #[test]
    fn size_fit_on_area() {
        let s = fit_size(&[10.0, 20.0, 30.0], &[100.0, 200.0, 300.0]).unwrap();
        assert!((s.invert_f64(150.0).unwrap() - 15.0).abs() < 1e-9);
        assert!(fit_size(&[10.0, 20.0, 30.0], &[100.0, 50.0, 300.0]).is_none());
    }
}
