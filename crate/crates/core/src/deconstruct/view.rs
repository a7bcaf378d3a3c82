use std::collections::BTreeMap;

use super::scale::Scale;
use super::{Axis, AxisOrientation, ChartOrientation, DeconstructOptions, Diagnostic, StackGroup};
use crate::svg::{MarkId, MarkKind, Rect, SvgDocument};
use crate::value::DAY_MS;

pub(crate) struct ViewInfo {
    pub orientation: ChartOrientation,
    pub stacking: Vec<StackGroup>,
    pub baseline: Option<f64>,
    pub bars: Vec<MarkId>,
}

const SLOT_TOLERANCE: f64 = 1.0;

/// Greedy 1-D grouping of sorted values within `tol` of the group start.
fn groups(mut vals: Vec<(f64, usize)>, tol: f64) -> Vec<(f64, Vec<usize>)> {
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut i = 0;
    while i < vals.len() {
        let start = vals[i].0;
        let mut j = i;
        let mut members = Vec::new();
        let mut sum = 0.0;
        while j < vals.len() && vals[j].0 - start <= tol {
            members.push(vals[j].1);
            sum += vals[j].0;
            j += 1;
        }
        out.push((sum / (j - i) as f64, members));
        i = j;
    }
    out
}

#[derive(Clone, Copy)]
struct Bar {
    id: MarkId,
    b: Rect,
}

/// Category-axis centre and the two value-axis edges of a bar.
fn split(o: ChartOrientation, r: &Rect) -> (f64, f64, f64) {
    match o {
        ChartOrientation::Horizontal => (r.center_y(), r.left, r.right),
        _ => (r.center_x(), r.top, r.bottom),
    }
}

fn edge_score(bars: &[Bar], o: ChartOrientation, slots: &[(f64, Vec<usize>)]) -> Vec<(f64, usize)> {
    let mut slot_of = vec![0usize; bars.len()];
    for (s, (_, members)) in slots.iter().enumerate() {
        for m in members {
            slot_of[*m] = s;
        }
    }
    let mut edges: Vec<(f64, usize)> = Vec::new();
    for (i, bar) in bars.iter().enumerate() {
        let (_, a, b) = split(o, &bar.b);
        edges.push((a, i));
        edges.push((b, i));
    }
    groups(edges, SLOT_TOLERANCE)
        .into_iter()
        .map(|(v, members)| {
            let mut s: Vec<usize> = members.iter().map(|m| slot_of[*m]).collect();
            s.sort();
            s.dedup();
            (v, s.len())
        })
        .collect()
}

fn slots_of(bars: &[Bar], o: ChartOrientation) -> Vec<(f64, Vec<usize>)> {
    groups(
        bars.iter().enumerate().map(|(i, b)| (split(o, &b.b).0, i)).collect(),
        SLOT_TOLERANCE,
    )
}

fn uniform(vals: &[f64]) -> bool {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo <= SLOT_TOLERANCE
}

fn value_axis(o: ChartOrientation) -> AxisOrientation {
    match o {
        ChartOrientation::Horizontal => AxisOrientation::X,
        _ => AxisOrientation::Y,
    }
}

fn category_axis(o: ChartOrientation) -> AxisOrientation {
    match o {
        ChartOrientation::Horizontal => AxisOrientation::Y,
        _ => AxisOrientation::X,
    }
}

fn pick_baseline(scores: &[(f64, usize)], value_scale: Option<&Scale>, o: ChartOrientation) -> Option<(f64, usize)> {
    let best = scores.iter().map(|s| s.1).max()?;
    let zero = value_scale.and_then(|s| match s {
        Scale::Linear { domain, .. } if domain[0].min(domain[1]) <= 0.0 && domain[0].max(domain[1]) >= 0.0 => s.apply(0.0),
        _ => None,
    });
    scores
        .iter()
        .filter(|s| s.1 == best)
        .copied()
        .min_by(|a, b| match zero {
            Some(z) => (a.0 - z).abs().total_cmp(&(b.0 - z).abs()),
            None => match o {
                ChartOrientation::Horizontal => a.0.total_cmp(&b.0),
                _ => b.0.total_cmp(&a.0),
            },
        })
}

fn snap(v: f64, width: f64, ticks: &[f64], span: f64, date: bool) -> f64 {
    if let Some(t) = ticks.iter().find(|t| (v - **t).abs() <= 0.005 * span) {
        return *t;
    }
    if date {
        if width >= DAY_MS as f64 {
            return (v / DAY_MS as f64).round() * DAY_MS as f64;
        }
        return v.round();
    }
    let step = 10f64.powf(width.abs().log10().floor() - 2.0);
    if step > 0.0 && step.is_finite() {
        (v / step).round() * step
    } else {
        v
    }
}

fn infer_bins(axis: &mut Axis, slots: &[(f64, Vec<usize>)], bars: &[Bar], o: ChartOrientation) -> bool {
    let date = matches!(axis.scale, Scale::Date { .. });
    if !matches!(axis.scale, Scale::Linear { .. } | Scale::Log { .. } | Scale::Date { .. }) {
        return false;
    }
    let centers: Vec<f64> = slots.iter().map(|s| s.0).collect();
    let widths: Vec<f64> = bars
        .iter()
        .map(|b| match o {
            ChartOrientation::Horizontal => b.b.height(),
            _ => b.b.width(),
        })
        .collect();
    let mut sorted_w = widths.clone();
    sorted_w.sort_by(f64::total_cmp);
    let median_w = sorted_w[sorted_w.len() / 2];
    let pitch = if centers.len() >= 2 {
        let mut gaps: Vec<f64> = centers.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(f64::total_cmp);
        gaps[gaps.len() / 2]
    } else {
        median_w
    };
    if pitch <= 0.0 || median_w < 0.9 * pitch {
        return false;
    }
    let ticks: Vec<f64> = axis.tick_values().iter().filter_map(|v| v.as_f64()).collect();
    let span = ticks.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ticks.iter().copied().fold(f64::INFINITY, f64::min);
    let mut bins = Vec::new();
    for c in &centers {
        let (Some(a), Some(b)) = (axis.scale.invert_f64(c - pitch / 2.0), axis.scale.invert_f64(c + pitch / 2.0)) else {
            return false;
        };
        let (lo, hi) = (a.min(b), a.max(b));
        let w = hi - lo;
        bins.push([snap(lo, w, &ticks, span, date), snap(hi, w, &ticks, span, date)]);
    }
    bins.sort_by(|a, b| a[0].total_cmp(&b[0]));
    axis.bins = Some(bins);
    true
}

pub(crate) fn infer_view(
    doc: &SvgDocument,
    axes: &mut [Axis],
    data: &[MarkId],
    kinds: &BTreeMap<MarkId, MarkKind>,
    _clip: Rect,
    opts: &DeconstructOptions,
    diagnostics: &mut Vec<Diagnostic>,
) -> ViewInfo {
    let kind = |id: &MarkId| kinds.get(id).copied().unwrap_or(doc.marks[id.0].kind);
    let bars: Vec<Bar> = data
        .iter()
        .filter(|id| kind(id) == MarkKind::Rectangle)
        .map(|id| Bar { id: *id, b: doc.marks[id.0].bbox })
        .filter(|b| b.b.width() > 0.0 && b.b.height() > 0.0)
        .collect();
    let areas: Vec<MarkId> = data.iter().copied().filter(|id| kind(id) == MarkKind::Area).collect();
    let lines = data.iter().any(|id| kind(id) == MarkKind::Line);
    let scale_of = |axes: &[Axis], o: AxisOrientation| axes.iter().find(|a| a.orientation == o).map(|a| a.scale.clone());

    if !bars.is_empty() {
        let xs = scale_of(axes, AxisOrientation::X);
        let ys = scale_of(axes, AxisOrientation::Y);
        let x_cat = xs.as_ref().is_some_and(Scale::is_categorical);
        let y_cat = ys.as_ref().is_some_and(Scale::is_categorical);
        let best = |o: ChartOrientation| edge_score(&bars, o, &slots_of(&bars, o)).iter().map(|s| s.1).max().unwrap_or(0);
        let orientation = if x_cat && !y_cat {
            ChartOrientation::Vertical
        } else if y_cat && !x_cat {
            ChartOrientation::Horizontal
        } else {
            let (v, h) = (best(ChartOrientation::Vertical), best(ChartOrientation::Horizontal));
            if v != h {
                if v > h {
                    ChartOrientation::Vertical
                } else {
                    ChartOrientation::Horizontal
                }
            } else if uniform(&bars.iter().map(|b| b.b.width()).collect::<Vec<_>>()) {
                ChartOrientation::Vertical
            } else if uniform(&bars.iter().map(|b| b.b.height()).collect::<Vec<_>>()) {
                ChartOrientation::Horizontal
            } else {
                ChartOrientation::Vertical
            }
        };
        let slots = slots_of(&bars, orientation);
        let scores = edge_score(&bars, orientation, &slots);
        let vscale = scale_of(axes, value_axis(orientation));
        let Some((baseline, count)) = pick_baseline(&scores, vscale.as_ref(), orientation) else {
            return ViewInfo { orientation: ChartOrientation::None, stacking: vec![], baseline: None, bars: vec![] };
        };
        if count * 2 >= slots.len() {
            let mut stacking = Vec::new();
            for (center, members) in &slots {
                if members.len() < 2 {
                    continue;
                }
                let mut seg: Vec<(f64, f64, MarkId)> = members
                    .iter()
                    .map(|i| {
                        let (_, a, b) = split(orientation, &bars[*i].b);
                        let (near, far) = if (a - baseline).abs() <= (b - baseline).abs() { (a, b) } else { (b, a) };
                        ((near - baseline).abs(), (far - baseline).abs(), bars[*i].id)
                    })
                    .collect();
                seg.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
                let contiguous = seg.windows(2).all(|w| (w[1].0 - w[0].1).abs() <= SLOT_TOLERANCE);
                if contiguous {
                    stacking.push(StackGroup {
                        position: *center,
                        marks: seg.iter().map(|s| s.2).collect(),
                    });
                } else {
                    diagnostics.push(Diagnostic::new(
                        "overlapping-bars",
                        "bars in one slot overlap instead of stacking",
                        seg.iter().map(|s| s.2).collect(),
                    ));
                }
            }
            let cat = category_axis(orientation);
            let binned = match axes.iter_mut().find(|a| a.orientation == cat) {
                Some(axis) => infer_bins(axis, &slots, &bars, orientation),
                None => false,
            };
            if !binned && slots.len() >= 3 {
                let gaps: Vec<f64> = slots.windows(2).map(|w| w[1].0 - w[0].0).collect();
                let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
                if gaps.iter().any(|g| (g - mean).abs() > opts.spacing_tolerance * mean) {
                    diagnostics.push(Diagnostic::new("uneven-slots", "bar slots are not evenly spaced", vec![]));
                }
            }
            return ViewInfo {
                orientation,
                stacking,
                baseline: Some(baseline),
                bars: bars.iter().map(|b| b.id).collect(),
            };
        }
    }

    if !areas.is_empty() || lines {
        let mut stacking = Vec::new();
        if areas.len() >= 2 {
            let mut sorted: Vec<(f64, MarkId)> = areas.iter().map(|id| (doc.marks[id.0].bbox.bottom, *id)).collect();
            sorted.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            let center = areas.iter().map(|id| doc.marks[id.0].bbox.center_x()).sum::<f64>() / areas.len() as f64;
            stacking.push(StackGroup {
                position: center,
                marks: sorted.into_iter().map(|s| s.1).collect(),
            });
        }
        return ViewInfo {
            orientation: ChartOrientation::Vertical,
            stacking,
            baseline: None,
            bars: vec![],
        };
    }
    ViewInfo {
        orientation: ChartOrientation::None,
        stacking: vec![],
        baseline: None,
        bars: vec![],
    }
}
