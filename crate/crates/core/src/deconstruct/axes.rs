use std::collections::BTreeSet;

use super::cluster::{cluster_field, AlignField};
use super::pairing::ordered_pairing;
use super::{AxisOrientation, DeconstructOptions, Diagnostic};
use crate::svg::{MarkId, Rect, ResolvedMark, SvgDocument};

/// Tick pairing emitted before scale inference.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AxisDraft {
    pub orientation: AxisOrientation,
    /// (label mark, tick mark, centred position) in positional order.
    pub pairs: Vec<(MarkId, MarkId, f64)>,
    /// Members of the tick style group left without a label.
    pub orphans: Vec<MarkId>,
    pub offset_sum: f64,
}

#[derive(Debug, Clone)]
struct Candidate {
    draft: AxisDraft,
    edge_distance: f64,
    min_id: MarkId,
    texts: BTreeSet<MarkId>,
    marks: BTreeSet<MarkId>,
}

fn along(o: AxisOrientation, r: &Rect) -> f64 {
    match o {
        AxisOrientation::X => r.center_x(),
        AxisOrientation::Y => r.center_y(),
    }
}

/// Key of the "same width, height, color, and mark type" assumption.
pub(crate) fn style_key(m: &ResolvedMark) -> String {
    let href = match &m.geometry {
        crate::svg::Geometry::Use { href, inner: crate::svg::MarkKind::Use, .. } => href.as_str(),
        _ => "",
    };
    format!(
        "{:?}|{:.1}|{:.1}|{}|{}|{:.2}|{}",
        m.shape_kind(),
        m.bbox.width(),
        m.bbox.height(),
        m.style.fill.as_deref().unwrap_or("-"),
        m.style.stroke.as_deref().unwrap_or("-"),
        m.style.stroke_width,
        href
    )
}

fn union(doc: &SvgDocument, ids: impl IntoIterator<Item = MarkId>) -> Option<Rect> {
    let boxes: Vec<Rect> = ids.into_iter().filter_map(|id| doc.mark(id).map(|m| m.bbox)).collect();
    Rect::union_all(&boxes)
}

fn dedup_clusters(mut sets: Vec<Vec<MarkId>>) -> Vec<Vec<MarkId>> {
    sets.sort();
    sets.dedup();
    sets
}

fn candidates(
    doc: &SvgDocument,
    orientation: AxisOrientation,
    texts: &[&ResolvedMark],
    others: &[&ResolvedMark],
    opts: &DeconstructOptions,
) -> Vec<Candidate> {
    let fields = match orientation {
        AxisOrientation::X => AlignField::HORIZONTAL_ROW,
        AxisOrientation::Y => AlignField::VERTICAL_COLUMN,
    };
    let threshold = opts.distance_fraction * doc.width.max(doc.height);
    let text_sets = dedup_clusters(
        fields
            .iter()
            .flat_map(|f| cluster_field(texts, *f, opts.align_tolerance, opts.min_axis_cluster))
            .map(|c| c.members)
            .collect(),
    );
    let mut groups: Vec<Vec<MarkId>> = Vec::new();
    for f in fields {
        for c in cluster_field(others, f, opts.align_tolerance, opts.min_axis_cluster) {
            let mut by_style: std::collections::BTreeMap<String, Vec<MarkId>> = Default::default();
            for id in c.members {
                if let Some(m) = doc.mark(id) {
                    by_style.entry(style_key(m)).or_default().push(id);
                }
            }
            groups.extend(by_style.into_values().filter(|g| g.len() >= 2));
        }
    }
    let groups = dedup_clusters(groups);

    let mut out = Vec::new();
    for t in &text_sets {
        let Some(tbox) = union(doc, t.iter().copied()) else { continue };
        let mut tsorted: Vec<(f64, MarkId)> = t.iter().map(|id| (along(orientation, &doc.marks[id.0].bbox), *id)).collect();
        tsorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for g in &groups {
            if g.len() < tsorted.len() {
                continue;
            }
            let Some(gbox) = union(doc, g.iter().copied()) else { continue };
            if tbox.gap(&gbox) > threshold {
                continue;
            }
            let mut gsorted: Vec<(f64, MarkId)> = g.iter().map(|id| (along(orientation, &doc.marks[id.0].bbox), *id)).collect();
            gsorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let a: Vec<f64> = tsorted.iter().map(|x| x.0).collect();
            let b: Vec<f64> = gsorted.iter().map(|x| x.0).collect();
            let Some((picks, total)) = ordered_pairing(&a, &b) else { continue };
            let chosen: Vec<f64> = picks.iter().map(|j| b[*j]).collect();
            if chosen.windows(2).any(|w| w[1] - w[0] <= opts.align_tolerance) {
                continue;
            }
            let min_gap = chosen.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
            let limit = (0.35 * min_gap).max(1.0);
            if a.iter().zip(&chosen).any(|(x, y)| (x - y).abs() > limit) {
                continue;
            }
            let pairs: Vec<(MarkId, MarkId, f64)> = tsorted
                .iter()
                .zip(&picks)
                .map(|(t, j)| (t.1, gsorted[*j].1, gsorted[*j].0))
                .collect();
            let used: BTreeSet<MarkId> = picks.iter().map(|j| gsorted[*j].1).collect();
            let orphans: Vec<MarkId> = g.iter().copied().filter(|id| !used.contains(id)).collect();
            let edge_distance = match orientation {
                AxisOrientation::X => gbox.center_y().min(doc.height - gbox.center_y()),
                AxisOrientation::Y => gbox.center_x().min(doc.width - gbox.center_x()),
            };
            let min_id = t.iter().chain(g.iter()).copied().min().unwrap_or(MarkId(0));
            out.push(Candidate {
                draft: AxisDraft {
                    orientation,
                    pairs,
                    orphans,
                    offset_sum: total,
                },
                edge_distance: edge_distance.abs(),
                min_id,
                texts: t.iter().copied().collect(),
                marks: g.iter().copied().collect(),
            });
        }
    }
    out
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    const EPS: f64 = 1e-6;
    if a.draft.pairs.len() != b.draft.pairs.len() {
        return a.draft.pairs.len() > b.draft.pairs.len();
    }
    if (a.draft.offset_sum - b.draft.offset_sum).abs() > EPS {
        return a.draft.offset_sum < b.draft.offset_sum;
    }
    if (a.edge_distance - b.edge_distance).abs() > EPS {
        return a.edge_distance < b.edge_distance;
    }
    a.min_id < b.min_id
}

/// Finds at most one x and one y axis among `available` marks.
pub(crate) fn infer_axes(
    doc: &SvgDocument,
    available: &BTreeSet<MarkId>,
    opts: &DeconstructOptions,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<AxisDraft> {
    let texts: Vec<&ResolvedMark> = doc
        .marks
        .iter()
        .filter(|m| available.contains(&m.id) && m.shape_kind() == crate::svg::MarkKind::Text)
        .collect();
    let others: Vec<&ResolvedMark> = doc
        .marks
        .iter()
        .filter(|m| available.contains(&m.id) && m.shape_kind() != crate::svg::MarkKind::Text)
        .collect();
    let mut all: Vec<Candidate> = candidates(doc, AxisOrientation::X, &texts, &others, opts);
    all.extend(candidates(doc, AxisOrientation::Y, &texts, &others, opts));

    let mut chosen: Vec<Candidate> = Vec::new();
    loop {
        let open: Vec<&Candidate> = all
            .iter()
            .filter(|c| chosen.iter().all(|k| k.draft.orientation != c.draft.orientation))
            .filter(|c| {
                chosen
                    .iter()
                    .all(|k| k.texts.is_disjoint(&c.texts) && k.marks.is_disjoint(&c.marks))
            })
            .collect();
        let Some(best) = open.iter().copied().reduce(|a, b| if better(b, a) { b } else { a }) else {
            break;
        };
        chosen.push(best.clone());
        if chosen.len() == 2 {
            break;
        }
    }
    for c in &all {
        let same_side: Vec<&Candidate> = chosen.iter().filter(|k| k.draft.orientation == c.draft.orientation).collect();
        if let Some(k) = same_side.first() {
            if k.texts.is_disjoint(&c.texts) && k.marks.is_disjoint(&c.marks) && chosen.iter().all(|o| o.texts.is_disjoint(&c.texts) && o.marks.is_disjoint(&c.marks)) {
                diagnostics.push(Diagnostic::new(
                    "dual-axis-rejected",
                    format!("second {:?} axis candidate ignored", c.draft.orientation),
                    c.texts.iter().copied().collect(),
                ));
            }
        }
    }
    for c in &chosen {
        if !c.draft.orphans.is_empty() {
            diagnostics.push(Diagnostic::new(
                "orphan-ticks",
                format!("{} tick marks without labels kept with the {:?} axis", c.draft.orphans.len(), c.draft.orientation),
                c.draft.orphans.clone(),
            ));
        }
    }
    chosen.sort_by_key(|c| c.draft.orientation);
    chosen.into_iter().map(|c| c.draft).collect()
}
