use serde::{Deserialize, Serialize};

use crate::svg::{MarkId, Rect, ResolvedMark};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AlignField {
    Left,
    Right,
    Top,
    Bottom,
    CenterX,
    CenterY,
}

impl AlignField {
    pub const ALL: [AlignField; 6] = [
        AlignField::Left,
        AlignField::Right,
        AlignField::Top,
        AlignField::Bottom,
        AlignField::CenterX,
        AlignField::CenterY,
    ];

    /// Fields whose alignment means "arranged along x" (one shared y).
    pub const HORIZONTAL_ROW: [AlignField; 3] = [AlignField::Top, AlignField::Bottom, AlignField::CenterY];
    /// Fields whose alignment means "stacked along y" (one shared x).
    pub const VERTICAL_COLUMN: [AlignField; 3] = [AlignField::Left, AlignField::Right, AlignField::CenterX];

    pub fn of(self, r: &Rect) -> f64 {
        match self {
            AlignField::Left => r.left,
            AlignField::Right => r.right,
            AlignField::Top => r.top,
            AlignField::Bottom => r.bottom,
            AlignField::CenterX => r.center_x(),
            AlignField::CenterY => r.center_y(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentCluster {
    pub field: AlignField,
    /// Sorted by id.
    pub members: Vec<MarkId>,
    pub shared: f64,
}

/// Groups marks whose `field` agrees within `tolerance` of a shared value.
pub fn cluster_field(marks: &[&ResolvedMark], field: AlignField, tolerance: f64, min_size: usize) -> Vec<AlignmentCluster> {
    let mut vals: Vec<(f64, MarkId)> = marks.iter().map(|m| (field.of(&m.bbox), m.id)).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    let mut i = 0;
    while i < vals.len() {
        let start = vals[i].0;
        let mut j = i + 1;
        while j < vals.len() && vals[j].0 - start <= 2.0 * tolerance {
            j += 1;
        }
        if j - i >= min_size {
            let mut members: Vec<MarkId> = vals[i..j].iter().map(|v| v.1).collect();
            members.sort();
            out.push(AlignmentCluster {
                field,
                members,
                shared: (start + vals[j - 1].0) / 2.0,
            });
        }
        i = j;
    }
    out
}

/// Alignment clusters for all six bounding-box fields.
pub fn cluster_by_alignment(marks: &[&ResolvedMark], tolerance: f64, min_size: usize) -> Vec<AlignmentCluster> {
    AlignField::ALL
        .iter()
        .flat_map(|f| cluster_field(marks, *f, tolerance, min_size))
        .collect()
}
