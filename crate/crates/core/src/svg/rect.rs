use serde::{Deserialize, Serialize};

use super::TransformMatrix;

/// Axis-aligned box in root-SVG pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub left: f64,
    pub right: f64,
    pub top: f64,
    pub bottom: f64,
}

impl Rect {
    pub fn new(left: f64, right: f64, top: f64, bottom: f64) -> Self {
        Rect {
            left: left.min(right),
            right: left.max(right),
            top: top.min(bottom),
            bottom: top.max(bottom),
        }
    }

    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect::new(x, x + w, y, y + h)
    }

    pub fn from_points<I: IntoIterator<Item = (f64, f64)>>(points: I) -> Option<Rect> {
        let mut it = points.into_iter();
        let (x0, y0) = it.next()?;
        let mut r = Rect {
            left: x0,
            right: x0,
            top: y0,
            bottom: y0,
        };
        for (x, y) in it {
            r.left = r.left.min(x);
            r.right = r.right.max(x);
            r.top = r.top.min(y);
            r.bottom = r.bottom.max(y);
        }
        Some(r)
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center_x(&self) -> f64 {
        (self.left + self.right) / 2.0
    }

    pub fn center_y(&self) -> f64 {
        (self.top + self.bottom) / 2.0
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            left: self.left.min(other.left),
            right: self.right.max(other.right),
            top: self.top.min(other.top),
            bottom: self.bottom.max(other.bottom),
        }
    }

    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let r = Rect {
            left: self.left.max(other.left),
            right: self.right.min(other.right),
            top: self.top.max(other.top),
            bottom: self.bottom.min(other.bottom),
        };
        (r.left <= r.right && r.top <= r.bottom).then_some(r)
    }

    pub fn contains_point(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= self.left - tol && x <= self.right + tol && y >= self.top - tol && y <= self.bottom + tol
    }

    pub fn contains(&self, other: &Rect, tol: f64) -> bool {
        other.left >= self.left - tol
            && other.right <= self.right + tol
            && other.top >= self.top - tol
            && other.bottom <= self.bottom + tol
    }

    /// Euclidean gap between two boxes; zero when they overlap.
    pub fn gap(&self, other: &Rect) -> f64 {
        let dx = (other.left - self.right).max(self.left - other.right).max(0.0);
        let dy = (other.top - self.bottom).max(self.top - other.bottom).max(0.0);
        dx.hypot(dy)
    }

    /// Extent of this box's corners after mapping through `m`.
    pub fn transformed(&self, m: &TransformMatrix) -> Rect {
        let corners = [
            m.apply(self.left, self.top),
            m.apply(self.right, self.top),
            m.apply(self.left, self.bottom),
            m.apply(self.right, self.bottom),
        ];
        Rect::from_points(corners).expect("four corners")
    }

    pub fn union_all<'a, I: IntoIterator<Item = &'a Rect>>(rects: I) -> Option<Rect> {
        let mut it = rects.into_iter();
        let first = *it.next()?;
        Some(it.fold(first, |acc, r| acc.union(r)))
    }
}
