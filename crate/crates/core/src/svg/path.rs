//! Path data parsing, flattening, and shape classification.

use serde::{Deserialize, Serialize};

use super::{MarkKind, Rect, SvgError, TransformMatrix};

pub type Point = (f64, f64);

/// One absolute path segment. Arcs are kept as arcs so shape classification
/// can see them; flattening converts them to cubics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    MoveTo(Point),
    LineTo(Point),
    CubicTo(Point, Point, Point),
    QuadTo(Point, Point),
    ArcTo {
        rx: f64,
        ry: f64,
        rotation: f64,
        large_arc: bool,
        sweep: bool,
        to: Point,
    },
    Close,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathData {
    pub segments: Vec<Segment>,
}

struct Tokens<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn skip_sep(&mut self) {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || c == b',' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek_command(&mut self) -> Option<u8> {
        self.skip_sep();
        let c = *self.src.get(self.pos)?;
        c.is_ascii_alphabetic().then_some(c)
    }

    fn at_end(&mut self) -> bool {
        self.skip_sep();
        self.pos >= self.src.len()
    }

    fn number(&mut self) -> Option<f64> {
        self.skip_sep();
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        if i < s.len() && (s[i] == b'+' || s[i] == b'-') {
            i += 1;
        }
        let mut seen_digit = false;
        let mut seen_dot = false;
        while i < s.len() {
            match s[i] {
                b'0'..=b'9' => {
                    seen_digit = true;
                    i += 1;
                }
                b'.' if !seen_dot => {
                    seen_dot = true;
                    i += 1;
                }
                _ => break,
            }
        }
        if !seen_digit {
            return None;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        std::str::from_utf8(&s[start..i]).ok()?.parse().ok()
    }

    /// Arc flags may be written without separators (`a1 1 0 011 1`).
    fn flag(&mut self) -> Option<bool> {
        self.skip_sep();
        let c = *self.src.get(self.pos)?;
        match c {
            b'0' => {
                self.pos += 1;
                Some(false)
            }
            b'1' => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }
}

impl PathData {
    pub fn parse(d: &str) -> Result<PathData, SvgError> {
        let bad = |at: usize| SvgError::InvalidPathData(format!("{d:?} at byte {at}"));
        let mut t = Tokens {
            src: d.as_bytes(),
            pos: 0,
        };
        let mut segs = Vec::new();
        let mut cur: Point = (0.0, 0.0);
        let mut start: Point = (0.0, 0.0);
        let mut last_cubic_ctrl: Option<Point> = None;
        let mut last_quad_ctrl: Option<Point> = None;
        let mut cmd: Option<u8> = None;
        while !t.at_end() {
            let c = match t.peek_command() {
                Some(c) => {
                    t.pos += 1;
                    c
                }
                None => match cmd {
                    Some(b'M') => b'L',
                    Some(b'm') => b'l',
                    Some(b'Z') | Some(b'z') | None => return Err(bad(t.pos)),
                    Some(c) => c,
                },
            };
            if segs.is_empty() && c != b'M' && c != b'm' {
                return Err(bad(t.pos));
            }
            cmd = Some(c);
            let rel = c.is_ascii_lowercase();
            let off = |p: Point, cur: Point| if rel { (p.0 + cur.0, p.1 + cur.1) } else { p };
            let pt = |t: &mut Tokens| -> Result<Point, SvgError> {
                let x = t.number().ok_or_else(|| bad(t.pos))?;
                let y = t.number().ok_or_else(|| bad(t.pos))?;
                Ok((x, y))
            };
            let mut next_cubic = None;
            let mut next_quad = None;
            match c.to_ascii_uppercase() {
                b'M' => {
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::MoveTo(p));
                    cur = p;
                    start = p;
                }
                b'L' => {
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::LineTo(p));
                    cur = p;
                }
                b'H' => {
                    let x = t.number().ok_or_else(|| bad(t.pos))?;
                    let p = (if rel { cur.0 + x } else { x }, cur.1);
                    segs.push(Segment::LineTo(p));
                    cur = p;
                }
                b'V' => {
                    let y = t.number().ok_or_else(|| bad(t.pos))?;
                    let p = (cur.0, if rel { cur.1 + y } else { y });
                    segs.push(Segment::LineTo(p));
                    cur = p;
                }
                b'C' => {
                    let c1 = off(pt(&mut t)?, cur);
                    let c2 = off(pt(&mut t)?, cur);
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::CubicTo(c1, c2, p));
                    next_cubic = Some(c2);
                    cur = p;
                }
                b'S' => {
                    let c1 = match last_cubic_ctrl {
                        Some(lc) => (2.0 * cur.0 - lc.0, 2.0 * cur.1 - lc.1),
                        None => cur,
                    };
                    let c2 = off(pt(&mut t)?, cur);
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::CubicTo(c1, c2, p));
                    next_cubic = Some(c2);
                    cur = p;
                }
                b'Q' => {
                    let c1 = off(pt(&mut t)?, cur);
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::QuadTo(c1, p));
                    next_quad = Some(c1);
                    cur = p;
                }
                b'T' => {
                    let c1 = match last_quad_ctrl {
                        Some(lc) => (2.0 * cur.0 - lc.0, 2.0 * cur.1 - lc.1),
                        None => cur,
                    };
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::QuadTo(c1, p));
                    next_quad = Some(c1);
                    cur = p;
                }
                b'A' => {
                    let rx = t.number().ok_or_else(|| bad(t.pos))?;
                    let ry = t.number().ok_or_else(|| bad(t.pos))?;
                    let rotation = t.number().ok_or_else(|| bad(t.pos))?;
                    let large_arc = t.flag().ok_or_else(|| bad(t.pos))?;
                    let sweep = t.flag().ok_or_else(|| bad(t.pos))?;
                    let p = off(pt(&mut t)?, cur);
                    segs.push(Segment::ArcTo {
                        rx: rx.abs(),
                        ry: ry.abs(),
                        rotation,
                        large_arc,
                        sweep,
                        to: p,
                    });
                    cur = p;
                }
                b'Z' => {
                    segs.push(Segment::Close);
                    cur = start;
                }
                _ => return Err(bad(t.pos)),
            }
            last_cubic_ctrl = next_cubic;
            last_quad_ctrl = next_quad;
        }
        Ok(PathData { segments: segs })
    }

    /// Splits into subpaths; each starts with a MoveTo.
    pub fn subpaths(&self) -> Vec<&[Segment]> {
        let mut out = Vec::new();
        let mut begin = 0;
        for (i, s) in self.segments.iter().enumerate() {
            if matches!(s, Segment::MoveTo(_)) && i > begin {
                out.push(&self.segments[begin..i]);
                begin = i;
            }
        }
        if begin < self.segments.len() {
            out.push(&self.segments[begin..]);
        }
        out
    }

    /// On-curve points (segment end points) after mapping through `m`.
    pub fn vertices(&self, m: &TransformMatrix) -> Vec<Point> {
        let mut out = Vec::new();
        for s in &self.segments {
            let p = match s {
                Segment::MoveTo(p) => *p,
                Segment::LineTo(p) | Segment::CubicTo(_, _, p) | Segment::QuadTo(_, p) => *p,
                Segment::ArcTo { to, .. } => *to,
                Segment::Close => continue,
            };
            out.push(m.apply(p.0, p.1));
        }
        out
    }

    /// Flattens to polylines (one per subpath) in the coordinate space of `m`,
    /// with chord deviation at most `tolerance`.
    pub fn flatten(&self, m: &TransformMatrix, tolerance: f64) -> Vec<Vec<Point>> {
        let tol = tolerance.max(1e-6);
        let map = |p: Point| m.apply(p.0, p.1);
        let mut lines: Vec<Vec<Point>> = Vec::new();
        let mut current: Vec<Point> = Vec::new();
        let mut cur_local: Point = (0.0, 0.0);
        let mut start_local: Point = (0.0, 0.0);
        for s in &self.segments {
            match s {
                Segment::MoveTo(p) => {
                    if !current.is_empty() {
                        lines.push(std::mem::take(&mut current));
                    }
                    current.push(map(*p));
                    cur_local = *p;
                    start_local = *p;
                }
                Segment::LineTo(p) => {
                    current.push(map(*p));
                    cur_local = *p;
                }
                Segment::CubicTo(c1, c2, p) => {
                    flatten_cubic(map(cur_local), map(*c1), map(*c2), map(*p), tol, 0, &mut current);
                    cur_local = *p;
                }
                Segment::QuadTo(c, p) => {
                    let p0 = cur_local;
                    let c1 = (p0.0 + 2.0 / 3.0 * (c.0 - p0.0), p0.1 + 2.0 / 3.0 * (c.1 - p0.1));
                    let c2 = (p.0 + 2.0 / 3.0 * (c.0 - p.0), p.1 + 2.0 / 3.0 * (c.1 - p.1));
                    flatten_cubic(map(p0), map(c1), map(c2), map(*p), tol, 0, &mut current);
                    cur_local = *p;
                }
                Segment::ArcTo {
                    rx,
                    ry,
                    rotation,
                    large_arc,
                    sweep,
                    to,
                } => {
                    for (c1, c2, p) in arc_to_cubics(cur_local, *rx, *ry, *rotation, *large_arc, *sweep, *to) {
                        let p0 = *current.last().unwrap_or(&map(cur_local));
                        flatten_cubic(p0, map(c1), map(c2), map(p), tol, 0, &mut current);
                    }
                    cur_local = *to;
                }
                Segment::Close => {
                    current.push(map(start_local));
                    cur_local = start_local;
                }
            }
        }
        if !current.is_empty() {
            lines.push(current);
        }
        lines
    }

    pub fn bbox(&self, m: &TransformMatrix, tolerance: f64) -> Option<Rect> {
        Rect::from_points(self.flatten(m, tolerance).into_iter().flatten())
    }

    pub fn is_closed(&self) -> bool {
        let subs = self.subpaths();
        !subs.is_empty() && subs.iter().all(|sp| subpath_closed(sp))
    }
}

fn subpath_closed(sp: &[Segment]) -> bool {
    if sp.last() == Some(&Segment::Close) {
        return true;
    }
    let start = match sp.first() {
        Some(Segment::MoveTo(p)) => *p,
        _ => return false,
    };
    let end = match sp.last() {
        Some(Segment::LineTo(p)) | Some(Segment::CubicTo(_, _, p)) | Some(Segment::QuadTo(_, p)) => *p,
        Some(Segment::ArcTo { to, .. }) => *to,
        _ => return false,
    };
    sp.len() > 2 && (start.0 - end.0).abs() < 1e-6 && (start.1 - end.1).abs() < 1e-6
}

fn flatten_cubic(p0: Point, c1: Point, c2: Point, p3: Point, tol: f64, depth: u32, out: &mut Vec<Point>) {
    // Control-polygon distance from the chord bounds the curve's deviation.
    let d1 = dist_to_segment(c1, p0, p3);
    let d2 = dist_to_segment(c2, p0, p3);
    if depth >= 18 || d1.max(d2) <= tol {
        out.push(p3);
        return;
    }
    let mid = |a: Point, b: Point| ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    let p01 = mid(p0, c1);
    let p12 = mid(c1, c2);
    let p23 = mid(c2, p3);
    let p012 = mid(p01, p12);
    let p123 = mid(p12, p23);
    let m = mid(p012, p123);
    flatten_cubic(p0, p01, p012, m, tol, depth + 1, out);
    flatten_cubic(m, p123, p23, p3, tol, depth + 1, out);
}

fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 < 1e-18 {
        return (p.0 - a.0).hypot(p.1 - a.1);
    }
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Endpoint-parameterized elliptical arc to cubic Béziers (≤ 90° each).
pub fn arc_to_cubics(
    from: Point,
    rx: f64,
    ry: f64,
    rotation_deg: f64,
    large_arc: bool,
    sweep: bool,
    to: Point,
) -> Vec<(Point, Point, Point)> {
    if (from.0 - to.0).abs() < 1e-12 && (from.1 - to.1).abs() < 1e-12 {
        return Vec::new();
    }
    if rx < 1e-12 || ry < 1e-12 {
        return vec![(from, to, to)];
    }
    let (sin_phi, cos_phi) = rotation_deg.to_radians().sin_cos();
    let dx2 = (from.0 - to.0) / 2.0;
    let dy2 = (from.1 - to.1) / 2.0;
    let x1p = cos_phi * dx2 + sin_phi * dy2;
    let y1p = -sin_phi * dx2 + cos_phi * dy2;
    let (mut rx, mut ry) = (rx, ry);
    let lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if lambda > 1.0 {
        let s = lambda.sqrt();
        rx *= s;
        ry *= s;
    }
    let num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
    let den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
    let mut coef = (num / den).max(0.0).sqrt();
    if large_arc == sweep {
        coef = -coef;
    }
    let cxp = coef * rx * y1p / ry;
    let cyp = -coef * ry * x1p / rx;
    let cx = cos_phi * cxp - sin_phi * cyp + (from.0 + to.0) / 2.0;
    let cy = sin_phi * cxp + cos_phi * cyp + (from.1 + to.1) / 2.0;
    let angle = |ux: f64, uy: f64, vx: f64, vy: f64| {
        let dot = ux * vx + uy * vy;
        let len = (ux * ux + uy * uy).sqrt() * (vx * vx + vy * vy).sqrt();
        let mut a = (dot / len).clamp(-1.0, 1.0).acos();
        if ux * vy - uy * vx < 0.0 {
            a = -a;
        }
        a
    };
    let theta1 = angle(1.0, 0.0, (x1p - cxp) / rx, (y1p - cyp) / ry);
    let mut dtheta = angle(
        (x1p - cxp) / rx,
        (y1p - cyp) / ry,
        (-x1p - cxp) / rx,
        (-y1p - cyp) / ry,
    );
    if !sweep && dtheta > 0.0 {
        dtheta -= 2.0 * std::f64::consts::PI;
    } else if sweep && dtheta < 0.0 {
        dtheta += 2.0 * std::f64::consts::PI;
    }
    let n = (dtheta.abs() / (std::f64::consts::PI / 2.0)).ceil().max(1.0) as usize;
    let step = dtheta / n as f64;
    let k = 4.0 / 3.0 * (step / 4.0).tan();
    let ellipse = |t: f64| {
        let (s, c) = t.sin_cos();
        (
            cx + rx * c * cos_phi - ry * s * sin_phi,
            cy + rx * c * sin_phi + ry * s * cos_phi,
        )
    };
    let deriv = |t: f64| {
        let (s, c) = t.sin_cos();
        (
            -rx * s * cos_phi - ry * c * sin_phi,
            -rx * s * sin_phi + ry * c * cos_phi,
        )
    };
    let mut out = Vec::with_capacity(n);
    let mut t = theta1;
    for i in 0..n {
        let t2 = t + step;
        let p0 = ellipse(t);
        let p3 = if i + 1 == n { to } else { ellipse(t2) };
        let d0 = deriv(t);
        let d3 = deriv(t2);
        let c1 = (p0.0 + k * d0.0, p0.1 + k * d0.1);
        let c2 = (p3.0 - k * d3.0, p3.1 - k * d3.1);
        out.push((c1, c2, p3));
        t = t2;
    }
    out
}

const ORTHO_TOL: f64 = 1e-3;

/// Categorizes a path by its commands. `axes_extents` (root coordinates)
/// enables the polygon → area reclassification; `m` maps the path into root
/// coordinates for that comparison.
pub fn classify_path(
    path: &PathData,
    m: &TransformMatrix,
    axes_extents: Option<&[Rect]>,
    align_tolerance: f64,
) -> MarkKind {
    let subs = path.subpaths();
    let drawing = path
        .segments
        .iter()
        .any(|s| !matches!(s, Segment::MoveTo(_) | Segment::Close));
    if subs.is_empty() || !drawing {
        return MarkKind::PathGeneric;
    }
    let closed: Vec<bool> = subs.iter().map(|sp| subpath_closed(sp)).collect();
    if closed.iter().all(|c| !c) {
        return MarkKind::Line;
    }
    if closed.iter().any(|c| !c) {
        return MarkKind::PathGeneric;
    }
    if subs.len() == 1 {
        if is_rectangle(subs[0]) {
            return MarkKind::Rectangle;
        }
        if is_ellipse(subs[0]) {
            return MarkKind::Ellipse;
        }
    }
    if let Some(extents) = axes_extents {
        if let Some(bb) = path.bbox(m, 0.1) {
            for ext in extents {
                let horizontal = ext.width() >= ext.height();
                let matches = if horizontal {
                    (bb.width() - ext.width()).abs() <= align_tolerance
                } else {
                    (bb.height() - ext.height()).abs() <= align_tolerance
                };
                if matches {
                    return MarkKind::Area;
                }
            }
        }
    }
    MarkKind::Polygon
}

fn is_rectangle(sp: &[Segment]) -> bool {
    let mut pts: Vec<Point> = Vec::new();
    for s in sp {
        match s {
            Segment::MoveTo(p) | Segment::LineTo(p) => pts.push(*p),
            Segment::Close => {}
            _ => return false,
        }
    }
    if let (Some(f), Some(l)) = (pts.first().copied(), pts.last().copied()) {
        if pts.len() > 1 && (f.0 - l.0).abs() < ORTHO_TOL && (f.1 - l.1).abs() < ORTHO_TOL {
            pts.pop();
        }
    }
    if pts.len() != 4 {
        return false;
    }
    let edges_ortho = (0..4).all(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % 4];
        (a.0 - b.0).abs() < ORTHO_TOL || (a.1 - b.1).abs() < ORTHO_TOL
    });
    let alternating = (0..4).all(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % 4];
        let c = pts[(i + 2) % 4];
        let h1 = (a.1 - b.1).abs() < ORTHO_TOL;
        let h2 = (b.1 - c.1).abs() < ORTHO_TOL;
        h1 != h2
    });
    edges_ortho && alternating
}

fn is_ellipse(sp: &[Segment]) -> bool {
    let curves = sp
        .iter()
        .filter(|s| matches!(s, Segment::CubicTo(..) | Segment::QuadTo(..) | Segment::ArcTo { .. }))
        .count();
    let lines = sp.iter().filter(|s| matches!(s, Segment::LineTo(_))).count();
    if lines > 0 || curves == 0 {
        return false;
    }
    let has_arc = sp.iter().any(|s| matches!(s, Segment::ArcTo { .. }));
    if !has_arc && curves < 4 {
        return false;
    }
    let data = PathData {
        segments: sp.to_vec(),
    };
    let pts: Vec<Point> = data
        .flatten(&TransformMatrix::IDENTITY, 0.01)
        .into_iter()
        .flatten()
        .collect();
    let Some(bb) = Rect::from_points(pts.iter().copied()) else {
        return false;
    };
    let (rx, ry) = (bb.width() / 2.0, bb.height() / 2.0);
    if rx < 1e-9 || ry < 1e-9 {
        return false;
    }
    let (cx, cy) = (bb.center_x(), bb.center_y());
    pts.iter().all(|p| {
        let v = ((p.0 - cx) / rx).powi(2) + ((p.1 - cy) / ry).powi(2);
        (v - 1.0).abs() < 0.05
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(d: &str) -> MarkKind {
        classify_path(&PathData::parse(d).unwrap(), &TransformMatrix::IDENTITY, None, 0.5)
    }

    #[test]
    fn explicit_close_is_polygon() {
        assert_eq!(kind("M0 0 L10 0 L10 10 Z"), MarkKind::Polygon);
    }

    #[test]
    fn open_polyline_is_line() {
        assert_eq!(kind("M0 5 L5 3 L10 8"), MarkKind::Line);
    }

    #[test]
    fn move_back_to_start_closes() {
        assert_eq!(kind("M0 0 L10 0 L5 8 L0 0"), MarkKind::Polygon);
    }

    #[test]
    fn orthogonal_box_is_rectangle() {
        assert_eq!(kind("M0,0h20v50h-20Z"), MarkKind::Rectangle);
        assert_eq!(kind("M10 10 H30 V40 H10 Z"), MarkKind::Rectangle);
    }

    #[test]
    fn arc_circle_is_ellipse() {
        assert_eq!(kind("M0,-5A5,5,0,1,1,0,5A5,5,0,1,1,0,-5Z"), MarkKind::Ellipse);
    }

    #[test]
    fn cubic_circle_is_ellipse() {
        let d = "M 0 3 C 0.795609 3 1.55874 2.683901 2.12132 2.12132 C 2.683901 1.55874 3 0.795609 3 0 \
                 C 3 -0.795609 2.683901 -1.55874 2.12132 -2.12132 C 1.55874 -2.683901 0.795609 -3 0 -3 \
                 C -0.795609 -3 -1.55874 -2.683901 -2.12132 -2.12132 C -2.683901 -1.55874 -3 -0.795609 -3 0 \
                 C -3 0.795609 -2.683901 1.55874 -2.12132 2.12132 C -1.55874 2.683901 -0.795609 3 0 3 z";
        assert_eq!(kind(d), MarkKind::Ellipse);
    }

    #[test]
    fn move_only_is_generic() {
        assert_eq!(kind("M0 0"), MarkKind::PathGeneric);
    }

    #[test]
    fn mixed_open_closed_is_generic() {
        assert_eq!(kind("M0 0 L5 5 M10 10 L20 10 L20 20 Z"), MarkKind::PathGeneric);
    }

    #[test]
    fn polygon_spanning_axis_is_area() {
        let p = PathData::parse("M0 50 L100 40 L200 60 L200 100 L0 100 Z").unwrap();
        let axis = Rect::new(0.0, 200.0, 100.0, 110.0);
        let k = classify_path(&p, &TransformMatrix::IDENTITY, Some(&[axis]), 0.5);
        assert_eq!(k, MarkKind::Area);
        let narrow = Rect::new(0.0, 300.0, 100.0, 110.0);
        let k = classify_path(&p, &TransformMatrix::IDENTITY, Some(&[narrow]), 0.5);
        assert_eq!(k, MarkKind::Polygon);
    }

    #[test]
    fn compact_number_syntax() {
        let p = PathData::parse("M-.5.5l1-1e1").unwrap();
        assert_eq!(p.segments[0], Segment::MoveTo((-0.5, 0.5)));
        assert_eq!(p.segments[1], Segment::LineTo((0.5, -9.5)));
    }

    #[test]
    fn arc_flags_without_separators() {
        let p = PathData::parse("M0 0a5 5 0 015 5").unwrap();
        assert!(matches!(p.segments[1], Segment::ArcTo { large_arc: false, sweep: true, .. }));
    }

    #[test]
    fn invalid_data_errors() {
        assert!(PathData::parse("M0 0 L10").is_err());
        assert!(PathData::parse("L10 10").is_err());
        assert!(PathData::parse("M0 0 X2").is_err());
    }

    #[test]
    fn cubic_bbox_matches_dense_sampling() {
        // dense-sampling oracle over the cubic M0 0 C0 10 10 10 10 0
        let n = 10_000;
        let mut top_oracle = f64::NEG_INFINITY;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            let mt = 1.0 - t;
            let y = 3.0 * mt * mt * t * 10.0 + 3.0 * mt * t * t * 10.0;
            top_oracle = top_oracle.max(y);
        }
        assert!((top_oracle - 7.5).abs() < 1e-6);
        let p = PathData::parse("M0 0 C0 10 10 10 10 0").unwrap();
        let bb = p.bbox(&TransformMatrix::IDENTITY, 0.1).unwrap();
        assert!((bb.bottom - top_oracle).abs() <= 0.1);
        assert!(bb.bottom <= top_oracle + 1e-9);
        // flipped so the extremum is the box top
        let flip = TransformMatrix::scale(1.0, -1.0).then_inner(&TransformMatrix::translate(0.0, -10.0));
        let bb = p.bbox(&flip, 0.1).unwrap();
        assert!((bb.top - 2.5).abs() <= 0.1, "top {}", bb.top);
    }
}
