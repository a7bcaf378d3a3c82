use serde::{Deserialize, Serialize};

use super::SvgError;

/// 2D affine map `(x, y) -> (a·x + c·y + e, b·x + d·y + f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for TransformMatrix {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl TransformMatrix {
    pub const IDENTITY: TransformMatrix = TransformMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self { a, b, c, d, e, f }
    }

    pub fn translate(tx: f64, ty: f64) -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0, tx, ty)
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Self::new(sx, 0.0, 0.0, sy, 0.0, 0.0)
    }

    /// Rotation by `deg` degrees (clockwise in screen space, as in SVG).
    pub fn rotate(deg: f64) -> Self {
        let (s, c) = deg.to_radians().sin_cos();
        Self::new(c, s, -s, c, 0.0, 0.0)
    }

    pub fn rotate_about(deg: f64, cx: f64, cy: f64) -> Self {
        Self::translate(cx, cy)
            .then_inner(&Self::rotate(deg))
            .then_inner(&Self::translate(-cx, -cy))
    }

    pub fn skew_x(deg: f64) -> Self {
        Self::new(1.0, 0.0, deg.to_radians().tan(), 1.0, 0.0, 0.0)
    }

    pub fn skew_y(deg: f64) -> Self {
        Self::new(1.0, deg.to_radians().tan(), 0.0, 1.0, 0.0, 0.0)
    }

    /// `self ∘ inner`: the returned matrix applies `inner` first, then `self`.
    pub fn then_inner(&self, inner: &TransformMatrix) -> TransformMatrix {
        TransformMatrix {
            a: self.a * inner.a + self.c * inner.b,
            b: self.b * inner.a + self.d * inner.b,
            c: self.a * inner.c + self.c * inner.d,
            d: self.b * inner.c + self.d * inner.d,
            e: self.a * inner.e + self.c * inner.f + self.e,
            f: self.b * inner.e + self.d * inner.f + self.f,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.a * x + self.c * y + self.e,
            self.b * x + self.d * y + self.f,
        )
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_invertible(&self) -> bool {
        let det = self.det();
        det.is_finite() && det.abs() > 1e-12
    }

    pub fn inverse(&self) -> Option<TransformMatrix> {
        if !self.is_invertible() {
            return None;
        }
        let det = self.det();
        let a = self.d / det;
        let b = -self.b / det;
        let c = -self.c / det;
        let d = self.a / det;
        Some(TransformMatrix {
            a,
            b,
            c,
            d,
            e: -(a * self.e + c * self.f),
            f: -(b * self.e + d * self.f),
        })
    }

    /// True when the map has no rotation or skew component.
    pub fn is_axis_aligned(&self) -> bool {
        self.b.abs() < 1e-12 && self.c.abs() < 1e-12
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Rotation angle of the x basis vector, in degrees.
    pub fn rotation_deg(&self) -> f64 {
        self.b.atan2(self.a).to_degrees()
    }

    pub fn to_svg(&self) -> String {
        format!(
            "matrix({} {} {} {} {} {})",
            fmt_num(self.a),
            fmt_num(self.b),
            fmt_num(self.c),
            fmt_num(self.d),
            fmt_num(self.e),
            fmt_num(self.f)
        )
    }

    /// Parses an SVG `transform` list such as `translate(50,10) scale(2)`.
    pub fn parse_list(src: &str) -> Result<TransformMatrix, SvgError> {
        let bad = || SvgError::InvalidTransform(src.to_string());
        let mut m = TransformMatrix::IDENTITY;
        let mut rest = src.trim();
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if rest.is_empty() {
                break;
            }
            let open = rest.find('(').ok_or_else(bad)?;
            let close = rest.find(')').ok_or_else(bad)?;
            if close < open {
                return Err(bad());
            }
            let name = rest[..open].trim();
            let args: Vec<f64> = rest[open + 1..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            let t = match (name, args.as_slice()) {
                ("translate", [tx]) => Self::translate(*tx, 0.0),
                ("translate", [tx, ty]) => Self::translate(*tx, *ty),
                ("scale", [s]) => Self::scale(*s, *s),
                ("scale", [sx, sy]) => Self::scale(*sx, *sy),
                ("rotate", [deg]) => Self::rotate(*deg),
                ("rotate", [deg, cx, cy]) => Self::rotate_about(*deg, *cx, *cy),
                ("skewX", [deg]) => Self::skew_x(*deg),
                ("skewY", [deg]) => Self::skew_y(*deg),
                ("matrix", [a, b, c, d, e, f]) => Self::new(*a, *b, *c, *d, *e, *f),
                _ => return Err(bad()),
            };
            m = m.then_inner(&t);
            rest = &rest[close + 1..];
        }
        Ok(m)
    }
}

/// Shortest round-trip formatting with `-0` folded to `0`.
pub(crate) fn fmt_num(v: f64) -> String {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 {
        return "0".to_string();
    }
    format!("{}", r)
}
