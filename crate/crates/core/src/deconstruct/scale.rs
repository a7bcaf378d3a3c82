//! Axis scales and their inversion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::labels::{parse_labels, ParsedLabels};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Scale {
    Linear { domain: [f64; 2], range: [f64; 2] },
    /// Positive domain; positions are linear in `ln(value)`.
    Log { domain: [f64; 2], range: [f64; 2] },
    /// Domain in epoch milliseconds.
    Date { domain: [f64; 2], range: [f64; 2] },
    Categorical { labels: Vec<String>, positions: Vec<f64> },
    Identity { range: [f64; 2] },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScaleError {
    #[error("scale has an empty domain or range")]
    EmptyScale,
    #[error("tick labels mix numbers and text: {0:?}")]
    InconsistentLabels(Vec<String>),
}

fn lerp_t(range: &[f64; 2], px: f64) -> Option<f64> {
    let span = range[1] - range[0];
    if span == 0.0 || !span.is_finite() {
        return None;
    }
    Some((px - range[0]) / span)
}

impl Scale {
    pub fn is_continuous(&self) -> bool {
        !matches!(self, Scale::Categorical { .. })
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, Scale::Categorical { .. })
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Scale::Identity { .. })
    }

    /// Maps a continuous domain value (epoch ms for dates) to pixels.
    pub fn apply(&self, v: f64) -> Option<f64> {
        match self {
            Scale::Linear { domain, range } | Scale::Date { domain, range } => {
                let span = domain[1] - domain[0];
                if span == 0.0 {
                    return None;
                }
                Some(range[0] + (v - domain[0]) / span * (range[1] - range[0]))
            }
            Scale::Log { domain, range } => {
                if v <= 0.0 || domain[0] <= 0.0 || domain[1] <= 0.0 || domain[0] == domain[1] {
                    return None;
                }
                let t = (v / domain[0]).ln() / (domain[1] / domain[0]).ln();
                Some(range[0] + t * (range[1] - range[0]))
            }
            Scale::Identity { .. } => Some(v),
            Scale::Categorical { .. } => None,
        }
    }

    /// Maps a cell value to pixels; categorical labels map to their band centre.
    pub fn apply_value(&self, v: &Value) -> Option<f64> {
        match (self, v) {
            (Scale::Categorical { labels, positions }, Value::Text(t)) => {
                labels.iter().position(|l| l == t).map(|i| positions[i])
            }
            (Scale::Categorical { labels, positions }, other) => {
                let r = other.render();
                labels.iter().position(|l| *l == r).map(|i| positions[i])
            }
            (_, other) => other.as_f64().and_then(|x| self.apply(x)),
        }
    }

    /// Continuous inverse; `None` for categorical or degenerate scales.
    pub fn invert_f64(&self, px: f64) -> Option<f64> {
        match self {
            Scale::Linear { domain, range } | Scale::Date { domain, range } => {
                lerp_t(range, px).map(|t| domain[0] + t * (domain[1] - domain[0]))
            }
            Scale::Log { domain, range } => {
                if domain[0] <= 0.0 || domain[1] <= 0.0 {
                    return None;
                }
                lerp_t(range, px).map(|t| domain[0] * (domain[1] / domain[0]).powf(t))
            }
            Scale::Identity { .. } => Some(px),
            Scale::Categorical { .. } => None,
        }
    }

    /// Pixel to data value. Categorical scales snap to the nearest band.
    pub fn invert(&self, px: f64) -> Result<Value, ScaleError> {
        match self {
            Scale::Categorical { labels, positions } => {
                if labels.is_empty() {
                    return Err(ScaleError::EmptyScale);
                }
                let mut best = 0;
                for (i, p) in positions.iter().enumerate() {
                    if (p - px).abs() < (positions[best] - px).abs() {
                        best = i;
                    }
                }
                Ok(Value::Text(labels[best].clone()))
            }
            Scale::Date { .. } => self
                .invert_f64(px)
                .map(|ms| Value::Date(ms.round() as i64))
                .ok_or(ScaleError::EmptyScale),
            _ => self.invert_f64(px).map(Value::Number).ok_or(ScaleError::EmptyScale),
        }
    }

    /// Extreme pixel positions covered by the scale.
    pub fn pixel_range(&self) -> [f64; 2] {
        match self {
            Scale::Linear { range, .. } | Scale::Log { range, .. } | Scale::Date { range, .. } | Scale::Identity { range } => {
                *range
            }
            Scale::Categorical { positions, .. } => [
                positions.first().copied().unwrap_or(0.0),
                positions.last().copied().unwrap_or(0.0),
            ],
        }
    }
}

/// Relative tolerance for deciding whether ticks fit a linear or log model.
const FIT_TOLERANCE: f64 = 0.005;

fn max_residual(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let span = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
    if span == 0.0 {
        return None;
    }
    Some(xs.iter().zip(ys).map(|(x, y)| (y - (slope * x + icpt)).abs()).fold(0.0, f64::max) / span)
}

fn strictly_monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0]) || v.windows(2).all(|w| w[1] < w[0])
}

fn extremes(values: &[f64], positions: &[f64]) -> ([f64; 2], [f64; 2]) {
    let (mut lo, mut hi) = (0, 0);
    for i in 0..values.len() {
        if values[i] < values[lo] {
            lo = i;
        }
        if values[i] > values[hi] {
            hi = i;
        }
    }
    ([values[lo], values[hi]], [positions[lo], positions[hi]])
}

/// Outcome of scale inference for one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct InferredScale {
    pub scale: Scale,
    /// Parsed tick values in tick order (continuous scales only).
    pub values: Vec<Value>,
    pub note: Option<String>,
}

/// Builds a scale from tick labels and their centred pixel positions, both in
/// positional order.
pub fn infer_scale(labels: &[String], positions: &[f64]) -> Result<InferredScale, ScaleError> {
    if labels.is_empty() || labels.len() != positions.len() {
        return Err(ScaleError::EmptyScale);
    }
    let parsed = parse_labels(labels).map_err(|e| ScaleError::InconsistentLabels(e.labels))?;
    let categorical = |note: Option<String>| InferredScale {
        scale: Scale::Categorical {
            labels: labels.to_vec(),
            positions: positions.to_vec(),
        },
        values: labels.iter().map(|l| Value::Text(l.clone())).collect(),
        note,
    };
    match parsed {
        ParsedLabels::Text(_) => Ok(categorical(None)),
        ParsedLabels::Number(values) => {
            if values.len() < 2 || !strictly_monotone(&values) {
                return Ok(categorical(Some("numeric labels are not monotone; treated as categories".into())));
            }
            let lin = max_residual(&values, positions).unwrap_or(f64::INFINITY);
            let log = if values.len() >= 3 && values.iter().all(|v| *v > 0.0) {
                let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
                max_residual(&logs, positions).unwrap_or(f64::INFINITY)
            } else {
                f64::INFINITY
            };
            let (domain, range) = extremes(&values, positions);
            let vals = values.iter().map(|v| Value::Number(*v)).collect();
            if lin > FIT_TOLERANCE && log <= FIT_TOLERANCE {
                Ok(InferredScale {
                    scale: Scale::Log { domain, range },
                    values: vals,
                    note: None,
                })
            } else {
                let note = (lin > FIT_TOLERANCE).then(|| format!("ticks deviate from a linear fit by {:.3} of the range", lin));
                Ok(InferredScale {
                    scale: Scale::Linear { domain, range },
                    values: vals,
                    note,
                })
            }
        }
        ParsedLabels::Date(ms) => {
            let values: Vec<f64> = ms.iter().map(|m| *m as f64).collect();
            if values.len() < 2 || !strictly_monotone(&values) {
                return Ok(categorical(Some("date labels are not monotone; treated as categories".into())));
            }
            let (domain, range) = extremes(&values, positions);
            Ok(InferredScale {
                scale: Scale::Date { domain, range },
                values: ms.iter().map(|m| Value::Date(*m)).collect(),
                note: None,
            })
        }
    }
}
