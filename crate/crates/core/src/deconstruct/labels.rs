//! Tick and legend label parsing.

use chrono::Datelike;

use crate::value::{date_ms, naive_date, parse_iso_date, MONTHS};

/// Labels of one axis or legend after type detection.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedLabels {
    Number(Vec<f64>),
    /// Epoch milliseconds.
    Date(Vec<i64>),
    Text(Vec<String>),
}

/// Year assumed for month labels that never state one.
pub const DEFAULT_YEAR: i32 = 2000;

/// Parses a formatted number. Accepts thousands separators, a leading
/// currency symbol, a trailing `%`, SI suffixes k/M/B, and the unicode minus.
pub fn parse_number(src: &str) -> Option<f64> {
    let mut s: String = src.trim().replace('\u{2212}', "-").replace('\u{2009}', "");
    if s.is_empty() {
        return None;
    }
    let negative = if let Some(rest) = s.strip_prefix('-') {
        s = rest.to_string();
        true
    } else if let Some(rest) = s.strip_prefix('+') {
        s = rest.to_string();
        false
    } else {
        false
    };
    for sym in ['$', '€', '£', '¥'] {
        if let Some(rest) = s.strip_prefix(sym) {
            s = rest.trim_start().to_string();
            break;
        }
    }
    if let Some(rest) = s.strip_suffix('%') {
        s = rest.trim_end().to_string();
    }
    let mut mult = 1.0;
    if let Some(last) = s.chars().last() {
        let m = match last {
            'k' | 'K' => Some(1e3),
            'M' => Some(1e6),
            'B' | 'G' => Some(1e9),
            'T' => Some(1e12),
            _ => None,
        };
        if let Some(m) = m {
            mult = m;
            s.pop();
        }
    }
    if s.contains(',') {
        let mut parts = s.split(',');
        let head = parts.next()?;
        if head.is_empty() || head.len() > 3 || !head.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut joined = head.to_string();
        for p in parts {
            let digits: String = p.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.len() != 3 {
                return None;
            }
            joined.push_str(p);
        }
        s = joined;
    }
    if s.is_empty() || !s.chars().next().map(|c| c.is_ascii_digit() || c == '.').unwrap_or(false) {
        return None;
    }
    let v: f64 = s.parse().ok()?;
    if !v.is_finite() {
        return None;
    }
    Some(if negative { -v } else { v } * mult)
}

/// A date label before year resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialDate {
    pub year: Option<i32>,
    pub month: u32,
    pub day: u32,
    /// Exact timestamp when the label was a full ISO value.
    pub exact: Option<i64>,
}

fn month_index(word: &str) -> Option<u32> {
    let w = word.trim_end_matches('.').to_ascii_lowercase();
    if w.len() < 3 {
        return None;
    }
    MONTHS.iter().position(|m| {
        let m = m.to_ascii_lowercase();
        m == w || (w.len() == 3 && m.starts_with(&w)) || (w == "sept" && m == "september")
    })
    .map(|i| i as u32 + 1)
}

fn year_token(tok: &str) -> Option<i32> {
    if tok.len() == 4 && tok.chars().all(|c| c.is_ascii_digit()) {
        let y: i32 = tok.parse().ok()?;
        if (1000..=2999).contains(&y) {
            return Some(y);
        }
    }
    None
}

/// Parses ISO-8601, `YYYY`, `Mon`, `Mon YYYY`, and `Mon DD` (full or
/// abbreviated month names).
pub fn parse_date(src: &str) -> Option<PartialDate> {
    let s = src.trim();
    if let Some(y) = year_token(s) {
        return Some(PartialDate {
            year: Some(y),
            month: 1,
            day: 1,
            exact: None,
        });
    }
    if s.len() >= 7 && s.as_bytes()[4] == b'-' || s.contains('/') {
        if let Some(ms) = parse_iso_date(s) {
            let d = naive_date(ms)?;
            return Some(PartialDate {
                year: Some(d.year()),
                month: d.month(),
                day: d.day(),
                exact: Some(ms),
            });
        }
    }
    let toks: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
    match toks.as_slice() {
        [m] => month_index(m).map(|month| PartialDate {
            year: None,
            month,
            day: 1,
            exact: None,
        }),
        [m, rest] => {
            let month = month_index(m)?;
            if let Some(y) = year_token(rest) {
                return Some(PartialDate {
                    year: Some(y),
                    month,
                    day: 1,
                    exact: None,
                });
            }
            let day: u32 = rest.parse().ok()?;
            if (1..=31).contains(&day) {
                Some(PartialDate {
                    year: None,
                    month,
                    day,
                    exact: None,
                })
            } else {
                None
            }
        }
        [m, d, y] => {
            let month = month_index(m)?;
            let day: u32 = d.parse().ok()?;
            let year = year_token(y)?;
            Some(PartialDate {
                year: Some(year),
                month,
                day,
                exact: None,
            })
        }
        _ => None,
    }
}

/// Assigns years to a positional sequence of partial dates. Labels without a
/// year inherit from their neighbours, advancing when the month wraps.
pub fn resolve_dates(parts: &[PartialDate]) -> Option<Vec<i64>> {
    let n = parts.len();
    let mut years: Vec<Option<i32>> = parts.iter().map(|p| p.year).collect();
    let key = |p: &PartialDate| (p.month, p.day);
    if let Some(first) = years.iter().position(|y| y.is_some()) {
        for i in first + 1..n {
            if years[i].is_none() {
                let prev = years[i - 1].unwrap_or(DEFAULT_YEAR);
                let wrap = parts[i - 1].exact.is_none() && key(&parts[i]) < key(&parts[i - 1]);
                years[i] = Some(if wrap { prev + 1 } else { prev });
            }
        }
        for i in (0..first).rev() {
            let next = years[i + 1].unwrap_or(DEFAULT_YEAR);
            let wrap = key(&parts[i]) > key(&parts[i + 1]) && parts[i + 1].exact.is_none();
            years[i] = Some(if wrap { next - 1 } else { next });
        }
    } else {
        let mut y = DEFAULT_YEAR;
        for i in 0..n {
            if i > 0 && key(&parts[i]) < key(&parts[i - 1]) {
                y += 1;
            }
            years[i] = Some(y);
        }
    }
    parts
        .iter()
        .zip(years)
        .map(|(p, y)| match p.exact {
            Some(ms) => Some(ms),
            None => date_ms(y.unwrap_or(DEFAULT_YEAR), p.month, p.day),
        })
        .collect()
}

/// Mixed numeric and non-numeric labels that are not all dates.
#[derive(Debug, Clone, PartialEq)]
pub struct InconsistentLabels {
    pub labels: Vec<String>,
}

/// Detects the label type of a positional label sequence: numeric, then
/// date, then plain text.
pub fn parse_labels(labels: &[String]) -> Result<ParsedLabels, InconsistentLabels> {
    let nums: Vec<Option<f64>> = labels.iter().map(|l| parse_number(l)).collect();
    if !labels.is_empty() && nums.iter().all(Option::is_some) {
        return Ok(ParsedLabels::Number(nums.into_iter().flatten().collect()));
    }
    let dates: Vec<Option<PartialDate>> = labels.iter().map(|l| parse_date(l)).collect();
    if !labels.is_empty() && dates.iter().all(Option::is_some) {
        let parts: Vec<PartialDate> = dates.into_iter().flatten().collect();
        if let Some(ms) = resolve_dates(&parts) {
            return Ok(ParsedLabels::Date(ms));
        }
    }
    if nums.iter().any(Option::is_some) {
        return Err(InconsistentLabels {
            labels: labels.to_vec(),
        });
    }
    Ok(ParsedLabels::Text(labels.to_vec()))
}
