use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SvgError;

/// Resolved presentation style of a mark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Style {
    /// Normalized color (`#rrggbb` when recognizable), `None` for `none`.
    pub fill: Option<String>,
    pub stroke: Option<String>,
    pub stroke_width: f64,
    /// Product of `opacity` along the ancestor chain.
    pub opacity: f64,
    pub font_size: f64,
}

impl Style {
    /// Color carried by the mark for legend lookup: fill, falling back to stroke.
    pub fn color_key(&self) -> Option<&str> {
        self.fill.as_deref().or(self.stroke.as_deref())
    }
}

/// Properties that cascade from ancestors to descendants.
pub(crate) const INHERITED: &[&str] = &[
    "fill",
    "stroke",
    "stroke-width",
    "font-size",
    "font-family",
    "text-anchor",
    "dominant-baseline",
    "color",
    "fill-opacity",
    "stroke-opacity",
    "visibility",
];

/// Presentation properties recognized from attributes and inline `style`.
pub(crate) const PRESENTATION: &[&str] = &[
    "fill",
    "stroke",
    "stroke-width",
    "font-size",
    "font-family",
    "text-anchor",
    "dominant-baseline",
    "color",
    "fill-opacity",
    "stroke-opacity",
    "visibility",
    "opacity",
    "display",
];

/// Parses `a: b; c: d` declarations. The `font` shorthand contributes its size.
pub(crate) fn parse_inline_style(src: &str) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for decl in src.split(';') {
        let Some((k, v)) = decl.split_once(':') else {
            continue;
        };
        let k = k.trim().to_ascii_lowercase();
        let v = v.trim().trim_end_matches("!important").trim().to_string();
        if k == "font" {
            if let Some(size) = v.split_whitespace().find_map(|tok| {
                let tok = tok.split('/').next().unwrap_or(tok);
                let num = tok.strip_suffix("px").unwrap_or(tok);
                num.parse::<f64>().ok().map(|_| tok.to_string())
            }) {
                out.insert("font-size".to_string(), size);
            }
            continue;
        }
        out.insert(k, v);
    }
    out
}

/// Parses a user-space length. Plain numbers and `px` are accepted; any other
/// unit is rejected. `em` is accepted only when `em_base` is provided.
pub(crate) fn parse_length(src: &str, em_base: Option<f64>) -> Result<f64, SvgError> {
    let s = src.trim();
    let unsupported = || SvgError::UnsupportedUnit(s.to_string());
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    if let Some(n) = s.strip_suffix("px") {
        return n.trim().parse::<f64>().map_err(|_| unsupported());
    }
    if let (Some(n), Some(base)) = (s.strip_suffix("em"), em_base) {
        return n.trim().parse::<f64>().map(|v| v * base).map_err(|_| unsupported());
    }
    Err(unsupported())
}

/// Normalizes a color string. Unknown values are kept lowercase so they still
/// work as equality keys.
pub(crate) fn normalize_color(src: &str, current_color: Option<&str>) -> Option<String> {
    let s = src.trim().to_ascii_lowercase();
    if s.is_empty() || s == "none" || s == "transparent" {
        return None;
    }
    if s == "currentcolor" {
        return Some(current_color.map(|c| c.to_string()).unwrap_or_else(|| "#000000".into()));
    }
    if let Some(hex) = s.strip_prefix('#') {
        let expand = |h: &str| -> Option<String> {
            match h.len() {
                3 | 4 => Some(h.chars().take(3).flat_map(|c| [c, c]).collect()),
                6 | 8 => Some(h[..6].to_string()),
                _ => None,
            }
        };
        if hex.chars().all(|c| c.is_ascii_hexdigit()) {
            if let Some(full) = expand(hex) {
                return Some(format!("#{full}"));
            }
        }
        return Some(s);
    }
    if let Some(inner) = s.strip_prefix("rgba(").or_else(|| s.strip_prefix("rgb(")) {
        let inner = inner.trim_end_matches(')');
        let parts: Vec<&str> = inner
            .split(|c: char| c == ',' || c.is_whitespace() || c == '/')
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() >= 3 {
            let chan = |p: &str| -> Option<u8> {
                if let Some(pct) = p.strip_suffix('%') {
                    pct.parse::<f64>().ok().map(|v| (v.clamp(0.0, 100.0) * 2.55).round() as u8)
                } else {
                    p.parse::<f64>().ok().map(|v| v.clamp(0.0, 255.0).round() as u8)
                }
            };
            if let (Some(r), Some(g), Some(b)) = (chan(parts[0]), chan(parts[1]), chan(parts[2])) {
                return Some(format!("#{r:02x}{g:02x}{b:02x}"));
            }
        }
        return Some(s);
    }
    match named_color(&s) {
        Some(hex) => Some(hex.to_string()),
        None => Some(s),
    }
}

fn named_color(name: &str) -> Option<&'static str> {
    Some(match name {
        "black" => "#000000",
        "white" => "#ffffff",
        "red" => "#ff0000",
        "green" => "#008000",
        "lime" => "#00ff00",
        "blue" => "#0000ff",
        "yellow" => "#ffff00",
        "cyan" | "aqua" => "#00ffff",
        "magenta" | "fuchsia" => "#ff00ff",
        "gray" | "grey" => "#808080",
        "darkgray" | "darkgrey" => "#a9a9a9",
        "lightgray" | "lightgrey" => "#d3d3d3",
        "dimgray" | "dimgrey" => "#696969",
        "silver" => "#c0c0c0",
        "whitesmoke" => "#f5f5f5",
        "gainsboro" => "#dcdcdc",
        "maroon" => "#800000",
        "navy" => "#000080",
        "olive" => "#808000",
        "purple" => "#800080",
        "teal" => "#008080",
        "orange" => "#ffa500",
        "darkorange" => "#ff8c00",
        "steelblue" => "#4682b4",
        "salmon" => "#fa8072",
        "tomato" => "#ff6347",
        "gold" => "#ffd700",
        "pink" => "#ffc0cb",
        "brown" => "#a52a2a",
        "crimson" => "#dc143c",
        "coral" => "#ff7f50",
        "darkblue" => "#00008b",
        "darkgreen" => "#006400",
        "darkred" => "#8b0000",
        "forestgreen" => "#228b22",
        "indigo" => "#4b0082",
        "violet" => "#ee82ee",
        "orchid" => "#da70d6",
        "skyblue" => "#87ceeb",
        "lightblue" => "#add8e6",
        "seagreen" => "#2e8b57",
        "slategray" | "slategrey" => "#708090",
        "tan" => "#d2b48c",
        "khaki" => "#f0e68c",
        "chocolate" => "#d2691e",
        "firebrick" => "#b22222",
        "royalblue" => "#4169e1",
        "turquoise" => "#40e0d0",
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn color_forms_agree() {
        let a = normalize_color("#FFF", None);
        let b = normalize_color("white", None);
        let c = normalize_color("rgb(255, 255, 255)", None);
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert_eq!(normalize_color("none", None), None);
        assert_eq!(normalize_color("currentColor", Some("#123456")).as_deref(), Some("#123456"));
    }

    #[test]
    fn lengths_reject_units() {
        assert_eq!(parse_length("12", None).unwrap(), 12.0);
        assert_eq!(parse_length("12px", None).unwrap(), 12.0);
        assert!(matches!(parse_length("2em", None), Err(SvgError::UnsupportedUnit(_))));
        assert!(matches!(parse_length("50%", None), Err(SvgError::UnsupportedUnit(_))));
        assert_eq!(parse_length("0.5em", Some(10.0)).unwrap(), 5.0);
    }

    #[test]
    fn font_shorthand_yields_size() {
        let m = parse_inline_style("font: 10px 'DejaVu Sans'; text-anchor: middle");
        assert_eq!(m.get("font-size").map(String::as_str), Some("10px"));
        assert_eq!(m.get("text-anchor").map(String::as_str), Some("middle"));
    }
}
