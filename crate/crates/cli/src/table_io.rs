//! Behavior table files.
//!
//! ```json
//! { "settings": [2, 2], "outcomes": [2, 2], "px": [p0000, p0001, ..., p1111] }
//! ```
//!
//! `px` lists `P(a, b | x, y)` in `(x, y, a, b)` lexicographic order with the
//! outcome `+1` before `−1`. `settings` and `outcomes` are optional on input but
//! must equal `[2, 2]` when present.

use std::fs;
use std::path::Path;

use nonlocal_core::behavior::MALFORMED_TOLERANCE;
use nonlocal_core::BehaviorTable;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::format::to_json;

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    settings: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcomes: Option<[usize; 2]>,
    px: Vec<f64>,
}

/// Parses the 16 raw probabilities without checking normalization.
pub fn parse_raw(text: &str, path: &Path) -> Result<[f64; 16]> {
    let bad = |reason: String| CliError::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let file: TableFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    for (name, shape) in [("settings", file.settings), ("outcomes", file.outcomes)] {
        if let Some(s) = shape {
            if s != [2, 2] {
                return Err(bad(format!("{name} must be [2, 2], found {s:?}")));
            }
        }
    }
    let px: [f64; 16] = file
        .px
        .try_into()
        .map_err(|v: Vec<f64>| bad(format!("px needs 16 entries, found {}", v.len())))?;
    Ok(px)
}

/// Parses and validates a table: entries `≥ −1e−6` and each setting pair
/// summing to 1 within `1e−6`.
pub fn parse_table(text: &str, path: &Path) -> Result<BehaviorTable> {
    let px = parse_raw(text, path)?;
    BehaviorTable::try_from_array(px, MALFORMED_TOLERANCE).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn read_table(path: &Path) -> Result<BehaviorTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_table(&text, path)
}

pub fn render_table(px: &[f64; 16]) -> Result<String> {
    to_json(&TableFile {
        settings: Some([2, 2]),
        outcomes: Some([2, 2]),
        px: px.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("t.json")
    }

    #[test]
    fn minimal_form_accepted() {
        let text = format!("{{ \"px\": {:?} }}", [0.25; 16]);
        assert_eq!(parse_table(&text, p()).unwrap(), BehaviorTable::uniform());
    }

    #[test]
    fn wrong_length_rejected() {
        let err = parse_table("{\"px\": [0.5, 0.5]}", p()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("16 entries"));
    }

    #[test]
    fn wrong_shape_rejected() {
        let text = format!("{{\"settings\": [3, 2], \"px\": {:?}}}", [0.25; 16]);
        assert!(parse_table(&text, p()).is_err());
    }

    #[test]
    fn underweight_rejected() {
        let text = format!("{{\"px\": {:?}}}", [0.225; 16]);
        assert!(matches!(
            parse_table(&text, p()),
            Err(CliError::Parse { .. })
        ));
    }

    #[test]
    fn garbage_rejected() {
        assert!(parse_table("px = 1", p()).is_err());
    }

    #[test]
    fn render_then_parse_is_exact() {
        let mut px = [0.0; 16];
        for (k, v) in px.iter_mut().enumerate() {
            *v = (k as f64 + 0.1) / 7.3;
        }
        let text = render_table(&px).unwrap();
        assert_eq!(parse_raw(&text, p()).unwrap(), px);
    }
}
