//! Number formatting and CSV/JSON emission.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn sig12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// A row type that can be emitted as CSV.
pub trait CsvRow {
    fn header() -> &'static str;
    fn fields(&self) -> Vec<String>;
}

pub fn render<T: CsvRow + Serialize>(
    rows: &[T],
    format: Format,
    comments: &[String],
) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for c in comments {
                writeln!(out, "# {c}").unwrap();
            }
            writeln!(out, "{}", T::header()).unwrap();
            for r in rows {
                writeln!(out, "{}", r.fields().join(",")).unwrap();
            }
            Ok(out)
        }
        Format::Json => to_json(&serde_json::json!({ "meta": comments, "records": rows })),
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(2.0 * std::f64::consts::SQRT_2), "2.82842712475");
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(100.0), "100");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.25), "-0.25");
        assert_eq!(sig12(4.828403811218962e-6), "4.82840381122e-6");
        assert_eq!(sig12(0.0001), "0.0001");
        assert_eq!(sig12(1e15), "1e15");
        assert_eq!(sig12(0.9999999999999), "1");
    }
}
