//! Parsing of numeric fields that accept rational strings like "4/3".

use crate::error::{CoreError, Result};

/// Parses `"a/b"`, a decimal, or an integer into an `f64`. Rational strings
/// are evaluated as one division of exactly parsed integers, so constants
/// like 4/3 land on the correctly rounded double.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num
            .trim()
            .parse()
            .map_err(|_| CoreError::invalid(format!("bad rational numerator in `{s}`")))?;
        let d: i64 = den
            .trim()
            .parse()
            .map_err(|_| CoreError::invalid(format!("bad rational denominator in `{s}`")))?;
        if d == 0 {
            return Err(CoreError::invalid(format!("zero denominator in `{s}`")));
        }
        return Ok(n as f64 / d as f64);
    }
    s.parse::<f64>()
        .map_err(|_| CoreError::invalid(format!("bad numeric literal `{s}`")))
}
