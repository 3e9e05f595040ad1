//! Number formatting shared by every output format: nine significant
//! digits, ties rounded to even.

use envyline::ExtendedRatio;

/// Rounds to nine significant digits, ties to even.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Shortest decimal for `round_sig(x)`, without exponent; `inf` for `+∞`.
pub fn number(x: f64) -> String {
    if x == f64::INFINITY {
        return "inf".to_string();
    }
    let rounded = round_sig(x);
    // avoid "-0"
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded}")
}

/// Like [`number`], but always shows a fractional part (`2` becomes `2.0`).
pub fn parameter(x: f64) -> String {
    let s = number(x);
    if s.contains('.') || s == "inf" {
        s
    } else {
        s + ".0"
    }
}

pub fn ratio(r: ExtendedRatio) -> String {
    number(r.value())
}
