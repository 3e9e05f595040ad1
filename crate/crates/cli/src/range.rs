//! `lo:hi:step` grids and `lo:hi` bounds on the command line.

use std::str::FromStr;

use envyline::verify::grid;

/// An inclusive grid `lo:hi:step` (last point snapped to `hi`), or a single
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    text: String,
    values: Vec<f64>,
}

impl Range {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [v] => vec![number(v)?],
            [lo, hi, step] => {
                let (lo, hi, step) = (number(lo)?, number(hi)?, number(step)?);
                if hi < lo {
                    return Err(format!("range {s:?} has hi < lo"));
                }
                if !(step > 0.0) {
                    return Err(format!("range {s:?} needs a positive step"));
                }
                if (hi - lo) / step > 1e7 {
                    return Err(format!("range {s:?} has too many points"));
                }
                grid(lo, hi, step)
            }
            _ => return Err(format!("expected lo:hi:step or a single value, got {s:?}")),
        };
        Ok(Range {
            text: s.to_string(),
            values,
        })
    }
}

/// A closed interval `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Bounds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split(':').collect::<Vec<_>>().as_slice() {
            [lo, hi] => {
                let (lo, hi) = (number(lo)?, number(hi)?);
                if hi < lo {
                    return Err(format!("bounds {s:?} have hi < lo"));
                }
                Ok(Bounds { lo, hi })
            }
            _ => Err(format!("expected lo:hi, got {s:?}")),
        }
    }
}
