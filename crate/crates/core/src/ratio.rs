use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// A ratio that is either a finite real or the distinguished value `+∞`.
///
/// Envy ratios, approximation ratios, consistency and robustness all live
/// here. A zero minimum utility yields [`ExtendedRatio::UNBOUNDED`] rather
/// than a floating-point exception.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtendedRatio(f64);

impl ExtendedRatio {
    pub const ONE: ExtendedRatio = ExtendedRatio(1.0);
    pub const UNBOUNDED: ExtendedRatio = ExtendedRatio(f64::INFINITY);

    /// Wraps a value. NaN is mapped to `+∞`: it only arises from `x/0`
    /// style expressions at poles of the closed forms.
    pub fn new(value: f64) -> Self {
        if value.is_nan() || value == f64::INFINITY {
            Self::UNBOUNDED
        } else {
            ExtendedRatio(value)
        }
    }

    /// `numerator / denominator`, with a non-positive denominator mapped to `+∞`.
    pub fn quotient(numerator: f64, denominator: f64) -> Self {
        if denominator <= 0.0 {
            Self::UNBOUNDED
        } else {
            Self::new(numerator / denominator)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_unbounded(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn finite(self) -> Option<f64> {
        (!self.is_unbounded()).then_some(self.0)
    }

    /// `|self − other| ≤ tol`, with `+∞` only close to `+∞`.
    pub fn approx_eq(self, other: ExtendedRatio, tol: f64) -> bool {
        match (self.is_unbounded(), other.is_unbounded()) {
            (true, true) => true,
            (false, false) => (self.0 - other.0).abs() <= tol,
            _ => false,
        }
    }

    /// `self ≤ other + tol`.
    pub fn le_within(self, other: ExtendedRatio, tol: f64) -> bool {
        other.is_unbounded() || (!self.is_unbounded() && self.0 <= other.0 + tol)
    }

    pub fn max(self, other: ExtendedRatio) -> ExtendedRatio {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtendedRatio {
    fn from(value: f64) -> Self {
        ExtendedRatio::new(value)
    }
}

impl PartialOrd for ExtendedRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.0.total_cmp(&other.0))
    }
}

impl fmt::Debug for ExtendedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtendedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unbounded() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

/// Serialized as a number, or the string `"inf"` when unbounded.
impl Serialize for ExtendedRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.finite() {
            Some(v) => serializer.serialize_f64(v),
            None => serializer.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_by_zero_is_unbounded() {
        assert!(ExtendedRatio::quotient(1.0, 0.0).is_unbounded());
        assert!(ExtendedRatio::new(f64::NAN).is_unbounded());
        assert_eq!(ExtendedRatio::quotient(3.0, 2.0).value(), 1.5);
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let a = ExtendedRatio::new(2.0);
        assert!(a < ExtendedRatio::UNBOUNDED);
        assert_eq!(a.max(ExtendedRatio::UNBOUNDED), ExtendedRatio::UNBOUNDED);
        assert!(a.le_within(ExtendedRatio::UNBOUNDED, 0.0));
        assert!(!ExtendedRatio::UNBOUNDED.le_within(a, 1e9));
        assert!(ExtendedRatio::UNBOUNDED.approx_eq(ExtendedRatio::UNBOUNDED, 0.0));
    }
}
