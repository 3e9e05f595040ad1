use serde::Serialize;

use crate::error::{check_param, Error, Result};

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(what, value, "[0, 1]"))
    }
}

/// Reported agent positions on `[0, 1]`, stored sorted ascending.
///
/// The envy ratio only depends on the multiset of positions, so labels are
/// not kept.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct LocationProfile {
    positions: Vec<f64>,
}

impl LocationProfile {
    pub fn new(mut positions: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for &p in &positions {
            check_unit("position", p)?;
        }
        positions.sort_by(f64::total_cmp);
        Ok(LocationProfile { positions })
    }

    pub fn two(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Leftmost position, `lm(x)`.
    pub fn leftmost(&self) -> f64 {
        self.positions[0]
    }

    /// Rightmost position, `rtm(x)`.
    pub fn rightmost(&self) -> f64 {
        self.positions[self.positions.len() - 1]
    }

    /// All agents share one location (this includes `n = 1`).
    pub fn is_degenerate(&self) -> bool {
        self.leftmost() == self.rightmost()
    }

    /// The two-agent instance `(lm(x), rtm(x))` that dominates `x` in
    /// approximation ratio for every placement distribution.
    pub fn reduce_to_two_agents(&self) -> LocationProfile {
        LocationProfile {
            positions: vec![self.leftmost(), self.rightmost()],
        }
    }

    /// Mirror image under `p ↦ 1 − p`.
    pub fn reflect(&self) -> LocationProfile {
        LocationProfile {
            positions: self.positions.iter().rev().map(|p| 1.0 - p).collect(),
        }
    }

    /// Replaces the agent at sorted index `index` by `report`.
    pub fn with_report(&self, index: usize, report: f64) -> Result<LocationProfile> {
        check_unit("report", report)?;
        let mut positions = self.positions.clone();
        positions[index] = report;
        LocationProfile::new(positions)
    }
}

/// A predicted optimal facility location `ŷ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Prediction(f64);

impl Prediction {
    pub fn new(value: f64) -> Result<Self> {
        check_unit("prediction", value)?;
        Ok(Prediction(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Distance of the prediction from the centre of the domain, `|ŷ − ½|`.
    pub fn bias(self) -> f64 {
        (self.0 - 0.5).abs()
    }

    pub fn reflect(self) -> Prediction {
        Prediction(1.0 - self.0)
    }
}

/// A compact source domain `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        check_param(
            "interval",
            hi - lo,
            "lo < hi",
            lo < hi && lo.is_finite() && hi.is_finite(),
        )?;
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Maps raw positions on `interval` affinely onto `[0, 1]`.
pub fn rescale(raw: &[f64], interval: Interval) -> Result<LocationProfile> {
    let width = interval.hi - interval.lo;
    let mapped = raw
        .iter()
        .map(|&p| {
            if p < interval.lo || p > interval.hi || p.is_nan() {
                Err(Error::domain(
                    "raw position",
                    p,
                    format!("[{}, {}]", interval.lo, interval.hi),
                ))
            } else {
                Ok(((p - interval.lo) / width).clamp(0.0, 1.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    LocationProfile::new(mapped)
}
