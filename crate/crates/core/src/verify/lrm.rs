//! Parameter search for the `(α, p)`-LRM constant mechanism.

use serde::Serialize;

use super::search;
use super::SearchConfig;
use crate::analysis::lrm_instance_ratios;
use crate::error::{Error, Result};
use crate::mechanisms::lrm_constant;
use crate::objective::approximation_ratio;
use crate::profile::LocationProfile;
use crate::ratio::ExtendedRatio;

/// Box of `(α, p)` values to search; both ranges must lie in `[0, ½]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrmBounds {
    pub alpha: (f64, f64),
    pub p: (f64, f64),
}

impl Default for LrmBounds {
    fn default() -> Self {
        LrmBounds {
            alpha: (0.0, 0.25),
            p: (0.0, 0.5),
        }
    }
}

impl LrmBounds {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("alpha", self.alpha), ("p", self.p)] {
            if !((0.0..=0.5).contains(&lo) && (0.0..=0.5).contains(&hi) && lo <= hi) {
                return Err(Error::Usage(format!(
                    "{name} bounds [{lo}, {hi}] must lie in [0, 1/2]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrmTraceStep {
    pub step: f64,
    pub alpha: f64,
    pub p: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrmOptimum {
    pub alpha: f64,
    pub p: f64,
    pub ratio: f64,
    pub trace: Vec<LrmTraceStep>,
    pub evaluations: usize,
}

/// `max{ρ(x), ρ(x')}` over the instances `x = (0, ½)` and `x' = (0, ½ + α)`.
/// For `α ≤ ¼` the closed forms are used; beyond, the two ratios are
/// evaluated directly.
pub fn lrm_objective(alpha: f64, p: f64) -> Result<ExtendedRatio> {
    if alpha <= 0.25 {
        let (a, b) = lrm_instance_ratios(alpha, p)?;
        return Ok(ExtendedRatio::new(a.max(b)));
    }
    let dist = lrm_constant(&LocationProfile::two(0.0, 0.0)?, alpha, p)?;
    let x = approximation_ratio(&dist, &LocationProfile::two(0.0, 0.5)?);
    let x_prime = approximation_ratio(&dist, &LocationProfile::two(0.0, 0.5 + alpha)?);
    Ok(x.max(x_prime))
}

/// Minimises [`lrm_objective`] over `bounds`: a grid at `cfg.coarse_step`,
/// then a zoom down to `cfg.refine_step / 100`.
pub fn optimize_lrm(bounds: LrmBounds, cfg: &SearchConfig) -> Result<LrmOptimum> {
    bounds.validate()?;
    cfg.validate()?;
    let outcome = search::maximize(
        &[bounds.alpha, bounds.p],
        cfg.coarse_step,
        cfg.refine_radius,
        cfg.refine_step / 100.0,
        |pt| lrm_objective(pt[0], pt[1]).ok().map(|r| -r.value()),
    );
    let best = outcome.best().expect("bounds are non-empty");
    Ok(LrmOptimum {
        alpha: best.point[0],
        p: best.point[1],
        ratio: -best.value,
        trace: outcome
            .trace
            .iter()
            .map(|l| LrmTraceStep {
                step: l.step,
                alpha: l.point[0],
                p: l.point[1],
                ratio: -l.value,
            })
            .collect(),
        evaluations: outcome.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_optimum() {
        let opt = optimize_lrm(LrmBounds::default(), &SearchConfig::default()).unwrap();
        assert!(
            (opt.alpha - (5f64.sqrt() / 2.0 - 1.0)).abs() < 1e-3,
            "{opt:?}"
        );
        assert!((opt.p - 0.4).abs() < 1e-3);
        assert!((opt.ratio - (1.0 + 2.0 / 5f64.sqrt())).abs() < 1e-4);
        assert!(opt.trace.windows(2).all(|w| w[1].ratio <= w[0].ratio));
    }

    #[test]
    fn restricted_optimum() {
        let bounds = LrmBounds {
            alpha: (1.0 / 6.0, 0.25),
            p: (0.0, 0.5),
        };
        let opt = optimize_lrm(bounds, &SearchConfig::default()).unwrap();
        assert!((opt.alpha - 1.0 / 6.0).abs() < 1e-3, "{opt:?}");
        assert!((opt.p - 4.0 / 11.0).abs() < 1e-3);
        assert!((opt.ratio - 21.0 / 11.0).abs() < 1e-4);
    }

    #[test]
    fn high_alpha_is_no_better_than_half() {
        let bounds = LrmBounds {
            alpha: (0.3, 0.4),
            p: (0.0, 0.5),
        };
        let opt = optimize_lrm(bounds, &SearchConfig::default()).unwrap();
        assert!(opt.ratio >= 2.0 - 1e-9);
    }

    #[test]
    fn rejects_bad_bounds() {
        let bounds = LrmBounds {
            alpha: (0.3, 0.6),
            p: (0.0, 0.5),
        };
        assert!(optimize_lrm(bounds, &SearchConfig::default()).is_err());
    }
}
