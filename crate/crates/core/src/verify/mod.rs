//! Brute-force adversarial verification of the closed forms in
//! [`analysis`](crate::analysis).
//!
//! Worst cases are searched over two-agent profiles `x₁ ≤ x₂` only; any
//! profile is dominated by the pair of its extreme agents (see
//! [`reduction_property_test`]), and [`n_agent_spot_check`] re-checks that
//! on small grids of larger profiles.

mod lrm;
mod properties;
mod report;
pub(crate) mod search;

use serde::Serialize;

use crate::analysis::{bim_error_curve, GuaranteePair};
use crate::error::{Error, Result};
use crate::mechanisms::{self, MechanismSpec};
use crate::objective::approximation_ratio;
use crate::profile::{LocationProfile, Prediction};
use crate::ratio::ExtendedRatio;

pub use lrm::{lrm_objective, optimize_lrm, LrmBounds, LrmOptimum, LrmTraceStep};
pub use properties::{
    core_invariants_test, fixtures, n_agent_spot_check, reduction_property_test,
    strategyproofness_test, strategyproofness_test_with, streams, PropertyOutcome,
    SpCounterexample,
};
pub use report::{
    balrm_pareto_dominance, bam_dominance_check, closed_form, standard_cases, verify_all,
    verify_case, verify_cases, Comparison, Setting, VerificationCase, VerificationReport,
};
pub use search::grid;

/// Search resolution and comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchConfig {
    pub coarse_step: f64,
    pub refine_step: f64,
    pub refine_radius: f64,
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            coarse_step: 1e-2,
            refine_step: 1e-5,
            refine_radius: 2e-2,
            tolerance: 5e-3,
        }
    }
}

impl SearchConfig {
    pub fn with_tolerance(self, tolerance: f64) -> Self {
        SearchConfig { tolerance, ..self }
    }

    /// Checks `0 < refine_step < coarse_step ≤ 0.1`, a positive radius and a
    /// non-negative tolerance. A zero tolerance is accepted so that callers
    /// can observe the resulting failures.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, value: f64, range: &'static str| {
            Err(Error::Parameter { name, value, range })
        };
        if !(self.coarse_step > 0.0 && self.coarse_step <= 0.1) {
            return bad("coarse_step", self.coarse_step, "(0, 0.1]");
        }
        if !(self.refine_step > 0.0 && self.refine_step < self.coarse_step) {
            return bad("refine_step", self.refine_step, "(0, coarse_step)");
        }
        if !(self.refine_radius > 0.0 && self.refine_radius <= 1.0) {
            return bad("refine_radius", self.refine_radius, "(0, 1]");
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance", self.tolerance, "[0, inf)");
        }
        Ok(())
    }
}

/// How the prediction relates to the searched profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PredictionMode {
    /// `ŷ` equals the optimal location.
    Accurate,
    /// `ŷ` ranges over `[0, 1]`.
    Adversarial,
    Fixed {
        prediction: f64,
    },
    /// `|ŷ − midp(x)| ≤ η`.
    ErrorBounded {
        eta: f64,
    },
    /// Accurate `ŷ` whose bias `|ŷ − ½|` lies in `[lo, hi]`.
    AccurateInBand {
        lo: f64,
        hi: f64,
    },
    /// Arbitrary profile, `ŷ` with bias in `[lo, hi]`.
    AdversarialInBand {
        lo: f64,
        hi: f64,
    },
}

/// A two-agent instance together with the prediction handed to the mechanism.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub profile: LocationProfile,
    pub prediction: Option<Prediction>,
    pub ratio: ExtendedRatio,
}

/// Approximation ratio of `spec` on `profile` with `prediction`; the
/// prediction is dropped for mechanisms that do not take one.
pub fn instance_ratio(
    spec: &MechanismSpec,
    profile: &LocationProfile,
    prediction: Option<Prediction>,
) -> Result<ExtendedRatio> {
    let prediction = prediction.filter(|_| spec.uses_prediction());
    let dist = mechanisms::run(spec, profile, prediction)?;
    Ok(approximation_ratio(&dist, profile))
}

/// Result of [`worst_case_ratio`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCase {
    pub value: ExtendedRatio,
    pub witness: Witness,
    /// Best value on the coarse grid, before refinement.
    pub coarse_value: ExtendedRatio,
    /// Refined local maxima within the tolerance of `value`, best first.
    pub witnesses: Vec<Witness>,
    pub evaluations: usize,
}

/// One searchable slice: box bounds and a decoder from search coordinates
/// to `(x₁, x₂, ŷ)`.
type Decoder = Box<dyn Fn(&search::Point) -> Option<(f64, f64, Option<f64>)> + Sync>;

struct Slice {
    bounds: Vec<(f64, f64)>,
    decode: Decoder,
}

fn ordered(x1: f64, x2: f64) -> bool {
    x1 <= x2
}

fn unit(v: f64) -> Option<f64> {
    (0.0..=1.0).contains(&v).then_some(v)
}

fn check_band(lo: f64, hi: f64) -> Result<()> {
    if (0.0..=0.5).contains(&lo) && (0.0..=0.5).contains(&hi) && lo <= hi {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "bias band [{lo}, {hi}] is not inside [0, 1/2]"
        )))
    }
}

fn slices(spec: &MechanismSpec, mode: PredictionMode) -> Result<Vec<Slice>> {
    let pair = vec![(0.0, 1.0), (0.0, 1.0)];
    let uses = spec.uses_prediction();
    let profile_only = |yhat: Option<f64>| Slice {
        bounds: pair.clone(),
        decode: Box::new(move |p| ordered(p[0], p[1]).then_some((p[0], p[1], yhat))),
    };
    Ok(match mode {
        PredictionMode::Accurate => vec![Slice {
            bounds: pair,
            decode: Box::new(move |p| {
                ordered(p[0], p[1]).then(|| (p[0], p[1], uses.then(|| 0.5 * (p[0] + p[1]))))
            }),
        }],
        PredictionMode::Adversarial if uses => vec![Slice {
            bounds: vec![(0.0, 1.0); 3],
            decode: Box::new(|p| ordered(p[0], p[1]).then_some((p[0], p[1], Some(p[2])))),
        }],
        PredictionMode::Adversarial => vec![profile_only(None)],
        PredictionMode::Fixed { prediction } => {
            Prediction::new(prediction)?;
            vec![profile_only(uses.then_some(prediction))]
        }
        PredictionMode::ErrorBounded { eta } => {
            if !(eta >= 0.0) {
                return Err(Error::domain("eta", eta, "[0, inf)"));
            }
            if uses {
                let e = eta.min(1.0);
                vec![Slice {
                    bounds: vec![(0.0, 1.0), (0.0, 1.0), (-e, e)],
                    decode: Box::new(|p| {
                        if !ordered(p[0], p[1]) {
                            return None;
                        }
                        let yhat = unit(0.5 * (p[0] + p[1]) + p[2])?;
                        Some((p[0], p[1], Some(yhat)))
                    }),
                }]
            } else {
                vec![profile_only(None)]
            }
        }
        PredictionMode::AccurateInBand { lo, hi } => {
            check_band(lo, hi)?;
            [-1.0, 1.0]
                .into_iter()
                .map(|side: f64| Slice {
                    bounds: vec![(lo, hi), (0.0, 0.5)],
                    decode: Box::new(move |p| {
                        let yhat = 0.5 + side * p[0];
                        let h = p[1];
                        if h > yhat.min(1.0 - yhat) {
                            return None;
                        }
                        Some((yhat - h, yhat + h, uses.then_some(yhat)))
                    }),
                })
                .collect()
        }
        PredictionMode::AdversarialInBand { lo, hi } => {
            check_band(lo, hi)?;
            [-1.0, 1.0]
                .into_iter()
                .map(|side: f64| Slice {
                    bounds: vec![(0.0, 1.0), (0.0, 1.0), (lo, hi)],
                    decode: Box::new(move |p| {
                        ordered(p[0], p[1]).then(|| (p[0], p[1], uses.then(|| 0.5 + side * p[2])))
                    }),
                })
                .collect()
        }
    })
}

fn evaluate(spec: &MechanismSpec, x1: f64, x2: f64, yhat: Option<f64>) -> ExtendedRatio {
    let profile = LocationProfile::two(x1, x2).expect("decoded positions lie in [0, 1]");
    let prediction = yhat.map(|y| Prediction::new(y).expect("decoded prediction lies in [0, 1]"));
    instance_ratio(spec, &profile, prediction).expect("validated mechanism")
}

fn witness(spec: &MechanismSpec, x1: f64, x2: f64, yhat: Option<f64>) -> Witness {
    Witness {
        profile: LocationProfile::two(x1, x2).expect("decoded positions lie in [0, 1]"),
        prediction: yhat.map(|y| Prediction::new(y).expect("decoded prediction lies in [0, 1]")),
        ratio: evaluate(spec, x1, x2, yhat),
    }
}

fn witness_key(w: &Witness) -> (f64, f64, f64) {
    let p = w.profile.positions();
    (p[0], p[1], w.prediction.map_or(-1.0, Prediction::value))
}

/// Supremum of the approximation ratio of `spec` over two-agent profiles,
/// with the prediction constrained by `mode`.
pub fn worst_case_ratio(
    spec: &MechanismSpec,
    mode: PredictionMode,
    cfg: &SearchConfig,
) -> Result<WorstCase> {
    spec.validate()?;
    cfg.validate()?;
    let mut found: Vec<Witness> = Vec::new();
    let mut coarse_value = f64::NEG_INFINITY;
    let mut evaluations = 0;
    for slice in slices(spec, mode)? {
        let decode = &slice.decode;
        let outcome = search::maximize(
            &slice.bounds,
            cfg.coarse_step,
            cfg.refine_radius,
            cfg.refine_step,
            |p| decode(p).map(|(x1, x2, y)| evaluate(spec, x1, x2, y).value()),
        );
        coarse_value = coarse_value.max(outcome.coarse_value);
        evaluations += outcome.evaluations;
        for c in &outcome.candidates {
            let (x1, x2, y) = decode(&c.point).expect("candidates are feasible");
            found.push(witness(spec, x1, x2, y));
        }
    }
    found.sort_by(|a, b| {
        b.ratio
            .partial_cmp(&a.ratio)
            .expect("ratios are totally ordered")
            .then_with(|| {
                let (ka, kb) = (witness_key(a), witness_key(b));
                ka.0.total_cmp(&kb.0)
                    .then(ka.1.total_cmp(&kb.1))
                    .then(ka.2.total_cmp(&kb.2))
            })
    });
    found.dedup();
    let best = found
        .first()
        .cloned()
        .expect("every slice has a feasible point");
    let witnesses = found
        .into_iter()
        .filter(|w| w.ratio.approx_eq(best.ratio, cfg.tolerance) || w.ratio >= best.ratio)
        .collect();
    Ok(WorstCase {
        value: best.ratio,
        witness: best,
        coarse_value: ExtendedRatio::new(coarse_value),
        witnesses,
        evaluations,
    })
}

/// Empirical `(consistency, robustness)` of `spec` together with the two
/// worst cases. Prediction-free mechanisms are searched once.
pub fn empirical_guarantees_with(
    spec: &MechanismSpec,
    accurate: PredictionMode,
    adversarial: PredictionMode,
    cfg: &SearchConfig,
) -> Result<(GuaranteePair, WorstCase, WorstCase)> {
    let consistency = worst_case_ratio(spec, accurate, cfg)?;
    let robustness = if spec.uses_prediction() {
        worst_case_ratio(spec, adversarial, cfg)?
    } else {
        consistency.clone()
    };
    let pair = GuaranteePair {
        consistency: consistency.value,
        robustness: robustness.value,
    };
    Ok((pair, consistency, robustness))
}

/// `(sup over accurate predictions, sup over all predictions)`.
pub fn empirical_guarantees(spec: &MechanismSpec, cfg: &SearchConfig) -> Result<GuaranteePair> {
    empirical_guarantees_with(
        spec,
        PredictionMode::Accurate,
        PredictionMode::Adversarial,
        cfg,
    )
    .map(|r| r.0)
}

/// Bias band searched for a bias-aware mechanism at bias `c`. Below `¼` the
/// closed form is a bound for the whole regime `[0, ¼)`, so the band is
/// `[0, ¼]`; above, it is a band of half-width `refine_step` around `c`,
/// which turns the one-sided limit at `c = ½` into a searchable supremum.
pub fn bias_band(c: f64, cfg: &SearchConfig) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&c) {
        return Err(Error::Parameter {
            name: "c",
            value: c,
            range: "[0, 1/2]",
        });
    }
    if c < 0.25 {
        Ok((0.0, 0.25))
    } else {
        let w = cfg.refine_step;
        Ok(((c - w).max(0.25), (c + w).min(0.5)))
    }
}

/// Empirical guarantees of a bias-aware mechanism at bias `c`, see [`bias_band`].
pub fn empirical_guarantees_at_bias(
    spec: &MechanismSpec,
    c: f64,
    cfg: &SearchConfig,
) -> Result<(GuaranteePair, WorstCase, WorstCase)> {
    let (lo, hi) = bias_band(c, cfg)?;
    empirical_guarantees_with(
        spec,
        PredictionMode::AccurateInBand { lo, hi },
        PredictionMode::AdversarialInBand { lo, hi },
        cfg,
    )
}

/// Error-bounded worst case of α-BIM at every `η` in `etas`.
pub fn empirical_error_curve(
    alpha: f64,
    etas: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<(f64, ExtendedRatio)>> {
    bim_error_curve(alpha)?;
    let spec = MechanismSpec::alpha_bim(alpha)?;
    etas.iter()
        .map(|&eta| {
            worst_case_ratio(&spec, PredictionMode::ErrorBounded { eta }, cfg)
                .map(|w| (eta, w.value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> SearchConfig {
        SearchConfig {
            coarse_step: 0.02,
            refine_step: 1e-4,
            refine_radius: 0.04,
            tolerance: 5e-3,
        }
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let cfg = SearchConfig::default();
        assert!(SearchConfig {
            coarse_step: 0.2,
            ..cfg
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            refine_step: 0.02,
            ..cfg
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            refine_radius: 0.0,
            ..cfg
        }
        .validate()
        .is_err());
        assert!(SearchConfig {
            tolerance: -1.0,
            ..cfg
        }
        .validate()
        .is_err());
        assert!(cfg.with_tolerance(0.0).validate().is_ok());
    }

    #[test]
    fn constant_half_is_a_two_approximation() {
        let w = worst_case_ratio(
            &MechanismSpec::ConstantHalf,
            PredictionMode::Accurate,
            &fast(),
        )
        .unwrap();
        assert!((w.value.value() - 2.0).abs() < 1e-9);
        assert_eq!(w.witness.profile.positions(), &[0.0, 0.5]);
        assert!(w.witness.prediction.is_none());
    }

    #[test]
    fn midpoint_is_optimal() {
        let g = empirical_guarantees(&MechanismSpec::Midpoint, &fast()).unwrap();
        assert!(g.consistency.approx_eq(ExtendedRatio::ONE, 1e-12));
        assert!(g.robustness.approx_eq(ExtendedRatio::ONE, 1e-12));
    }

    #[test]
    fn bim_tight_instances() {
        let spec = MechanismSpec::alpha_bim(1.5).unwrap();
        let (g, c, r) = empirical_guarantees_with(
            &spec,
            PredictionMode::Accurate,
            PredictionMode::Adversarial,
            &fast(),
        )
        .unwrap();
        assert!((g.consistency.value() - 1.5).abs() < 5e-3);
        assert!((g.robustness.value() - 3.0).abs() < 5e-3);
        let p = c.witness.profile.positions();
        assert!(
            p[0].abs() < 2e-2 && (p[1] - 1.0 / 3.0).abs() < 2e-2,
            "{p:?}"
        );
        // the tight instance and its mirror image tie
        let tight = r.witnesses.iter().find(|w| {
            let p = w.profile.positions();
            (p[0] - 1.0 / 3.0).abs() < 2e-2 && (p[1] - 1.0).abs() < 2e-2
        });
        assert!(tight.unwrap().prediction.unwrap().value() < 1.0 / 3.0 + 1e-9);
        let mirrored = r.witness.profile.reflect();
        let primary = if r.witness.profile.leftmost() < 0.1 {
            &mirrored
        } else {
            &r.witness.profile
        };
        let p = primary.positions();
        assert!(
            (p[0] - 1.0 / 3.0).abs() < 2e-2 && (p[1] - 1.0).abs() < 2e-2,
            "{p:?}"
        );
    }

    #[test]
    fn witnesses_reproduce_their_values() {
        let spec = MechanismSpec::Bam;
        let w = worst_case_ratio(&spec, PredictionMode::Adversarial, &fast()).unwrap();
        assert!(w.value >= ExtendedRatio::new(w.coarse_value.value() - 1e-12));
        for wit in &w.witnesses {
            assert_eq!(
                instance_ratio(&spec, &wit.profile, wit.prediction).unwrap(),
                wit.ratio
            );
        }
    }

    #[test]
    fn unbounded_values_are_legal() {
        let spec = MechanismSpec::alpha_bim(1.0).unwrap();
        let w = worst_case_ratio(&spec, PredictionMode::Adversarial, &fast()).unwrap();
        assert!(w.value.is_unbounded());
        assert!(w.witness.ratio.is_unbounded());
    }

    #[test]
    fn fixed_and_banded_modes() {
        let spec = MechanismSpec::alpha_bim(2.0).unwrap();
        let w =
            worst_case_ratio(&spec, PredictionMode::Fixed { prediction: 0.9 }, &fast()).unwrap();
        assert!((w.value.value() - 2.0).abs() < 1e-9);
        assert!(
            worst_case_ratio(&spec, PredictionMode::Fixed { prediction: 1.5 }, &fast()).is_err()
        );
        assert!(worst_case_ratio(
            &spec,
            PredictionMode::AccurateInBand { lo: 0.3, hi: 0.2 },
            &fast()
        )
        .is_err());
        let (g, _, _) = empirical_guarantees_at_bias(&MechanismSpec::Bam, 0.3, &fast()).unwrap();
        assert!((g.consistency.value() - 1.64).abs() < 5e-3);
        assert!((g.robustness.value() - 2.3).abs() < 5e-3);
    }

    #[test]
    fn bias_bands() {
        let cfg = SearchConfig::default();
        assert_eq!(bias_band(0.1, &cfg).unwrap(), (0.0, 0.25));
        assert_eq!(bias_band(0.25, &cfg).unwrap(), (0.25, 0.25 + 1e-5));
        assert_eq!(bias_band(0.5, &cfg).unwrap(), (0.5 - 1e-5, 0.5));
        assert!(bias_band(0.6, &cfg).is_err());
    }

    #[test]
    fn error_curve_endpoints() {
        let values = empirical_error_curve(1.5, &[0.0, 0.2], &fast()).unwrap();
        assert!((values[0].1.value() - 1.5).abs() < 5e-3);
        assert!((values[1].1.value() - 2.2).abs() < 5e-3);
    }
}
