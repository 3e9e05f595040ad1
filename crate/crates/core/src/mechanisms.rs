//! The seven mechanisms. Every one of them returns an explicit
//! [`PlacementDistribution`]; the deterministic ones return a single atom.
//!
//! None of the mechanisms reads the reported locations except the midpoint
//! baseline, which is optimal but not strategyproof. The profile argument is
//! kept on every signature so that all mechanisms share one interface.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::distribution::PlacementDistribution;
use crate::error::{check_param, Error, Result};
use crate::objective::optimal_location;
use crate::profile::{LocationProfile, Prediction};

/// `√5/2 − 1`, the half-width of the optimal LRM constant mechanism.
pub const OPTIMAL_LRM_ALPHA: f64 = 0.118_033_988_749_894_85;
/// Mass on each side atom of the optimal LRM constant mechanism.
pub const OPTIMAL_LRM_P: f64 = 0.4;

/// Identity and parameters of a mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MechanismSpec {
    /// Midpoint of the extreme agents (the optimum, not strategyproof).
    Midpoint,
    /// Always `½`.
    ConstantHalf,
    /// α-bounding interval mechanism, `α ∈ [1, 2]`.
    AlphaBim { alpha: f64 },
    /// `(α, p)`-LRM constant mechanism, `α, p ∈ [0, ½]`.
    LrmConstant { alpha: f64, p: f64 },
    /// Bias-aware mechanism.
    Bam,
    /// α-bounding interval randomized mechanism, `α ∈ (1, 2]`.
    AlphaBiRandomized { alpha: f64 },
    /// Bias-aware mechanism with the optimal LRM in place of `½`.
    BiasAwareLrm,
}

impl MechanismSpec {
    pub fn alpha_bim(alpha: f64) -> Result<Self> {
        let spec = MechanismSpec::AlphaBim { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lrm_constant(alpha: f64, p: f64) -> Result<Self> {
        let spec = MechanismSpec::LrmConstant { alpha, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn optimal_lrm() -> Self {
        MechanismSpec::LrmConstant {
            alpha: OPTIMAL_LRM_ALPHA,
            p: OPTIMAL_LRM_P,
        }
    }

    pub fn alpha_bi_randomized(alpha: f64) -> Result<Self> {
        let spec = MechanismSpec::AlphaBiRandomized { alpha };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MechanismSpec::AlphaBim { alpha } => {
                check_param("alpha", alpha, "[1, 2]", (1.0..=2.0).contains(&alpha))
            }
            MechanismSpec::LrmConstant { alpha, p } => {
                check_param("alpha", alpha, "[0, 1/2]", (0.0..=0.5).contains(&alpha))?;
                check_param("p", p, "[0, 1/2]", (0.0..=0.5).contains(&p))
            }
            MechanismSpec::AlphaBiRandomized { alpha } => {
                check_param("alpha", alpha, "(1, 2]", alpha > 1.0 && alpha <= 2.0)
            }
            _ => Ok(()),
        }
    }

    /// Whether the mechanism takes a prediction `ŷ` as input.
    pub fn uses_prediction(&self) -> bool {
        matches!(
            self,
            MechanismSpec::AlphaBim { .. }
                | MechanismSpec::Bam
                | MechanismSpec::AlphaBiRandomized { .. }
                | MechanismSpec::BiasAwareLrm
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            MechanismSpec::Midpoint => "midpoint",
            MechanismSpec::ConstantHalf => "half",
            MechanismSpec::AlphaBim { .. } => "bim",
            MechanismSpec::LrmConstant { .. } => "lrm",
            MechanismSpec::Bam => "bam",
            MechanismSpec::AlphaBiRandomized { .. } => "birm",
            MechanismSpec::BiasAwareLrm => "balrm",
        }
    }
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self {
            MechanismSpec::AlphaBim { alpha } | MechanismSpec::AlphaBiRandomized { alpha } => {
                write!(f, ":alpha={alpha}")
            }
            MechanismSpec::LrmConstant { alpha, p } => write!(f, ":alpha={alpha},p={p}"),
            _ => Ok(()),
        }
    }
}

impl Serialize for MechanismSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for MechanismSpec {
    type Err = Error;

    /// Parses the textual form, e.g. `bim:alpha=1.5`, `lrm:alpha=0.118034,p=0.4`
    /// or `bam`. A bare `lrm` is the optimal LRM constant mechanism.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let mut alpha = None;
        let mut p = None;
        for kv in args.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got {kv:?} in {s:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("{value:?} is not a number in {s:?}")))?;
            match key.trim() {
                "alpha" | "a" => alpha = Some(value),
                "p" => p = Some(value),
                other => {
                    return Err(Error::Usage(format!(
                        "unknown parameter {other:?} in {s:?}"
                    )))
                }
            }
        }
        let need_alpha = || alpha.ok_or_else(|| Error::Usage(format!("{s:?} needs alpha=")));
        let no_params = |spec: MechanismSpec| {
            if alpha.is_some() || p.is_some() {
                Err(Error::Usage(format!("{name} takes no parameters")))
            } else {
                Ok(spec)
            }
        };
        let spec = match name.trim().to_ascii_lowercase().as_str() {
            "midpoint" | "opt" => no_params(MechanismSpec::Midpoint)?,
            "half" | "constant-half" => no_params(MechanismSpec::ConstantHalf)?,
            "bim" | "alpha-bim" => MechanismSpec::AlphaBim {
                alpha: need_alpha()?,
            },
            "lrm" => match (alpha, p) {
                (None, None) => MechanismSpec::optimal_lrm(),
                (Some(alpha), Some(p)) => MechanismSpec::LrmConstant { alpha, p },
                _ => return Err(Error::Usage("lrm needs both alpha= and p=".into())),
            },
            "bam" => no_params(MechanismSpec::Bam)?,
            "birm" => MechanismSpec::AlphaBiRandomized {
                alpha: need_alpha()?,
            },
            "balrm" => no_params(MechanismSpec::BiasAwareLrm)?,
            other => return Err(Error::Usage(format!("unknown mechanism {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn single(location: f64) -> PlacementDistribution {
    PlacementDistribution::point(location).expect("location in [0, 1]")
}

/// `[1 − 1/α, 1/α]`.
fn bounding_interval(alpha: f64) -> (f64, f64) {
    (1.0 - 1.0 / alpha, 1.0 / alpha)
}

pub fn midpoint(profile: &LocationProfile) -> PlacementDistribution {
    single(optimal_location(profile))
}

pub fn constant_half(_profile: &LocationProfile) -> PlacementDistribution {
    single(0.5)
}

/// Follows the prediction inside `[1 − 1/α, 1/α]` and clamps it to the
/// nearest endpoint outside. The interval is closed.
pub fn alpha_bim(
    _profile: &LocationProfile,
    prediction: Prediction,
    alpha: f64,
) -> Result<PlacementDistribution> {
    MechanismSpec::AlphaBim { alpha }.validate()?;
    let (lo, hi) = bounding_interval(alpha);
    Ok(single(prediction.value().clamp(lo, hi)))
}

/// Mass `p` on `½ − α` and on `½ + α`, the rest on `½`.
pub fn lrm_constant(
    _profile: &LocationProfile,
    alpha: f64,
    p: f64,
) -> Result<PlacementDistribution> {
    MechanismSpec::LrmConstant { alpha, p }.validate()?;
    PlacementDistribution::new([(0.5 - alpha, p), (0.5, 1.0 - 2.0 * p), (0.5 + alpha, p)])
}

fn optimal_lrm(profile: &LocationProfile) -> PlacementDistribution {
    lrm_constant(profile, OPTIMAL_LRM_ALPHA, OPTIMAL_LRM_P).expect("constants are in range")
}

/// Places the facility at `ŷ` with probability `½ − |ŷ − ½|`, else at `½`.
pub fn bam(_profile: &LocationProfile, prediction: Prediction) -> PlacementDistribution {
    let p = 0.5 - prediction.bias();
    PlacementDistribution::new([(prediction.value(), p), (0.5, 1.0 - p)])
        .expect("weights form a distribution")
}

/// `ŷ` inside `[1 − 1/α, 1/α]`, otherwise the optimal LRM constant mechanism.
pub fn alpha_bi_randomized(
    profile: &LocationProfile,
    prediction: Prediction,
    alpha: f64,
) -> Result<PlacementDistribution> {
    MechanismSpec::AlphaBiRandomized { alpha }.validate()?;
    let (lo, hi) = bounding_interval(alpha);
    let y = prediction.value();
    if (lo..=hi).contains(&y) {
        Ok(single(y))
    } else {
        Ok(optimal_lrm(profile))
    }
}

/// Like [`bam`], with the optimal LRM constant mechanism replacing `½`.
pub fn bias_aware_lrm(profile: &LocationProfile, prediction: Prediction) -> PlacementDistribution {
    let p = 0.5 - prediction.bias();
    single(prediction.value())
        .mix(p, &optimal_lrm(profile))
        .expect("weights form a distribution")
}

/// Dispatches `spec` on `profile`. The prediction must be present exactly
/// when the mechanism uses one.
pub fn run(
    spec: &MechanismSpec,
    profile: &LocationProfile,
    prediction: Option<Prediction>,
) -> Result<PlacementDistribution> {
    spec.validate()?;
    let needed = || Error::Usage(format!("{spec} requires a prediction"));
    match (spec.uses_prediction(), prediction) {
        (false, Some(_)) => {
            return Err(Error::Usage(format!("{spec} does not take a prediction")));
        }
        (true, None) => return Err(needed()),
        _ => {}
    }
    match *spec {
        MechanismSpec::Midpoint => Ok(midpoint(profile)),
        MechanismSpec::ConstantHalf => Ok(constant_half(profile)),
        MechanismSpec::AlphaBim { alpha } => {
            alpha_bim(profile, prediction.ok_or_else(needed)?, alpha)
        }
        MechanismSpec::LrmConstant { alpha, p } => lrm_constant(profile, alpha, p),
        MechanismSpec::Bam => Ok(bam(profile, prediction.ok_or_else(needed)?)),
        MechanismSpec::AlphaBiRandomized { alpha } => {
            alpha_bi_randomized(profile, prediction.ok_or_else(needed)?, alpha)
        }
        MechanismSpec::BiasAwareLrm => Ok(bias_aware_lrm(profile, prediction.ok_or_else(needed)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LRM_LEFT: f64 = 0.381_966_011_250_105_1;
    const LRM_RIGHT: f64 = 0.618_033_988_749_894_9;

    fn any_profile() -> LocationProfile {
        LocationProfile::new(vec![0.1, 0.7]).unwrap()
    }

    fn yhat(v: f64) -> Prediction {
        Prediction::new(v).unwrap()
    }

    fn dist(atoms: &[(f64, f64)]) -> PlacementDistribution {
        PlacementDistribution::new(atoms.iter().copied()).unwrap()
    }

    #[test]
    fn midpoint_and_half() {
        let p = LocationProfile::new(vec![0.2, 0.9, 0.4]).unwrap();
        assert!(midpoint(&p).approx_eq(&dist(&[(0.55, 1.0)]), 1e-12));
        let p = LocationProfile::new(vec![0.29, 0.71]).unwrap();
        assert!(midpoint(&p).approx_eq(&dist(&[(0.5, 1.0)]), 1e-12));
        assert_eq!(constant_half(&p), dist(&[(0.5, 1.0)]));
    }

    #[test]
    fn alpha_bim_examples() {
        let p = any_profile();
        for y in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(alpha_bim(&p, yhat(y), 2.0).unwrap(), dist(&[(0.5, 1.0)]));
        }
        assert!(alpha_bim(&p, yhat(0.9), 1.5)
            .unwrap()
            .approx_eq(&dist(&[(2.0 / 3.0, 1.0)]), 1e-14));
        assert_eq!(alpha_bim(&p, yhat(0.4), 1.5).unwrap(), dist(&[(0.4, 1.0)]));
        // closed interval: the endpoint passes through
        let edge = 1.0 / 1.5;
        assert_eq!(
            alpha_bim(&p, yhat(edge), 1.5).unwrap().atoms()[0].location,
            dist(&[(edge, 1.0)]).atoms()[0].location
        );
        assert!(matches!(
            alpha_bim(&p, yhat(0.4), 2.5),
            Err(Error::Parameter { .. })
        ));
        assert!(alpha_bim(&p, yhat(0.4), 0.9).is_err());
    }

    #[test]
    fn lrm_examples() {
        let p = any_profile();
        let d = lrm_constant(&p, OPTIMAL_LRM_ALPHA, OPTIMAL_LRM_P).unwrap();
        assert!(d.approx_eq(
            &dist(&[(LRM_LEFT, 0.4), (0.5, 0.2), (LRM_RIGHT, 0.4)]),
            1e-12
        ));
        assert_eq!(lrm_constant(&p, 0.0, 0.3).unwrap(), dist(&[(0.5, 1.0)]));
        assert_eq!(lrm_constant(&p, 0.2, 0.0).unwrap(), dist(&[(0.5, 1.0)]));
        assert!(lrm_constant(&p, 0.6, 0.2).is_err());
        assert!(lrm_constant(&p, 0.1, 0.6).is_err());
    }

    #[test]
    fn bam_examples() {
        let p = any_profile();
        assert_eq!(bam(&p, yhat(0.5)), dist(&[(0.5, 1.0)]));
        assert_eq!(bam(&p, yhat(0.25)), dist(&[(0.25, 0.25), (0.5, 0.75)]));
        assert_eq!(bam(&p, yhat(0.0)), dist(&[(0.5, 1.0)]));
        assert_eq!(bam(&p, yhat(1.0)), dist(&[(0.5, 1.0)]));
    }

    #[test]
    fn alpha_bi_randomized_examples() {
        let p = any_profile();
        let lrm = optimal_lrm(&p);
        assert_eq!(
            alpha_bi_randomized(&p, yhat(0.5), 1.5).unwrap(),
            dist(&[(0.5, 1.0)])
        );
        assert_eq!(alpha_bi_randomized(&p, yhat(0.9), 1.5).unwrap(), lrm);
        assert_eq!(alpha_bi_randomized(&p, yhat(0.4), 2.0).unwrap(), lrm);
        assert!(alpha_bi_randomized(&p, yhat(0.4), 1.0).is_err());
    }

    #[test]
    fn bias_aware_lrm_examples() {
        let p = any_profile();
        let d = bias_aware_lrm(&p, yhat(0.5));
        assert!(d.approx_eq(
            &dist(&[(LRM_LEFT, 0.2), (0.5, 0.6), (LRM_RIGHT, 0.2)]),
            1e-12
        ));
        assert_eq!(bias_aware_lrm(&p, yhat(0.0)), optimal_lrm(&p));
        let d = bias_aware_lrm(&p, yhat(0.25));
        let expected = dist(&[(0.25, 0.25), (LRM_LEFT, 0.3), (0.5, 0.15), (LRM_RIGHT, 0.3)]);
        assert!(d.approx_eq(&expected, 1e-12), "{d:?}");
    }

    #[test]
    fn run_dispatches_and_checks_the_prediction() {
        let p = LocationProfile::new(vec![0.0, 1.0]).unwrap();
        let half = run(&MechanismSpec::ConstantHalf, &p, None).unwrap();
        assert_eq!(half, dist(&[(0.5, 1.0)]));

        let bim = MechanismSpec::alpha_bim(1.5).unwrap();
        let d = run(&bim, &p, Some(yhat(0.1))).unwrap();
        assert!(d.approx_eq(&dist(&[(1.0 / 3.0, 1.0)]), 1e-14));

        let lrm = MechanismSpec::lrm_constant(1.0 / 6.0, 4.0 / 11.0).unwrap();
        let d = run(&lrm, &p, None).unwrap();
        let expected = dist(&[
            (1.0 / 3.0, 4.0 / 11.0),
            (0.5, 3.0 / 11.0),
            (2.0 / 3.0, 4.0 / 11.0),
        ]);
        assert!(d.approx_eq(&expected, 1e-14));

        assert!(matches!(run(&bim, &p, None), Err(Error::Usage(_))));
        assert!(matches!(
            run(&MechanismSpec::Bam, &p, None),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            run(&MechanismSpec::ConstantHalf, &p, Some(yhat(0.2))),
            Err(Error::Usage(_))
        ));
        let bad = MechanismSpec::AlphaBim { alpha: 3.0 };
        assert!(matches!(
            run(&bad, &p, Some(yhat(0.2))),
            Err(Error::Parameter { .. })
        ));
    }

    #[test]
    fn textual_form_round_trips() {
        for s in [
            "midpoint",
            "half",
            "bim:alpha=1.5",
            "lrm:alpha=0.118034,p=0.4",
            "bam",
            "birm:alpha=2",
            "balrm",
        ] {
            let spec: MechanismSpec = s.parse().unwrap();
            let again: MechanismSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again, "{s}");
        }
        assert_eq!(
            "lrm".parse::<MechanismSpec>().unwrap(),
            MechanismSpec::optimal_lrm()
        );
        assert!("bim".parse::<MechanismSpec>().is_err());
        assert!("bim:alpha=2.5".parse::<MechanismSpec>().is_err());
        assert!("bam:alpha=1".parse::<MechanismSpec>().is_err());
        assert!("median".parse::<MechanismSpec>().is_err());
        assert!("lrm:alpha=0.1".parse::<MechanismSpec>().is_err());
    }
}
