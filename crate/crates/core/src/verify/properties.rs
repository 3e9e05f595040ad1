//! Seeded property suites: strategyproofness, the two-agent reduction and
//! the core invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distribution::PlacementDistribution;
use crate::error::{Error, Result};
use crate::mechanisms::{self, MechanismSpec};
use crate::objective::{approximation_ratio, envy_ratio, expected_utility};
use crate::profile::{LocationProfile, Prediction};
use crate::ratio::ExtendedRatio;

/// Violations smaller than this are floating-point noise.
const SP_SLACK: f64 = 1e-12;

/// ChaCha8 stream used by each suite, so suites sharing a seed draw
/// independent numbers.
pub mod streams {
    pub const STRATEGYPROOFNESS: u64 = 1;
    pub const REDUCTION: u64 = 2;
    pub const INVARIANTS: u64 = 3;
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A profitable misreport.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpCounterexample {
    pub profile: LocationProfile,
    pub prediction: Option<Prediction>,
    pub agent_location: f64,
    pub misreport: f64,
    pub truthful_utility: f64,
    pub deviating_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub pass: bool,
    pub trials: usize,
    pub details: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<SpCounterexample>,
}

impl PropertyOutcome {
    fn new(name: impl Into<String>, trials: usize, failure: Option<String>) -> Self {
        PropertyOutcome {
            name: name.into(),
            pass: failure.is_none(),
            trials,
            details: failure.unwrap_or_else(|| format!("{trials} trials passed")),
            counterexample: None,
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::Usage("at least one trial is required".into()))
    } else {
        Ok(())
    }
}

fn random_profile<R: Rng>(rng: &mut R, max_n: usize) -> LocationProfile {
    let n = rng.gen_range(1..=max_n);
    LocationProfile::new((0..n).map(|_| rng.gen::<f64>()).collect()).expect("draws lie in [0, 1)")
}

fn random_distribution<R: Rng>(rng: &mut R, max_atoms: usize) -> PlacementDistribution {
    let k = rng.gen_range(1..=max_atoms);
    let locations: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
    let weights: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    PlacementDistribution::new(
        locations
            .into_iter()
            .zip(weights.into_iter().map(|w| w / total)),
    )
    .expect("normalised weights")
}

/// Strategyproofness of an arbitrary mechanism, by random misreports.
///
/// Each trial draws `n ∈ [1, 8]` positions, a deviating agent, a misreport
/// and, when `uses_prediction` is set, a prediction that is held fixed.
pub fn strategyproofness_test_with<M>(
    name: &str,
    mechanism: M,
    uses_prediction: bool,
    trials: usize,
    seed: u64,
) -> Result<PropertyOutcome>
where
    M: Fn(&LocationProfile, Option<Prediction>) -> Result<PlacementDistribution>,
{
    check_trials(trials)?;
    let mut rng = rng(seed, streams::STRATEGYPROOFNESS);
    for trial in 0..trials {
        let profile = random_profile(&mut rng, 8);
        let agent = rng.gen_range(0..profile.len());
        let misreport: f64 = rng.gen();
        let prediction =
            uses_prediction.then(|| Prediction::new(rng.gen()).expect("draws lie in [0, 1)"));
        let location = profile.positions()[agent];
        let truthful = expected_utility(&mechanism(&profile, prediction)?, location);
        let deviated_profile = profile.with_report(agent, misreport)?;
        let deviating = expected_utility(&mechanism(&deviated_profile, prediction)?, location);
        if deviating > truthful + SP_SLACK {
            let mut outcome = PropertyOutcome::new(
                format!("strategyproofness/{name}"),
                trial + 1,
                Some(format!(
                    "agent at {location} gains {:.3e} by reporting {misreport}",
                    deviating - truthful
                )),
            );
            outcome.counterexample = Some(SpCounterexample {
                profile,
                prediction,
                agent_location: location,
                misreport,
                truthful_utility: truthful,
                deviating_utility: deviating,
            });
            return Ok(outcome);
        }
    }
    Ok(PropertyOutcome::new(
        format!("strategyproofness/{name}"),
        trials,
        None,
    ))
}

/// [`strategyproofness_test_with`] for one of the library mechanisms.
pub fn strategyproofness_test(
    spec: &MechanismSpec,
    trials: usize,
    seed: u64,
) -> Result<PropertyOutcome> {
    spec.validate()?;
    let uses = spec.uses_prediction();
    strategyproofness_test_with(
        &spec.to_string(),
        |profile, prediction| mechanisms::run(spec, profile, prediction),
        uses,
        trials,
        seed,
    )
}

/// Mechanisms used as fixtures for the strategyproofness tester.
pub mod fixtures {
    use super::*;

    /// The optimal midpoint; manipulable by exaggerating outward.
    pub fn midpoint(
        profile: &LocationProfile,
        _: Option<Prediction>,
    ) -> Result<PlacementDistribution> {
        Ok(mechanisms::midpoint(profile))
    }

    /// Mean of the reported positions; manipulable.
    pub fn mean_of_positions(
        profile: &LocationProfile,
        _: Option<Prediction>,
    ) -> Result<PlacementDistribution> {
        let p = profile.positions();
        PlacementDistribution::point(p.iter().sum::<f64>() / p.len() as f64)
    }

    /// The leftmost reported position. Strategyproof: only the leftmost
    /// agent can move the facility, and only away from everyone else.
    pub fn leftmost_position(
        profile: &LocationProfile,
        _: Option<Prediction>,
    ) -> Result<PlacementDistribution> {
        PlacementDistribution::point(profile.leftmost())
    }
}

fn reduction_holds(
    dist: &PlacementDistribution,
    profile: &LocationProfile,
) -> Option<(ExtendedRatio, ExtendedRatio)> {
    let lhs = approximation_ratio(dist, profile);
    let rhs = approximation_ratio(dist, &profile.reduce_to_two_agents());
    (!lhs.le_within(rhs, 1e-12)).then_some((lhs, rhs))
}

/// Random profiles and random distributions with at most five atoms: the
/// ratio on a profile never exceeds the ratio on its two extreme agents.
pub fn reduction_property_test(trials: usize, seed: u64) -> Result<PropertyOutcome> {
    check_trials(trials)?;
    let mut rng = rng(seed, streams::REDUCTION);
    for _ in 0..trials {
        let profile = random_profile(&mut rng, 8);
        let dist = random_distribution(&mut rng, 5);
        if let Some((lhs, rhs)) = reduction_holds(&dist, &profile) {
            let msg = format!(
                "profile {:?}, distribution {:?}: {lhs} > {rhs}",
                profile.positions(),
                dist.atoms()
            );
            return Ok(PropertyOutcome::new(
                "two_agent_reduction",
                trials,
                Some(msg),
            ));
        }
    }
    Ok(PropertyOutcome::new("two_agent_reduction", trials, None))
}

/// Every non-decreasing profile of 3 to 5 agents on a `0.2` grid, with every
/// grid prediction: `spec` does no worse on the pair of extreme agents.
pub fn n_agent_spot_check(spec: &MechanismSpec) -> Result<PropertyOutcome> {
    spec.validate()?;
    let values: Vec<f64> = (0..=5).map(|k| k as f64 * 0.2).collect();
    let predictions: Vec<Option<Prediction>> = if spec.uses_prediction() {
        values
            .iter()
            .map(|&v| Some(Prediction::new(v).expect("grid in [0, 1]")))
            .collect()
    } else {
        vec![None]
    };
    let mut checked = 0;
    for n in 3..=5 {
        let mut index = vec![0usize; n];
        loop {
            let profile = LocationProfile::new(index.iter().map(|&i| values[i]).collect())?;
            for &prediction in &predictions {
                let dist = mechanisms::run(spec, &profile, prediction)?;
                checked += 1;
                if let Some((lhs, rhs)) = reduction_holds(&dist, &profile) {
                    let msg = format!("{spec} on {:?}: {lhs} > {rhs}", profile.positions());
                    return Ok(PropertyOutcome::new(
                        format!("n_agent_spot_check/{spec}"),
                        checked,
                        Some(msg),
                    ));
                }
            }
            // next non-decreasing index tuple
            let Some(pos) = index.iter().rposition(|&i| i + 1 < values.len()) else {
                break;
            };
            let next = index[pos] + 1;
            index[pos..].iter_mut().for_each(|i| *i = next);
        }
    }
    Ok(PropertyOutcome::new(
        format!("n_agent_spot_check/{spec}"),
        checked,
        None,
    ))
}

fn random_spec<R: Rng>(rng: &mut R) -> MechanismSpec {
    match rng.gen_range(0..7) {
        0 => MechanismSpec::Midpoint,
        1 => MechanismSpec::ConstantHalf,
        2 => MechanismSpec::AlphaBim {
            alpha: rng.gen_range(1.0..=2.0),
        },
        3 => MechanismSpec::LrmConstant {
            alpha: rng.gen_range(0.0..=0.5),
            p: rng.gen_range(0.0..=0.5),
        },
        4 => MechanismSpec::Bam,
        5 => MechanismSpec::AlphaBiRandomized {
            alpha: 1.0 + rng.gen_range(1e-6..=1.0),
        },
        _ => MechanismSpec::BiasAwareLrm,
    }
}

fn relative_close(a: ExtendedRatio, b: ExtendedRatio, tol: f64) -> bool {
    let scale = a.finite().unwrap_or(1.0).abs().max(1.0);
    a.approx_eq(b, tol * scale)
}

/// Envy ratio at least one, unit mass of every mechanism output, and
/// reflection symmetry of the objective and of every mechanism.
pub fn core_invariants_test(trials: usize, seed: u64) -> Result<Vec<PropertyOutcome>> {
    check_trials(trials)?;
    let mut rng = rng(seed, streams::INVARIANTS);
    let mut failures: [Option<String>; 3] = [None, None, None];
    for _ in 0..trials {
        let profile = random_profile(&mut rng, 8);
        let y: f64 = rng.gen();
        let spec = random_spec(&mut rng);
        let prediction = Prediction::new(rng.gen())?;
        let prediction = spec.uses_prediction().then_some(prediction);

        let er = envy_ratio(y, &profile)?;
        if failures[0].is_none() && er < ExtendedRatio::ONE {
            failures[0] = Some(format!("ER({y}, {:?}) = {er}", profile.positions()));
        }

        let dist = mechanisms::run(&spec, &profile, prediction)?;
        let mass_ok = (dist.total_mass() - 1.0).abs() <= crate::PROBABILITY_TOLERANCE
            && dist
                .atoms()
                .iter()
                .all(|a| (0.0..=1.0).contains(&a.location) && a.probability > 0.0);
        if failures[1].is_none() && !mass_ok {
            failures[1] = Some(format!("{spec} returned {:?}", dist.atoms()));
        }

        let mirrored = profile.reflect();
        let er_mirror = envy_ratio(1.0 - y, &mirrored)?;
        let out = approximation_ratio(&dist, &profile);
        let mirrored_dist = mechanisms::run(&spec, &mirrored, prediction.map(Prediction::reflect))?;
        let out_mirror = approximation_ratio(&mirrored_dist, &mirrored);
        if failures[2].is_none()
            && !(relative_close(er, er_mirror, 1e-12) && relative_close(out, out_mirror, 1e-9))
        {
            failures[2] = Some(format!(
                "{spec} on {:?}: ER {er} vs {er_mirror}, ratio {out} vs {out_mirror}",
                profile.positions()
            ));
        }
    }
    let [er, mass, reflection] = failures;
    Ok(vec![
        PropertyOutcome::new("envy_ratio_at_least_one", trials, er),
        PropertyOutcome::new("distribution_mass_one", trials, mass),
        PropertyOutcome::new("reflection_symmetry", trials, reflection),
    ])
}
