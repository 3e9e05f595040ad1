//! Verification cases and reports, and the closed-form dominance checks.

use serde::Serialize;

use super::properties::PropertyOutcome;
use super::{
    empirical_guarantees_at_bias, empirical_guarantees_with, PredictionMode, SearchConfig, Witness,
    WorstCase,
};
use crate::analysis::{
    balrm_guarantees, bam_guarantees, bim_guarantees, birm_guarantees, lrm_instance_ratios,
    GuaranteePair,
};
use crate::error::{Error, Result};
use crate::mechanisms::{MechanismSpec, OPTIMAL_LRM_ALPHA, OPTIMAL_LRM_P};

/// Which predictions a case ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Setting {
    /// Every prediction in `[0, 1]`.
    Global,
    /// Predictions with bias `|ŷ − ½| = c`, see [`super::bias_band`].
    Bias { c: f64 },
}

/// How the empirical worst case is held against the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Equal within the tolerance.
    Tight,
    /// At most the closed form plus the tolerance.
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationCase {
    pub mechanism: MechanismSpec,
    pub setting: Setting,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportWitness {
    pub guarantee: &'static str,
    #[serde(flatten)]
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mechanism: MechanismSpec,
    pub setting: Setting,
    pub comparison: Comparison,
    pub empirical: GuaranteePair,
    pub closed_form: GuaranteePair,
    pub tolerance: f64,
    pub witnesses: Vec<ReportWitness>,
    pub pass: bool,
}

fn no_closed_form(spec: &MechanismSpec, setting: Setting) -> Error {
    Error::Usage(format!("no closed form for {spec} in setting {setting:?}"))
}

/// The closed-form guarantees that a case is checked against.
pub fn closed_form(spec: &MechanismSpec, setting: Setting) -> Result<GuaranteePair> {
    spec.validate()?;
    match (*spec, setting) {
        (MechanismSpec::Midpoint, Setting::Global) => Ok(GuaranteePair::new(1.0, 1.0)),
        (MechanismSpec::ConstantHalf, Setting::Global) => Ok(GuaranteePair::new(2.0, 2.0)),
        (MechanismSpec::AlphaBim { alpha }, Setting::Global) => bim_guarantees(alpha),
        (MechanismSpec::LrmConstant { alpha, p }, Setting::Global) if alpha <= 0.25 => {
            let (a, b) = lrm_instance_ratios(alpha, p)?;
            Ok(GuaranteePair::new(a.max(b), a.max(b)))
        }
        (MechanismSpec::Bam, Setting::Bias { c }) => bam_guarantees(c),
        (MechanismSpec::Bam, Setting::Global) => Ok(GuaranteePair {
            consistency: bam_guarantees(0.25)?.consistency,
            robustness: bam_guarantees(0.5)?.robustness,
        }),
        (MechanismSpec::AlphaBiRandomized { alpha }, Setting::Global) => birm_guarantees(alpha),
        (MechanismSpec::BiasAwareLrm, Setting::Bias { c }) => balrm_guarantees(c),
        (MechanismSpec::BiasAwareLrm, Setting::Global) => Ok(GuaranteePair {
            consistency: balrm_guarantees(0.0)?.consistency,
            robustness: balrm_guarantees(0.5)?.robustness,
        }),
        _ => Err(no_closed_form(spec, setting)),
    }
}

/// The standard parameter set.
pub fn standard_cases() -> Vec<VerificationCase> {
    let case = |mechanism, setting, comparison| VerificationCase {
        mechanism,
        setting,
        comparison,
    };
    let mut cases = vec![
        case(MechanismSpec::Midpoint, Setting::Global, Comparison::Tight),
        case(
            MechanismSpec::ConstantHalf,
            Setting::Global,
            Comparison::Tight,
        ),
    ];
    for alpha in [1.2, 1.5, 2.0] {
        cases.push(case(
            MechanismSpec::AlphaBim { alpha },
            Setting::Global,
            Comparison::Tight,
        ));
    }
    for (alpha, p) in [(OPTIMAL_LRM_ALPHA, OPTIMAL_LRM_P), (1.0 / 6.0, 4.0 / 11.0)] {
        cases.push(case(
            MechanismSpec::LrmConstant { alpha, p },
            Setting::Global,
            Comparison::Tight,
        ));
    }
    for c in [0.0, 0.1, 0.25, 0.3, 0.4, 0.5] {
        cases.push(case(
            MechanismSpec::Bam,
            Setting::Bias { c },
            Comparison::Tight,
        ));
    }
    for alpha in [1.2, 1.5, 2.0] {
        cases.push(case(
            MechanismSpec::AlphaBiRandomized { alpha },
            Setting::Global,
            Comparison::UpperBound,
        ));
    }
    for c in [0.1, 0.3, 0.45] {
        cases.push(case(
            MechanismSpec::BiasAwareLrm,
            Setting::Bias { c },
            Comparison::UpperBound,
        ));
    }
    cases
}

fn compare(
    empirical: &GuaranteePair,
    closed: &GuaranteePair,
    comparison: Comparison,
    tol: f64,
) -> bool {
    let pairs = [
        (empirical.consistency, closed.consistency),
        (empirical.robustness, closed.robustness),
    ];
    pairs.iter().all(|&(e, c)| match comparison {
        Comparison::Tight => e.approx_eq(c, tol),
        Comparison::UpperBound => e.le_within(c, tol),
    })
}

fn labelled<'a>(
    label: &'static str,
    worst: &'a WorstCase,
) -> impl Iterator<Item = ReportWitness> + 'a {
    worst.witnesses.iter().map(move |w| ReportWitness {
        guarantee: label,
        witness: w.clone(),
    })
}

/// Searches the empirical guarantees of one case and compares them.
pub fn verify_case(case: &VerificationCase, cfg: &SearchConfig) -> Result<VerificationReport> {
    let closed = closed_form(&case.mechanism, case.setting)?;
    let (empirical, consistency, robustness) = match case.setting {
        Setting::Global => empirical_guarantees_with(
            &case.mechanism,
            PredictionMode::Accurate,
            PredictionMode::Adversarial,
            cfg,
        )?,
        Setting::Bias { c } => empirical_guarantees_at_bias(&case.mechanism, c, cfg)?,
    };
    let mut witnesses: Vec<ReportWitness> = labelled("consistency", &consistency).collect();
    if case.mechanism.uses_prediction() {
        witnesses.extend(labelled("robustness", &robustness));
    }
    Ok(VerificationReport {
        mechanism: case.mechanism,
        setting: case.setting,
        comparison: case.comparison,
        pass: compare(&empirical, &closed, case.comparison, cfg.tolerance),
        empirical,
        closed_form: closed,
        tolerance: cfg.tolerance,
        witnesses,
    })
}

pub fn verify_cases(
    cases: &[VerificationCase],
    cfg: &SearchConfig,
) -> Result<Vec<VerificationReport>> {
    cases.iter().map(|case| verify_case(case, cfg)).collect()
}

/// [`verify_cases`] over [`standard_cases`].
pub fn verify_all(cfg: &SearchConfig) -> Result<Vec<VerificationReport>> {
    verify_cases(&standard_cases(), cfg)
}

/// BAM robustness `c + 2` against the α-BIM robustness at the same
/// consistency `α = 2 − 4c²`, strictly smaller at every `c ∈ [¼, ½)`.
pub fn bam_dominance_check(c_grid: &[f64]) -> Result<PropertyOutcome> {
    let mut margin = f64::INFINITY;
    let mut failure = None;
    for &c in c_grid {
        if !(0.25..0.5).contains(&c) {
            return Err(Error::Parameter {
                name: "c",
                value: c,
                range: "[1/4, 1/2)",
            });
        }
        let bam = bam_guarantees(c)?;
        let bim = bim_guarantees(bam.consistency.value())?;
        let gap = bim.robustness.value() - bam.robustness.value();
        margin = margin.min(gap);
        if !(gap > 0.0) && failure.is_none() {
            failure = Some(format!(
                "c = {c}: BAM {} vs BIM {}",
                bam.robustness, bim.robustness
            ));
        }
    }
    Ok(outcome("bam_dominates_bim", c_grid.len(), failure, margin))
}

/// Smallest BAM robustness among BAM guarantees with consistency at most
/// `gamma`, or `None` if BAM never reaches that consistency.
fn bam_robustness_at(gamma: f64) -> Option<f64> {
    if gamma < 1.0 {
        return None;
    }
    let c = (0.25f64).max(((2.0 - gamma.min(1.75)) / 4.0).sqrt());
    Some(c + 2.0)
}

/// Every bias-aware LRM guarantee is weakly dominated, in both coordinates,
/// by some BAM guarantee.
pub fn balrm_pareto_dominance(c_grid: &[f64]) -> Result<PropertyOutcome> {
    let mut margin = f64::INFINITY;
    let mut failure = None;
    for &c in c_grid {
        let balrm = balrm_guarantees(c)?;
        let gamma = balrm.consistency.value();
        let beta = balrm.robustness.value();
        let gap = bam_robustness_at(gamma).map_or(f64::NEG_INFINITY, |b| beta - b);
        margin = margin.min(gap);
        if !(gap >= 0.0) && failure.is_none() {
            failure = Some(format!(
                "c = {c}: no BAM guarantee dominates ({gamma}, {beta})"
            ));
        }
    }
    Ok(outcome(
        "bam_dominates_balrm",
        c_grid.len(),
        failure,
        margin,
    ))
}

fn outcome(name: &str, trials: usize, failure: Option<String>, margin: f64) -> PropertyOutcome {
    PropertyOutcome {
        name: name.into(),
        pass: failure.is_none(),
        trials,
        details: failure
            .unwrap_or_else(|| format!("{trials} grid points, minimum margin {margin:.6}")),
        counterexample: None,
    }
}
