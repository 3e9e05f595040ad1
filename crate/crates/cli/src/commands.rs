use std::path::Path;

use serde::Serialize;

use envyline::analysis::{
    balrm_guarantees, bam_guarantees, bim_error_curve, bim_frontier_identity, bim_guarantees,
    birm_guarantees, lower_bound_certificate, lrm_high_alpha_bound, p2_coefficient, GuaranteePair,
    LowerBoundCertificate,
};
use envyline::verify::{
    self, balrm_pareto_dominance, bam_dominance_check, core_invariants_test, fixtures, grid,
    lrm_objective, n_agent_spot_check, optimize_lrm, reduction_property_test, standard_cases,
    strategyproofness_test, strategyproofness_test_with, LrmBounds, LrmOptimum, PropertyOutcome,
    SearchConfig, VerificationReport,
};
use envyline::{ExtendedRatio, MechanismSpec};

use crate::args::{
    Cli, Command, CurveArgs, Format, FrontierArgs, FrontierMechanism, OptimizeLrmArgs, SearchArgs,
    Suite, VerifyArgs,
};
use crate::error::CliError;
use crate::format;
use crate::manifest::RunManifest;
use crate::output::{csv, emit, json_bytes, with_manifest};
use crate::range::Range;

/// Outcome of a command that completed without a usage or I/O error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    match &cli.command {
        Command::Frontier(args) => frontier(args),
        Command::Curve(args) => curve(args),
        Command::OptimizeLrm(args) => optimize(args),
        Command::Verify(args) => verify_suite(args),
    }
}

fn search_config(args: &SearchArgs) -> Result<SearchConfig, CliError> {
    let cfg = SearchConfig {
        coarse_step: args.coarse_step,
        refine_step: args.refine_step,
        refine_radius: args.refine_radius.unwrap_or(2.0 * args.coarse_step),
        tolerance: args.tolerance,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn search_params(manifest: RunManifest, cfg: &SearchConfig) -> RunManifest {
    manifest
        .param("coarse_step", format::number(cfg.coarse_step))
        .param("refine_step", format::number(cfg.refine_step))
        .param("refine_radius", format::number(cfg.refine_radius))
        .param("tolerance", format::number(cfg.tolerance))
}

/// Writes CSV (with a manifest sidecar) or JSON (with the manifest inline).
fn write_table(
    fmt: Format,
    path: Option<&Path>,
    header: &[&str],
    rows: &[Vec<String>],
    json_rows: &impl Serialize,
    manifest: &RunManifest,
) -> Result<(), CliError> {
    match fmt {
        Format::Csv => emit(path, &csv(header, rows), Some(manifest)),
        Format::Json => {
            #[derive(Serialize)]
            struct Table<'a, T> {
                command: &'a str,
                rows: &'a T,
            }
            let body = Table {
                command: &manifest.command,
                rows: json_rows,
            };
            emit(path, &json_bytes(&with_manifest(&body, manifest)?)?, None)
        }
    }
}

#[derive(Serialize)]
struct FrontierRow {
    mechanism: &'static str,
    param: f64,
    consistency: ExtendedRatio,
    robustness: ExtendedRatio,
}

type Formula = fn(f64) -> envyline::Result<GuaranteePair>;

fn frontier(args: &FrontierArgs) -> Result<Status, CliError> {
    let mut rows = Vec::new();
    let mut manifest = RunManifest::new("frontier", 0);
    let mechs: Vec<&str> = args.mech.iter().map(|m| mech_name(*m)).collect();
    manifest = manifest.param("mech", mechs.join(","));
    for &mech in &args.mech {
        let (range, default, formula): (&Option<Range>, &str, Formula) = match mech {
            FrontierMechanism::Bim => (&args.alpha, "1:2:0.01", bim_guarantees),
            FrontierMechanism::Birm => (&args.alpha, "1.01:2:0.01", birm_guarantees),
            FrontierMechanism::Bam => (&args.c, "0:0.5:0.01", bam_guarantees),
            FrontierMechanism::Balrm => (&args.c, "0:0.5:0.01", balrm_guarantees),
        };
        let range = match range {
            Some(r) => r.clone(),
            None => default.parse().map_err(CliError::Usage)?,
        };
        let key = if matches!(mech, FrontierMechanism::Bim | FrontierMechanism::Birm) {
            "alpha"
        } else {
            "c"
        };
        manifest = manifest.param(&format!("{}.{key}", mech_name(mech)), range.as_str());
        for &param in range.values() {
            let g = formula(param)?;
            rows.push(FrontierRow {
                mechanism: mech_name(mech),
                param,
                consistency: g.consistency,
                robustness: g.robustness,
            });
        }
    }
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.mechanism.to_string(),
                format::parameter(r.param),
                format::ratio(r.consistency),
                format::ratio(r.robustness),
            ]
        })
        .collect();
    manifest = manifest.param("format", format_name(args.format));
    write_table(
        args.format,
        args.output.as_deref(),
        &["mechanism", "param", "consistency", "robustness"],
        &text,
        &rows,
        &manifest,
    )?;
    Ok(Status::Pass)
}

fn mech_name(m: FrontierMechanism) -> &'static str {
    match m {
        FrontierMechanism::Bim => "bim",
        FrontierMechanism::Birm => "birm",
        FrontierMechanism::Bam => "bam",
        FrontierMechanism::Balrm => "balrm",
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

#[derive(Serialize)]
struct CurveRow {
    eta: f64,
    closed_form: ExtendedRatio,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<ExtendedRatio>,
}

fn curve(args: &CurveArgs) -> Result<Status, CliError> {
    let curve = bim_error_curve(args.alpha)?;
    let etas = args.eta.values();
    let mut manifest = RunManifest::new("curve", 0)
        .param("alpha", format::parameter(args.alpha))
        .param("eta", args.eta.as_str())
        .param("empirical", args.empirical.to_string())
        .param("format", format_name(args.format));
    let empirical = if args.empirical {
        let cfg = search_config(&args.search)?;
        manifest = search_params(manifest, &cfg);
        Some(verify::empirical_error_curve(args.alpha, etas, &cfg)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for (i, &eta) in etas.iter().enumerate() {
        rows.push(CurveRow {
            eta,
            closed_form: curve.evaluate(eta)?,
            empirical: empirical.as_ref().map(|e| e[i].1),
        });
    }
    let mut header = vec!["eta", "closed_form"];
    if args.empirical {
        header.push("empirical");
    }
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![format::number(r.eta), format::ratio(r.closed_form)];
            row.extend(r.empirical.map(format::ratio));
            row
        })
        .collect();
    write_table(
        args.format,
        args.output.as_deref(),
        &header,
        &text,
        &rows,
        &manifest,
    )?;
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    alpha_star: f64,
    p_star: f64,
    ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<&'static str>,
    evaluations: usize,
    trace: &'a [verify::LrmTraceStep],
}

const HIGH_RATIO_WARNING: &str = "ratio >= 2: no better than always placing the facility at 1/2";

fn optimize(args: &OptimizeLrmArgs) -> Result<Status, CliError> {
    let cfg = search_config(&args.search)?;
    let bounds = LrmBounds {
        alpha: (args.alpha_bounds.lo, args.alpha_bounds.hi),
        p: (args.p_bounds.lo, args.p_bounds.hi),
    };
    let opt: LrmOptimum = optimize_lrm(bounds, &cfg)?;
    let warning = (opt.ratio >= 2.0).then_some(HIGH_RATIO_WARNING);
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let manifest = RunManifest::new("optimize-lrm", 0)
        .param(
            "alpha_bounds",
            format!(
                "{}:{}",
                format::number(bounds.alpha.0),
                format::number(bounds.alpha.1)
            ),
        )
        .param(
            "p_bounds",
            format!(
                "{}:{}",
                format::number(bounds.p.0),
                format::number(bounds.p.1)
            ),
        );
    let manifest = search_params(manifest, &cfg);
    let body = OptimizeOutput {
        alpha_star: opt.alpha,
        p_star: opt.p,
        ratio: opt.ratio,
        warning,
        evaluations: opt.evaluations,
        trace: &opt.trace,
    };
    emit(
        args.output.as_deref(),
        &json_bytes(&with_manifest(&body, &manifest)?)?,
        None,
    )?;
    Ok(Status::Pass)
}

#[derive(Serialize)]
struct SuiteOutput {
    suite: &'static str,
    pass: bool,
    reports: Vec<VerificationReport>,
    checks: Vec<PropertyOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound: Option<LowerBoundCertificate>,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::All => "all",
        Suite::Guarantees => "guarantees",
        Suite::Sp => "sp",
        Suite::Reduction => "reduction",
        Suite::Invariants => "invariants",
        Suite::Lowerbound => "lowerbound",
        Suite::Dominance => "dominance",
    }
}

fn check(
    name: &str,
    failure: Option<String>,
    trials: usize,
    ok_details: String,
) -> PropertyOutcome {
    PropertyOutcome {
        name: name.to_string(),
        pass: failure.is_none(),
        trials,
        details: failure.unwrap_or(ok_details),
        counterexample: None,
    }
}

/// Distinct mechanisms of the standard verification set.
fn standard_mechanisms() -> Vec<MechanismSpec> {
    let mut specs: Vec<MechanismSpec> = Vec::new();
    for case in standard_cases() {
        if !specs.contains(&case.mechanism) {
            specs.push(case.mechanism);
        }
    }
    specs
}

fn guarantee_checks(cfg: &SearchConfig) -> Result<Vec<PropertyOutcome>, CliError> {
    let mut checks = Vec::new();

    let alphas: Vec<f64> = (1..=100).map(|k| 1.0 + k as f64 / 100.0).collect();
    let worst = alphas
        .iter()
        .map(|&a| bim_frontier_identity(a).map(|v| (v - 1.0).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(check(
        "bim_frontier_identity",
        (worst > 1e-12).then(|| format!("|1/γ + 1/β − 1| reaches {worst:e}")),
        alphas.len(),
        format!("max |1/γ + 1/β − 1| = {worst:e}"),
    ));

    for alpha in [1.3, 1.8] {
        let curve = bim_error_curve(alpha)?;
        let etas = grid(0.0, 0.6, 0.025);
        let measured = verify::empirical_error_curve(alpha, &etas, cfg)?;
        let mut failure = None;
        let mut worst: f64 = 0.0;
        for (i, &(eta, value)) in measured.iter().enumerate() {
            let closed = curve.evaluate(eta)?;
            if !value.approx_eq(closed, cfg.tolerance) && failure.is_none() {
                failure = Some(format!(
                    "eta = {eta}: empirical {value} vs closed form {closed}"
                ));
            }
            if closed.is_unbounded() != value.is_unbounded() {
                worst = f64::INFINITY;
            } else if let (Some(a), Some(b)) = (value.finite(), closed.finite()) {
                worst = worst.max((a - b).abs());
            }
            if i > 0
                && value.value() < measured[i - 1].1.value() - cfg.tolerance
                && failure.is_none()
            {
                failure = Some(format!("empirical curve decreases at eta = {eta}"));
            }
        }
        checks.push(check(
            &format!("error_curve/alpha={alpha}"),
            failure,
            etas.len(),
            format!("max |empirical − closed form| = {worst:.3e}"),
        ));
    }

    let sqrt5 = 5f64.sqrt();
    for (name, bounds, target) in [
        (
            "lrm_optimum",
            LrmBounds::default(),
            (sqrt5 / 2.0 - 1.0, 0.4, 1.0 + 2.0 / sqrt5),
        ),
        (
            "lrm_restricted_optimum",
            LrmBounds {
                alpha: (1.0 / 6.0, 0.25),
                p: (0.0, 0.5),
            },
            (1.0 / 6.0, 4.0 / 11.0, 21.0 / 11.0),
        ),
    ] {
        let opt = optimize_lrm(bounds, cfg)?;
        let ok = (opt.alpha - target.0).abs() <= 1e-3
            && (opt.p - target.1).abs() <= 1e-3
            && (opt.ratio - target.2).abs() <= 1e-4;
        let summary = format!(
            "alpha* = {:.6}, p* = {:.6}, ratio = {:.6}",
            opt.alpha, opt.p, opt.ratio
        );
        checks.push(check(
            name,
            (!ok).then(|| summary.clone()),
            opt.evaluations,
            summary,
        ));
    }

    let mut failure = None;
    let mut lowest = f64::INFINITY;
    let ps = grid(0.0, 0.5, 1e-3);
    for alpha in [0.3, 0.35, 0.4, 0.45, 0.5] {
        for &p in &ps {
            let v = lrm_objective(alpha, p)?.value();
            lowest = lowest.min(v);
            if v < 2.0 - 1e-9 && failure.is_none() {
                failure = Some(format!("alpha = {alpha}, p = {p}: ratio {v}"));
            }
        }
        let formula = lrm_high_alpha_bound(alpha)?;
        if formula < ExtendedRatio::new(2.0 - 1e-9) && failure.is_none() {
            failure = Some(format!("alpha = {alpha}: formula value {formula}"));
        }
    }
    checks.push(check(
        "lrm_high_alpha_at_least_two",
        failure,
        5 * ps.len(),
        format!("min over sampled alpha > 1/4 and p of the ratio = {lowest:.9}"),
    ));
    Ok(checks)
}

fn sp_checks(trials: usize, seed: u64) -> Result<Vec<PropertyOutcome>, CliError> {
    let mut checks = Vec::new();
    for spec in standard_mechanisms() {
        if spec == MechanismSpec::Midpoint {
            continue;
        }
        checks.push(strategyproofness_test(&spec, trials, seed)?);
    }
    for (name, outcome) in [
        (
            "midpoint",
            strategyproofness_test_with("midpoint", fixtures::midpoint, false, trials, seed)?,
        ),
        (
            "mean",
            strategyproofness_test_with("mean", fixtures::mean_of_positions, false, trials, seed)?,
        ),
    ] {
        // a negative control passes when the tester catches it
        checks.push(PropertyOutcome {
            name: format!("negative_control/{name}"),
            pass: !outcome.pass,
            trials: outcome.trials,
            details: if outcome.pass {
                "manipulation not detected".to_string()
            } else {
                format!("detected: {}", outcome.details)
            },
            counterexample: outcome.counterexample,
        });
    }
    Ok(checks)
}

fn reduction_checks(trials: usize, seed: u64) -> Result<Vec<PropertyOutcome>, CliError> {
    let mut checks = vec![reduction_property_test(trials, seed)?];
    for spec in standard_mechanisms() {
        checks.push(n_agent_spot_check(&spec)?);
    }
    Ok(checks)
}

fn lower_bound_check() -> (PropertyOutcome, LowerBoundCertificate) {
    let cert = lower_bound_certificate();
    let residual = p2_coefficient(cert.delta);
    let ok = (cert.delta - 617.0 / 4300.0).abs() <= 1e-9
        && (cert.bound - 1.12579).abs() <= 1e-5
        && residual.abs() <= 1e-12;
    let details = format!(
        "delta* = {:.9} (617/4300 = {:.9}), bound = {:.6}, p2 coefficient = {residual:e}",
        cert.delta,
        617.0 / 4300.0,
        cert.bound
    );
    (
        check(
            "lower_bound_certificate",
            (!ok).then(|| details.clone()),
            1,
            details,
        ),
        cert,
    )
}

fn dominance_checks() -> Result<Vec<PropertyOutcome>, CliError> {
    Ok(vec![
        bam_dominance_check(&grid(0.25, 0.499, 1e-3))?,
        balrm_pareto_dominance(&grid(0.0, 0.5, 1e-3))?,
    ])
}

fn verify_suite(args: &VerifyArgs) -> Result<Status, CliError> {
    let cfg = search_config(&args.search)?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let suite = args.suite;
    let wants = |s: Suite| suite == Suite::All || suite == s;
    let mut out = SuiteOutput {
        suite: suite_name(suite),
        pass: true,
        reports: Vec::new(),
        checks: Vec::new(),
        lower_bound: None,
    };
    if wants(Suite::Guarantees) {
        out.reports = verify::verify_all(&cfg)?;
        out.checks.extend(guarantee_checks(&cfg)?);
    }
    if wants(Suite::Sp) {
        out.checks.extend(sp_checks(args.trials, args.seed)?);
    }
    if wants(Suite::Reduction) {
        out.checks.extend(reduction_checks(args.trials, args.seed)?);
    }
    if wants(Suite::Invariants) {
        out.checks
            .extend(core_invariants_test(args.trials, args.seed)?);
    }
    if wants(Suite::Lowerbound) {
        let (check, cert) = lower_bound_check();
        out.checks.push(check);
        out.lower_bound = Some(cert);
    }
    if wants(Suite::Dominance) {
        out.checks.extend(dominance_checks()?);
    }
    out.pass = out.reports.iter().all(|r| r.pass) && out.checks.iter().all(|c| c.pass);

    for r in out.reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} {:?}", r.mechanism, r.setting);
    }
    for c in out.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {}", c.name, c.details);
    }

    let manifest = RunManifest::new("verify", args.seed)
        .param("suite", out.suite)
        .param("trials", args.trials.to_string());
    let manifest = search_params(manifest, &cfg);
    emit(
        args.output.as_deref(),
        &json_bytes(&with_manifest(&out, &manifest)?)?,
        None,
    )?;
    Ok(if out.pass { Status::Pass } else { Status::Fail })
}
