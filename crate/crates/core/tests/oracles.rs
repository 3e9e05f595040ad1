//! Library values against independent, deliberately naive re-implementations.

use envyline::analysis::{
    balrm_guarantees, bam_guarantees, bim_error_curve, birm_guarantees, lrm_instance_ratios,
};
use envyline::mechanisms::{self, MechanismSpec};
use envyline::{approximation_ratio, LocationProfile, PlacementDistribution, Prediction};

/// Envy ratio of a deterministic placement, straight from the definition.
fn oracle_er(y: f64, xs: &[f64]) -> f64 {
    let utilities: Vec<f64> = xs.iter().map(|x| 1.0 - (y - x).abs()).collect();
    let max = utilities.iter().cloned().fold(f64::MIN, f64::max);
    let min = utilities.iter().cloned().fold(f64::MAX, f64::min);
    if max == min {
        1.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Expected envy ratio over `atoms`, divided by the best envy ratio of any
/// deterministic placement: a dense grid, then a ternary search around the
/// best grid point.
fn oracle_ratio(atoms: &[(f64, f64)], xs: &[f64]) -> f64 {
    let expected: f64 = atoms.iter().map(|&(y, p)| p * oracle_er(y, xs)).sum();
    let n = 20_000;
    let k = (0..=n)
        .min_by(|&a, &b| {
            oracle_er(a as f64 / n as f64, xs).total_cmp(&oracle_er(b as f64 / n as f64, xs))
        })
        .unwrap();
    let (mut lo, mut hi) = (
        ((k as f64 - 1.0) / n as f64).max(0.0),
        ((k as f64 + 1.0) / n as f64).min(1.0),
    );
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if oracle_er(a, xs) <= oracle_er(b, xs) {
            hi = b;
        } else {
            lo = a;
        }
    }
    expected / oracle_er(0.5 * (lo + hi), xs).min(oracle_er(k as f64 / n as f64, xs))
}

fn oracle_lrm(alpha: f64, p: f64) -> Vec<(f64, f64)> {
    vec![(0.5 - alpha, p), (0.5, 1.0 - 2.0 * p), (0.5 + alpha, p)]
}

fn oracle_bam(yhat: f64) -> Vec<(f64, f64)> {
    let q = 0.5 - (yhat - 0.5).abs();
    vec![(yhat, q), (0.5, 1.0 - q)]
}

/// Maximum of `f(x1, x2)` over `0 ≤ x1 ≤ x2 ≤ 1` on a plain grid.
fn oracle_sup(step: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let mut best = f64::MIN;
    for i in 0..=n {
        for j in i..=n {
            best = best.max(f(i as f64 * step, j as f64 * step));
        }
    }
    best
}

fn library_ratio(spec: &MechanismSpec, xs: &[f64], yhat: Option<f64>) -> f64 {
    let profile = LocationProfile::new(xs.to_vec()).unwrap();
    let dist = mechanisms::run(spec, &profile, yhat.map(|y| Prediction::new(y).unwrap())).unwrap();
    approximation_ratio(&dist, &profile).value()
}

#[test]
fn ratio_matches_the_oracle_on_fixed_instances() {
    type Case<'a> = (&'a [(f64, f64)], &'a [f64]);
    let cases: [Case; 4] = [
        (&[(0.5, 1.0)], &[0.0, 0.5]),
        (&[(0.25, 0.25), (0.5, 0.75)], &[0.0, 0.5]),
        (&[(0.1, 0.3), (0.8, 0.7)], &[0.2, 0.4, 0.9]),
        (&[(0.7, 1.0)], &[0.0, 0.5, 1.0]),
    ];
    for (atoms, xs) in cases {
        let dist = PlacementDistribution::new(atoms.iter().copied()).unwrap();
        let profile = LocationProfile::new(xs.to_vec()).unwrap();
        let lib = approximation_ratio(&dist, &profile).value();
        let oracle = oracle_ratio(atoms, xs);
        assert!(
            (lib - oracle).abs() < 1e-9,
            "{atoms:?} on {xs:?}: {lib} vs {oracle}"
        );
    }
}

#[test]
fn lrm_instance_ratios_match_direct_evaluation() {
    for (alpha, p) in [
        (0.05, 0.3),
        (0.118034, 0.4),
        (1.0 / 6.0, 4.0 / 11.0),
        (0.2, 0.25),
        (0.25, 0.5),
    ] {
        let (rx, rxp) = lrm_instance_ratios(alpha, p).unwrap();
        let atoms = oracle_lrm(alpha, p);
        assert!((rx - oracle_ratio(&atoms, &[0.0, 0.5])).abs() < 1e-9);
        assert!(
            (rxp - oracle_ratio(&atoms, &[0.0, 0.5 + alpha])).abs() < 1e-9,
            "{alpha} {p}"
        );
    }
}

#[test]
fn optimal_lrm_worst_case_by_plain_grid() {
    let atoms = oracle_lrm(5f64.sqrt() / 2.0 - 1.0, 0.4);
    let sup = oracle_sup(1e-3, |a, b| oracle_ratio_fast(&atoms, a, b));
    assert!((sup - (1.0 + 2.0 / 5f64.sqrt())).abs() < 1e-6, "{sup}");
}

/// Two-agent ratio with the optimum taken at the midpoint.
fn oracle_ratio_fast(atoms: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let expected: f64 = atoms.iter().map(|&(y, p)| p * oracle_er(y, &[a, b])).sum();
    expected / oracle_er(0.5 * (a + b), &[a, b])
}

#[test]
fn bim_consistency_and_robustness_by_plain_grid() {
    for alpha in [1.2f64, 1.5, 2.0] {
        let (lo, hi) = (1.0 - 1.0 / alpha, 1.0 / alpha);
        let consistency = oracle_sup(2e-3, |a, b| {
            let y = (0.5 * (a + b)).clamp(lo, hi);
            oracle_ratio_fast(&[(y, 1.0)], a, b)
        });
        // any prediction below the interval is clamped to its left end
        let robustness = oracle_sup(2e-3, |a, b| {
            oracle_ratio_fast(&[(lo, 1.0)], a, b).max(oracle_ratio_fast(&[(hi, 1.0)], a, b))
        });
        assert!((consistency - alpha).abs() < 5e-3, "{alpha}: {consistency}");
        assert!(
            (robustness - alpha / (alpha - 1.0)).abs() < 5e-3,
            "{alpha}: {robustness}"
        );
    }
}

#[test]
fn bam_bias_slices_by_plain_grid() {
    // consistency at bias c: profiles centred on ŷ = ½ − c
    for (c, consistency) in [(0.25, 1.75), (0.3, 1.64), (0.4, 1.36)] {
        let yhat: f64 = 0.5 - c;
        let atoms = oracle_bam(yhat);
        let n = 20_000;
        let sup = (0..=n)
            .map(|k| k as f64 / n as f64 * yhat)
            .map(|h| oracle_ratio_fast(&atoms, yhat - h, yhat + h))
            .fold(f64::MIN, f64::max);
        assert!((sup - consistency).abs() < 1e-3, "{c}: {sup}");
        let closed = bam_guarantees(c).unwrap().consistency.value();
        assert!((closed - consistency).abs() < 1e-12);
        let robust = oracle_sup(2e-3, |a, b| oracle_ratio_fast(&atoms, a, b));
        assert!((robust - (c + 2.0)).abs() < 5e-3, "{c}: {robust}");
    }
}

#[test]
fn appendix_bounds_dominate_plain_grid_values() {
    let lrm = oracle_lrm(5f64.sqrt() / 2.0 - 1.0, 0.4);
    for alpha in [1.2f64, 1.5, 2.0] {
        let (lo, hi) = (1.0 - 1.0 / alpha, 1.0 / alpha);
        let place = |yhat: f64| {
            if (lo..=hi).contains(&yhat) {
                vec![(yhat, 1.0)]
            } else {
                lrm.clone()
            }
        };
        let consistency = oracle_sup(2e-3, |a, b| oracle_ratio_fast(&place(0.5 * (a + b)), a, b));
        let g = birm_guarantees(alpha).unwrap();
        assert!(
            consistency <= g.consistency.value() + 5e-3,
            "{alpha}: {consistency}"
        );
    }
    for c in [0.1f64, 0.3, 0.45] {
        let yhat = 0.5 - c;
        let q = 0.5 - c;
        let mut atoms = vec![(yhat, q)];
        atoms.extend(lrm.iter().map(|&(y, p)| (y, p * (1.0 - q))));
        let robust = oracle_sup(2e-3, |a, b| oracle_ratio_fast(&atoms, a, b));
        let g = balrm_guarantees(c).unwrap();
        assert!(robust <= g.robustness.value() + 5e-3, "{c}: {robust}");
    }
}

#[test]
fn error_curve_examples_by_plain_grid() {
    // α-BIM, |ŷ − midpoint| ≤ η
    let alpha: f64 = 1.5;
    let (lo, hi) = (1.0 - 1.0 / alpha, 1.0 / alpha);
    let curve = bim_error_curve(alpha).unwrap();
    for eta in [0.0, 0.12, 0.2, 0.4] {
        let sup = oracle_sup(4e-3, |a, b| {
            let mid = 0.5 * (a + b);
            let mut best = f64::MIN;
            for k in 0..=40 {
                let yhat = mid - eta + 2.0 * eta * k as f64 / 40.0;
                if (0.0..=1.0).contains(&yhat) {
                    best = best.max(oracle_ratio_fast(&[(yhat.clamp(lo, hi), 1.0)], a, b));
                }
            }
            best
        });
        let closed = curve.evaluate(eta).unwrap().value();
        assert!((sup - closed).abs() < 2e-2, "eta {eta}: {sup} vs {closed}");
    }
}

#[test]
fn library_mechanisms_match_oracle_distributions() {
    let xs = [0.1, 0.35, 0.8];
    for yhat in [0.0, 0.2, 0.5, 0.77, 1.0] {
        let lib = library_ratio(&MechanismSpec::Bam, &xs, Some(yhat));
        assert!((lib - oracle_ratio(&oracle_bam(yhat), &xs)).abs() < 1e-9);
    }
    let lib = library_ratio(&MechanismSpec::optimal_lrm(), &xs, None);
    assert!((lib - oracle_ratio(&oracle_lrm(5f64.sqrt() / 2.0 - 1.0, 0.4), &xs)).abs() < 1e-9);
}
