use crate::distribution::PlacementDistribution;
use crate::error::Result;
use crate::profile::{check_unit, LocationProfile};
use crate::ratio::ExtendedRatio;

/// Utility of an agent at `x` for a facility at `y`: `1 − |y − x|`.
pub fn utility(y: f64, x: f64) -> Result<f64> {
    check_unit("facility location", y)?;
    check_unit("agent location", x)?;
    Ok(1.0 - (y - x).abs())
}

/// Largest over smallest agent utility for a facility at `y`.
///
/// Profiles whose agents all coincide (including `n = 1`) have envy ratio 1
/// whatever `y` is. A zero minimum utility gives `+∞`.
pub fn envy_ratio(y: f64, profile: &LocationProfile) -> Result<ExtendedRatio> {
    check_unit("facility location", y)?;
    Ok(envy_ratio_unchecked(y, profile))
}

pub(crate) fn envy_ratio_unchecked(y: f64, profile: &LocationProfile) -> ExtendedRatio {
    if profile.is_degenerate() {
        return ExtendedRatio::ONE;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in profile.positions() {
        let u = 1.0 - (y - x).abs();
        lo = lo.min(u);
        hi = hi.max(u);
    }
    ExtendedRatio::quotient(hi, lo)
}

/// `Σ P(y) · ER(y, x)` over the atoms of `dist`.
pub fn expected_envy_ratio(
    dist: &PlacementDistribution,
    profile: &LocationProfile,
) -> ExtendedRatio {
    let mut total = 0.0;
    for atom in dist.atoms() {
        let er = envy_ratio_unchecked(atom.location, profile);
        if er.is_unbounded() {
            return ExtendedRatio::UNBOUNDED;
        }
        total += atom.probability * er.value();
    }
    ExtendedRatio::new(total)
}

/// Expected utility `1 − E|y − x|` of an agent at `x`.
pub fn expected_utility(dist: &PlacementDistribution, x: f64) -> f64 {
    1.0 - dist
        .atoms()
        .iter()
        .map(|a| a.probability * (a.location - x).abs())
        .sum::<f64>()
}

/// The midpoint of the extreme agents, which minimizes the envy ratio.
pub fn optimal_location(profile: &LocationProfile) -> f64 {
    (profile.leftmost() + profile.rightmost()) / 2.0
}

pub fn optimal_envy_ratio(profile: &LocationProfile) -> ExtendedRatio {
    envy_ratio_unchecked(optimal_location(profile), profile)
}

/// Expected envy ratio of `dist` relative to the optimum on `profile`.
///
/// The optimal envy ratio is a per-profile constant, so this is also the
/// expectation of the per-location ratio `ER(y, x) / ER(OPT, x)`.
pub fn approximation_ratio(
    dist: &PlacementDistribution,
    profile: &LocationProfile,
) -> ExtendedRatio {
    let expected = expected_envy_ratio(dist, profile);
    if expected.is_unbounded() {
        return expected;
    }
    ExtendedRatio::new(expected.value() / optimal_envy_ratio(profile).value())
}
