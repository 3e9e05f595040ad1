use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub probability: f64,
}

/// A finite-support distribution over facility locations in `[0, 1]`.
///
/// Atoms are sorted by location, carry strictly positive mass, and sit at
/// distinct locations: on construction locations are rounded to 15
/// significant digits, atoms landing on the same location are merged and
/// zero-mass atoms are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PlacementDistribution {
    atoms: Vec<Atom>,
}

fn round_significant(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exponent = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - exponent);
    (x * scale).round() / scale
}

impl PlacementDistribution {
    pub fn new<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut merged: Vec<Atom> = Vec::with_capacity(4);
        let mut total = 0.0;
        for (location, probability) in atoms {
            if !(0.0..=1.0).contains(&location) {
                return Err(Error::domain("facility location", location, "[0, 1]"));
            }
            if !(0.0..=1.0 + PROBABILITY_TOLERANCE).contains(&probability) {
                return Err(Error::Distribution(format!(
                    "probability {probability} at {location} is not in [0, 1]"
                )));
            }
            total += probability;
            if probability == 0.0 {
                continue;
            }
            let location = round_significant(location, 15).clamp(0.0, 1.0);
            match merged.iter_mut().find(|a| a.location == location) {
                Some(atom) => atom.probability += probability,
                None => merged.push(Atom {
                    location,
                    probability,
                }),
            }
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        merged.sort_by(|a, b| a.location.total_cmp(&b.location));
        Ok(PlacementDistribution { atoms: merged })
    }

    /// The deterministic placement at `location`.
    pub fn point(location: f64) -> Result<Self> {
        Self::new([(location, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_deterministic(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.probability).sum()
    }

    /// Probability of the atom at `location`, 0 if there is none.
    pub fn mass_at(&self, location: f64) -> f64 {
        let location = round_significant(location, 15);
        self.atoms
            .iter()
            .find(|a| a.location == location)
            .map_or(0.0, |a| a.probability)
    }

    /// `weight · self + (1 − weight) · other`.
    pub fn mix(&self, weight: f64, other: &PlacementDistribution) -> Result<Self> {
        let left = self
            .atoms
            .iter()
            .map(|a| (a.location, weight * a.probability));
        let right = other
            .atoms
            .iter()
            .map(|a| (a.location, (1.0 - weight) * a.probability));
        Self::new(left.chain(right))
    }

    /// Mirror image under `y ↦ 1 − y`.
    pub fn reflect(&self) -> PlacementDistribution {
        let atoms = self.atoms.iter().map(|a| (1.0 - a.location, a.probability));
        Self::new(atoms).expect("reflection preserves validity")
    }

    /// Approximate equality of two distributions as measures.
    pub fn approx_eq(&self, other: &PlacementDistribution, tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| {
                (a.location - b.location).abs() <= tol
                    && (a.probability - b.probability).abs() <= tol
            })
    }
}

/// One seeded draw from `dist`, for simulation use.
pub fn sample(dist: &PlacementDistribution, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw(dist, &mut rng)
}

pub(crate) fn draw<R: Rng>(dist: &PlacementDistribution, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for atom in dist.atoms() {
        acc += atom.probability;
        if u < acc {
            return atom.location;
        }
    }
    dist.atoms().last().map(|a| a.location).unwrap_or(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_coincident_atoms_and_drops_empty_ones() {
        let d = PlacementDistribution::new([(0.5, 0.25), (0.2, 0.0), (0.5, 0.75)]).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.mass_at(0.5), 1.0);
        let d = PlacementDistribution::new([(0.7, 0.5), (0.1 + 0.2, 0.25), (0.3, 0.25)]).unwrap();
        assert_eq!(d.atoms().len(), 2);
        assert_eq!(d.atoms()[0].location, 0.3);
        assert_eq!(d.atoms()[0].probability, 0.5);
    }

    #[test]
    fn rejects_invalid_mass() {
        assert!(PlacementDistribution::new([(0.5, 0.9)]).is_err());
        assert!(PlacementDistribution::new([(0.5, 1.5), (0.2, -0.5)]).is_err());
        assert!(PlacementDistribution::new([(1.5, 1.0)]).is_err());
    }

    #[test]
    fn seeded_sampling_is_reproducible_and_follows_the_weights() {
        let d = PlacementDistribution::new([(0.25, 0.25), (0.5, 0.75)]).unwrap();
        assert_eq!(sample(&d, 7), sample(&d, 7));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..20_000).filter(|_| draw(&d, &mut rng) == 0.25).count();
        let freq = hits as f64 / 20_000.0;
        assert!((freq - 0.25).abs() < 0.02, "{freq}");
    }
}
