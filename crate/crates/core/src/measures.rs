//! Exact probability distributions over profiles.
//!
//! Weights are kept both as normalized rationals and as integer numerators
//! over one common denominator, so that event probabilities are plain
//! integer sums followed by a single normalization.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::orders::{factorial, LinearOrder, ProfileSpace, Voter, VoterPermutation};
use crate::ratio::{self, Rational};

pub const DISTRIBUTION_FORMAT_VERSION: u32 = 1;

/// A probability distribution on `L(A)^n`, dense and exact.
pub struct Distribution {
    space: Arc<ProfileSpace>,
    weights: Vec<Rational>,
    numerators: Vec<BigInt>,
    denominator: BigInt,
    full_support: OnceLock<bool>,
    invariant: OnceLock<bool>,
}

impl Distribution {
    /// Validates non-negativity and unit mass.
    pub fn from_weights(space: Arc<ProfileSpace>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.profile_count() {
            return Err(mismatch(space.profile_count(), weights.len()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "negative weight {}",
                ratio::to_fraction_string(w)
            )));
        }
        let dist = Self::build(space, weights);
        let mass = dist.total_mass();
        if !mass.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "total mass {} != 1",
                ratio::to_fraction_string(&mass)
            )));
        }
        Ok(dist)
    }

    fn build(space: Arc<ProfileSpace>, weights: Vec<Rational>) -> Self {
        let denominator = weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let numerators = weights
            .iter()
            .map(|w| w.numer() * (&denominator / w.denom()))
            .collect();
        Self {
            space,
            weights,
            numerators,
            denominator,
            full_support: OnceLock::new(),
            invariant: OnceLock::new(),
        }
    }

    /// Impartial culture: every profile has weight `1/(m!)^n`.
    pub fn uniform(n: usize, m: usize) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        let w = Rational::new(BigInt::one(), BigInt::from(space.profile_count()));
        let weights = vec![w; space.profile_count()];
        Ok(Self::build(space, weights))
    }

    pub fn point_mass(n: usize, m: usize, profile: usize) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        if profile >= space.profile_count() {
            return Err(Error::IndexOutOfRange(profile, space.profile_count()));
        }
        let mut weights = vec![ratio::zero(); space.profile_count()];
        weights[profile] = ratio::one();
        Ok(Self::build(space, weights))
    }

    /// Upper bound (exclusive) on the admissible ε for `m` candidates: `1 - 2/m!`.
    pub fn epsilon_bound(m: usize) -> Result<Rational> {
        let orders = factorial(m).ok_or_else(|| Error::ScaleExceeded(format!("{m}!")))?;
        Ok(ratio::one() - Rational::new(BigInt::from(2), BigInt::from(orders)))
    }

    /// Checks `m >= 3` and `0 < ε < 1 - 2/m!`.
    pub fn check_epsilon(m: usize, eps: &Rational) -> Result<()> {
        if m < 3 {
            return Err(Error::TooFewCandidates { min: 3, got: m });
        }
        let bound = Self::epsilon_bound(m)?;
        if !eps.is_positive() || eps >= &bound {
            return Err(Error::EpsilonOutOfRange {
                eps: ratio::to_fraction_string(eps),
                bound: ratio::to_fraction_string(&bound),
            });
        }
        Ok(())
    }

    /// Weight `1 - ε` on the unanimous profile `(y, …, y)` over `k` voters,
    /// the remaining `ε` spread evenly over every other profile.
    pub fn star(k: usize, m: usize, eps: &Rational, y: &LinearOrder) -> Result<Self> {
        Self::check_epsilon(m, eps)?;
        if y.candidates() != m {
            return Err(mismatch(format!("order on {m} candidates"), y.candidates()));
        }
        let space = ProfileSpace::shared(k, m)?;
        let peak = space.unanimous_index(y.index());
        let rest = eps / Rational::from_integer(BigInt::from(space.profile_count() - 1));
        let mut weights = vec![rest; space.profile_count()];
        weights[peak] = ratio::one() - eps;
        Ok(Self::build(space, weights))
    }

    /// The lifting `μ^[i]` to `n + 1` voters:
    /// `μ^[i](x) = Σ_τ μ(v_i(τ⃗(x))) / ((n+1)! · m!)`, summed literally over
    /// all permutations `τ` of the `n + 1` voters.
    pub fn lift(&self, i: Voter) -> Result<Self> {
        let inner = &self.space;
        let n = inner.voters() + 1;
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        let outer = ProfileSpace::shared(n, inner.candidates())?;
        let perms = VoterPermutation::all(n);
        let scale = &self.denominator
            * BigInt::from(factorial(n).unwrap())
            * BigInt::from(outer.order_count());
        let mut digits = vec![0; n];
        let mut dropped = Vec::with_capacity(n - 1);
        let weights = (0..outer.profile_count())
            .map(|k| {
                outer.fill_digits(k, &mut digits);
                let total: BigInt = perms
                    .iter()
                    .map(|tau| {
                        dropped.clear();
                        dropped.extend((0..n).filter(|&j| j != i).map(|j| digits[tau.image(j)]));
                        &self.numerators[inner.index_of_digits(&dropped)]
                    })
                    .sum();
                Rational::new(total, scale.clone())
            })
            .collect();
        Ok(Self::build(outer, weights))
    }

    pub fn space(&self) -> &Arc<ProfileSpace> {
        &self.space
    }

    pub fn voters(&self) -> usize {
        self.space.voters()
    }

    pub fn candidates(&self) -> usize {
        self.space.candidates()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, profile: usize) -> &Rational {
        &self.weights[profile]
    }

    pub fn total_mass(&self) -> Rational {
        self.probability(|_| true)
    }

    /// Exact `Prob_{x∼μ}[event(x)]` where `event` receives profile indices.
    pub fn probability(&self, mut event: impl FnMut(usize) -> bool) -> Rational {
        let hits: BigInt = self
            .numerators
            .iter()
            .enumerate()
            .filter(|&(k, w)| !w.is_zero() && event(k))
            .map(|(_, w)| w)
            .sum();
        Rational::new(hits, self.denominator.clone())
    }

    pub fn has_full_support(&self) -> bool {
        *self
            .full_support
            .get_or_init(|| self.numerators.iter().all(|w| w.is_positive()))
    }

    /// `μ ∘ π⃗ = μ` for every voter permutation `π`.
    pub fn is_permutation_invariant(&self) -> bool {
        *self.invariant.get_or_init(|| {
            VoterPermutation::all(self.voters()).iter().all(|pi| {
                (0..self.space.profile_count())
                    .all(|k| self.numerators[self.space.permute_index(k, pi)] == self.numerators[k])
            })
        })
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            format_version: DISTRIBUTION_FORMAT_VERSION,
            n: self.voters(),
            m: self.candidates(),
            weights: self.weights.clone(),
        }
    }

    pub fn from_file(file: DistributionFile) -> Result<Self> {
        if file.format_version != DISTRIBUTION_FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(file.format_version));
        }
        Self::from_weights(ProfileSpace::shared(file.n, file.m)?, file.weights)
    }
}

impl Clone for Distribution {
    fn clone(&self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            weights: self.weights.clone(),
            numerators: self.numerators.clone(),
            denominator: self.denominator.clone(),
            full_support: self.full_support.clone(),
            invariant: self.invariant.clone(),
        }
    }
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.voters() == other.voters()
            && self.candidates() == other.candidates()
            && self.weights == other.weights
    }
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution")
            .field("n", &self.voters())
            .field("m", &self.candidates())
            .field("denominator", &self.denominator)
            .finish()
    }
}

/// On-disk form of a distribution; weights are `"p/q"` strings indexed by profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    #[serde(with = "ratio::serde_fraction::vec")]
    pub weights: Vec<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rational;

    #[test]
    fn uniform_examples() {
        let u = Distribution::uniform(2, 3).unwrap();
        assert_eq!(u.weights().len(), 36);
        assert!(u.weights().iter().all(|w| *w == rational(1, 36)));
        let u1 = Distribution::uniform(1, 3).unwrap();
        assert!(u1.weights().iter().all(|w| *w == rational(1, 6)));
        assert!(u.total_mass().is_one());
        assert!(u.has_full_support());
        assert!(u.is_permutation_invariant());
    }

    #[test]
    fn star_examples() {
        let y = LinearOrder::identity(3);
        let star = Distribution::star(2, 3, &rational(1, 2), &y).unwrap();
        assert_eq!(star.weight(0), &rational(1, 2));
        assert!(star.weights()[1..].iter().all(|w| *w == rational(1, 70)));
        assert!(star.total_mass().is_one());
        assert!(star.has_full_support());
        assert!(star.is_permutation_invariant());

        assert!(matches!(
            Distribution::star(2, 3, &rational(2, 3), &y),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(Distribution::star(2, 3, &rational(0, 1), &y).is_err());
        assert!(matches!(
            Distribution::star(2, 2, &rational(1, 10), &LinearOrder::identity(2)),
            Err(Error::TooFewCandidates { .. })
        ));
    }

    #[test]
    fn star_with_other_peak() {
        let y = LinearOrder::from_index(3, 4).unwrap();
        let star = Distribution::star(2, 3, &rational(1, 3), &y).unwrap();
        assert_eq!(star.weight(4 * 6 + 4), &rational(2, 3));
        assert_eq!(star.weight(0), &rational(1, 105));
    }

    #[test]
    fn point_mass_is_degenerate() {
        // profile (index 0, index 1): swapping voters moves the mass
        let p = Distribution::point_mass(2, 3, 1).unwrap();
        assert!(!p.has_full_support());
        assert!(!p.is_permutation_invariant());
        assert!(p.total_mass().is_one());
    }

    #[test]
    fn lift_of_one_voter_uniform_is_uniform() {
        let u1 = Distribution::uniform(1, 3).unwrap();
        let lifted = u1.lift(1).unwrap();
        assert_eq!(lifted, Distribution::uniform(2, 3).unwrap());
        assert!(u1.lift(2).is_err());
    }

    #[test]
    fn lift_of_star_is_invariant_with_full_support() {
        let y = LinearOrder::identity(3);
        let star = Distribution::star(2, 3, &rational(1, 2), &y).unwrap();
        let lifted = star.lift(2).unwrap();
        assert_eq!(lifted.weights().len(), 216);
        assert!(lifted.total_mass().is_one());
        assert!(lifted.has_full_support());
        assert!(lifted.is_permutation_invariant());
    }

    #[test]
    fn from_weights_validates() {
        let space = ProfileSpace::shared(1, 3).unwrap();
        assert!(Distribution::from_weights(space.clone(), vec![rational(1, 6); 5]).is_err());
        assert!(Distribution::from_weights(space.clone(), vec![rational(1, 5); 6]).is_err());
        let mut w = vec![rational(1, 4); 6];
        w[0] = rational(-1, 4);
        w[1] = rational(1, 4);
        assert!(Distribution::from_weights(space.clone(), w).is_err());
        let d = Distribution::from_weights(space, vec![rational(1, 6); 6]).unwrap();
        assert_eq!(Distribution::from_file(d.to_file()).unwrap(), d);
    }

    #[test]
    fn file_uses_fraction_strings() {
        let d = Distribution::uniform(1, 3).unwrap();
        let json = serde_json::to_string(&d.to_file()).unwrap();
        assert_eq!(
            json,
            r#"{"format_version":1,"n":1,"m":3,"weights":["1/6","1/6","1/6","1/6","1/6","1/6"]}"#
        );
    }
}
