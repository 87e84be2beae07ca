//! Candidates, strict linear orders, profiles, and the structural maps on
//! profiles: voter relabeling, collapsing onto one voter, and dropping a voter.
//!
//! Every finite object here has a dense integer index. Orders of `m`
//! candidates are indexed by the lexicographic rank of their ranking
//! sequence, and a profile of `n` ballots is the base-`m!` number whose
//! digits are its ballots' order indices, voter 0 being the most
//! significant digit. These conventions are normative for every file
//! format the lab reads or writes.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;

use crate::error::{mismatch, Error, Result};

pub type Candidate = usize;
pub type Voter = usize;

/// Environment variable that lifts the default scale bounds.
pub const SCALE_OVERRIDE_VAR: &str = "ARROWLAB_SCALE_OVERRIDE";

/// Largest candidate count representable at all (pair bitmasks are `u32`).
const HARD_MAX_CANDIDATES: usize = 8;

/// A strict total order on `0..m`, most-preferred candidate first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearOrder {
    ranking: Vec<Candidate>,
}

impl LinearOrder {
    pub fn new(ranking: Vec<Candidate>) -> Result<Self> {
        let m = ranking.len();
        if m == 0 {
            return Err(Error::InvalidOrder(ranking));
        }
        let mut seen = vec![false; m];
        for &c in &ranking {
            if c >= m || seen[c] {
                return Err(Error::InvalidOrder(ranking));
            }
            seen[c] = true;
        }
        Ok(Self { ranking })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            ranking: (0..m).collect(),
        }
    }

    /// Builds the order with lexicographic rank `index` among all orders of `m` candidates.
    pub fn from_index(m: usize, index: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::TooFewCandidates { min: 1, got: 0 });
        }
        let total = factorial(m).ok_or_else(|| Error::ScaleExceeded(format!("{m}! overflows")))?;
        if index >= total {
            return Err(Error::IndexOutOfRange(index, total));
        }
        let mut pool: Vec<Candidate> = (0..m).collect();
        let mut rest = index;
        let mut ranking = Vec::with_capacity(m);
        for k in (0..m).rev() {
            let block = factorial(k).unwrap();
            let digit = rest / block;
            rest %= block;
            ranking.push(pool.remove(digit));
        }
        Ok(Self { ranking })
    }

    /// Lexicographic rank of the ranking sequence (its canonical index).
    pub fn index(&self) -> usize {
        let m = self.ranking.len();
        let mut idx = 0;
        for (pos, &c) in self.ranking.iter().enumerate() {
            let smaller_later = self.ranking[pos + 1..].iter().filter(|&&d| d < c).count();
            idx += smaller_later * factorial(m - 1 - pos).unwrap();
        }
        idx
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    pub fn candidates(&self) -> usize {
        self.ranking.len()
    }

    /// Position of `c` in the ranking (0 is top).
    pub fn position(&self, c: Candidate) -> Option<usize> {
        self.ranking.iter().position(|&d| d == c)
    }

    /// `a ℓ b`: true iff `a` is ranked above `b`.
    pub fn prefers(&self, a: Candidate, b: Candidate) -> Result<bool> {
        let m = self.candidates();
        if a >= m {
            return Err(Error::CandidateOutOfRange(a, m));
        }
        if b >= m {
            return Err(Error::CandidateOutOfRange(b, m));
        }
        if a == b {
            return Err(Error::SameCandidate(a));
        }
        Ok(self.position(a) < self.position(b))
    }

    pub fn reversed(&self) -> Self {
        Self {
            ranking: self.ranking.iter().rev().copied().collect(),
        }
    }
}

impl fmt::Debug for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.ranking.iter().join(","))
    }
}

/// All `m!` orders in lexicographic order of their rankings.
pub fn enumerate_orders(m: usize) -> Result<Vec<LinearOrder>> {
    if m == 0 {
        return Err(Error::TooFewCandidates { min: 1, got: 0 });
    }
    if m > HARD_MAX_CANDIDATES {
        return Err(Error::ScaleExceeded(format!("{m} candidates")));
    }
    Ok((0..m)
        .permutations(m)
        .map(|ranking| LinearOrder { ranking })
        .collect())
}

pub fn factorial(k: usize) -> Option<usize> {
    (1..=k).try_fold(1usize, |acc, x| acc.checked_mul(x))
}

/// Unordered candidate pairs `(a, b)` with `a < b`, in lexicographic order.
/// The position of a pair in this list is its bit in pair masks.
pub fn candidate_pairs(m: usize) -> Vec<(Candidate, Candidate)> {
    (0..m).tuple_combinations().collect()
}

/// A bijection on voters, `mapping[i] = π(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoterPermutation {
    mapping: Vec<Voter>,
}

impl VoterPermutation {
    pub fn new(mapping: Vec<Voter>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(mapping));
            }
            seen[v] = true;
        }
        if n == 0 {
            return Err(Error::InvalidPermutation(mapping));
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: Voter, j: Voter) -> Result<Self> {
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        if j >= n {
            return Err(Error::VoterOutOfRange(j, n));
        }
        let mut mapping: Vec<Voter> = (0..n).collect();
        mapping.swap(i, j);
        Ok(Self { mapping })
    }

    /// Every permutation of `0..n`, lexicographic.
    pub fn all(n: usize) -> Vec<Self> {
        (0..n)
            .permutations(n)
            .map(|mapping| Self { mapping })
            .collect()
    }

    pub fn voters(&self) -> usize {
        self.mapping.len()
    }

    pub fn image(&self, i: Voter) -> Voter {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[Voter] {
        &self.mapping
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    ///
    /// With this convention, permuting a profile by `self` and then by
    /// `other` equals permuting it once by `self.compose(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            mapping: other.mapping.iter().map(|&i| self.mapping[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut mapping = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            mapping[j] = i;
        }
        Self { mapping }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// One ballot per voter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    ballots: Vec<LinearOrder>,
}

impl Profile {
    pub fn new(ballots: Vec<LinearOrder>) -> Result<Self> {
        let Some(first) = ballots.first() else {
            return Err(Error::TooFewVoters { min: 1, got: 0 });
        };
        let m = first.candidates();
        if let Some(bad) = ballots.iter().find(|b| b.candidates() != m) {
            return Err(mismatch(format!("{m} candidates"), bad.candidates()));
        }
        Ok(Self { ballots })
    }

    /// The profile in which every one of `n` voters casts `ballot`.
    pub fn unanimous(ballot: LinearOrder, n: usize) -> Result<Self> {
        Self::new(vec![ballot; n])
    }

    pub fn voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn candidates(&self) -> usize {
        self.ballots[0].candidates()
    }

    pub fn ballot(&self, i: Voter) -> &LinearOrder {
        &self.ballots[i]
    }

    pub fn ballots(&self) -> &[LinearOrder] {
        &self.ballots
    }

    pub fn is_unanimous(&self) -> bool {
        self.ballots.iter().all_equal()
    }

    /// `π⃗(x) = (x_{π(0)}, …, x_{π(n-1)})`.
    pub fn apply_voter_permutation(&self, pi: &VoterPermutation) -> Result<Self> {
        if pi.voters() != self.voters() {
            return Err(mismatch(self.voters(), pi.voters()));
        }
        Ok(Self {
            ballots: pi
                .mapping
                .iter()
                .map(|&j| self.ballots[j].clone())
                .collect(),
        })
    }

    /// Every ballot replaced by voter `i`'s ballot.
    pub fn collapse_to_voter(&self, i: Voter) -> Result<Self> {
        let n = self.voters();
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        Ok(Self {
            ballots: vec![self.ballots[i].clone(); n],
        })
    }

    /// The profile of the other `n - 1` voters, in order.
    pub fn drop_voter(&self, i: Voter) -> Result<Self> {
        let n = self.voters();
        if n < 2 {
            return Err(Error::TooFewVoters { min: 2, got: n });
        }
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        let mut ballots = self.ballots.clone();
        ballots.remove(i);
        Ok(Self { ballots })
    }

    /// Inverse of [`Profile::drop_voter`]: inserts `ballot` at position `i`.
    pub fn reassemble(rest: &Self, ballot: LinearOrder, i: Voter) -> Result<Self> {
        if i > rest.voters() {
            return Err(Error::VoterOutOfRange(i, rest.voters() + 1));
        }
        if ballot.candidates() != rest.candidates() {
            return Err(mismatch(rest.candidates(), ballot.candidates()));
        }
        let mut ballots = rest.ballots.clone();
        ballots.insert(i, ballot);
        Ok(Self { ballots })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.ballots.iter().join(" "))
    }
}

/// Default supported scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaleLimits {
    pub max_voters: usize,
    pub max_candidates: usize,
    pub max_profiles: usize,
}

impl ScaleLimits {
    pub const DEFAULT: Self = Self {
        max_voters: 4,
        max_candidates: 4,
        max_profiles: 331_776,
    };

    pub const UNLIMITED: Self = Self {
        max_voters: usize::MAX,
        max_candidates: HARD_MAX_CANDIDATES,
        max_profiles: usize::MAX,
    };

    /// Default limits, or unlimited when the override variable is set to a
    /// non-empty value other than `0`.
    pub fn from_env() -> Self {
        if scale_override() {
            Self::UNLIMITED
        } else {
            Self::DEFAULT
        }
    }

    pub fn check(&self, n: usize, m: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::TooFewVoters { min: 1, got: 0 });
        }
        if m == 0 {
            return Err(Error::TooFewCandidates { min: 1, got: 0 });
        }
        if n > self.max_voters {
            return Err(Error::ScaleExceeded(format!(
                "{n} voters > {}",
                self.max_voters
            )));
        }
        if m > self.max_candidates.min(HARD_MAX_CANDIDATES) {
            return Err(Error::ScaleExceeded(format!(
                "{m} candidates > {}",
                self.max_candidates
            )));
        }
        let profiles = factorial(m)
            .and_then(|f| u32::try_from(n).ok().and_then(|n| f.checked_pow(n)))
            .ok_or_else(|| Error::ScaleExceeded(format!("({m}!)^{n} overflows")))?;
        if profiles > self.max_profiles {
            return Err(Error::ScaleExceeded(format!(
                "({m}!)^{n} = {profiles} profiles > {}",
                self.max_profiles
            )));
        }
        Ok(profiles)
    }
}

pub fn scale_override() -> bool {
    std::env::var(SCALE_OVERRIDE_VAR)
        .map(|v| !v.is_empty() && v != "0")
        .unwrap_or(false)
}

/// The full profile space `L(A)^n` with precomputed order tables.
///
/// Profile-level operations here work on dense indices and digit vectors
/// so that rule tables and distributions can be scanned without building
/// [`Profile`] values.
#[derive(Debug)]
pub struct ProfileSpace {
    voters: usize,
    candidates: usize,
    orders: Vec<LinearOrder>,
    /// Per order: bit `p` set iff the first candidate of pair `p` is ranked above the second.
    pair_bits: Vec<u32>,
    pairs: Vec<(Candidate, Candidate)>,
    profiles: usize,
}

impl ProfileSpace {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Self::with_limits(n, m, ScaleLimits::from_env())
    }

    pub fn with_limits(n: usize, m: usize, limits: ScaleLimits) -> Result<Self> {
        let profiles = limits.check(n, m)?;
        let orders = enumerate_orders(m)?;
        let pairs = candidate_pairs(m);
        let pair_bits = orders
            .iter()
            .map(|o| {
                let pos: Vec<usize> = (0..m).map(|c| o.position(c).unwrap()).collect();
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| pos[a] < pos[b])
                    .fold(0u32, |acc, (p, _)| acc | (1 << p))
            })
            .collect();
        Ok(Self {
            voters: n,
            candidates: m,
            orders,
            pair_bits,
            pairs,
            profiles,
        })
    }

    /// Process-wide shared instance for `(n, m)`.
    pub fn shared(n: usize, m: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<ProfileSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(space) = cache.lock().unwrap().get(&(n, m)) {
            return Ok(Arc::clone(space));
        }
        let space = Arc::new(Self::new(n, m)?);
        let mut guard = cache.lock().unwrap();
        Ok(Arc::clone(guard.entry((n, m)).or_insert(space)))
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    /// `|L(A)| = m!`.
    pub fn order_count(&self) -> usize {
        self.orders.len()
    }

    /// `(m!)^n`.
    pub fn profile_count(&self) -> usize {
        self.profiles
    }

    pub fn orders(&self) -> &[LinearOrder] {
        &self.orders
    }

    pub fn order(&self, index: usize) -> &LinearOrder {
        &self.orders[index]
    }

    pub fn pairs(&self) -> &[(Candidate, Candidate)] {
        &self.pairs
    }

    pub fn pair_bits(&self, order: usize) -> u32 {
        self.pair_bits[order]
    }

    pub fn all_pairs_mask(&self) -> u32 {
        if self.pairs.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.pairs.len()) - 1
        }
    }

    pub fn check_profile(&self, p: &Profile) -> Result<()> {
        if p.voters() != self.voters || p.candidates() != self.candidates {
            return Err(mismatch(
                format!("{} voters x {} candidates", self.voters, self.candidates),
                format!("{} voters x {} candidates", p.voters(), p.candidates()),
            ));
        }
        Ok(())
    }

    pub fn profile_index(&self, p: &Profile) -> Result<usize> {
        self.check_profile(p)?;
        Ok(p.ballots
            .iter()
            .fold(0, |acc, b| acc * self.order_count() + b.index()))
    }

    pub fn profile_from_index(&self, index: usize) -> Result<Profile> {
        if index >= self.profiles {
            return Err(Error::IndexOutOfRange(index, self.profiles));
        }
        let ballots = self
            .digits(index)
            .into_iter()
            .map(|d| self.orders[d].clone())
            .collect();
        Ok(Profile { ballots })
    }

    /// Ballot order indices of profile `index`, voter 0 first.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.voters];
        self.fill_digits(index, &mut out);
        out
    }

    pub fn fill_digits(&self, mut index: usize, out: &mut [usize]) {
        let base = self.order_count();
        for slot in out.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> usize {
        let base = self.order_count();
        digits.iter().fold(0, |acc, &d| acc * base + d)
    }

    /// Index of `π⃗(x)` for the profile with index `index`.
    pub fn permute_index(&self, index: usize, pi: &VoterPermutation) -> usize {
        let d = self.digits(index);
        let base = self.order_count();
        pi.mapping.iter().fold(0, |acc, &j| acc * base + d[j])
    }

    /// Index of the unanimous profile on order `order`.
    pub fn unanimous_index(&self, order: usize) -> usize {
        (0..self.voters).fold(0, |acc, _| acc * self.order_count() + order)
    }

    /// Masks of pairs on which all ballots agree: `(all rank first above second, all rank second above first)`.
    pub fn unanimity_masks(&self, digits: &[usize]) -> (u32, u32) {
        let full = self.all_pairs_mask();
        digits.iter().fold((full, full), |(up, down), &d| {
            let bits = self.pair_bits[d];
            (up & bits, down & !bits & full)
        })
    }

    /// Orders consistent with every unanimous pairwise comparison of the profile.
    pub fn pareto_consistent_orders(&self, digits: &[usize]) -> Vec<usize> {
        let (up, down) = self.unanimity_masks(digits);
        (0..self.order_count())
            .filter(|&o| {
                let bits = self.pair_bits[o];
                bits & up == up && bits & down == 0
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(r: &[usize]) -> LinearOrder {
        LinearOrder::new(r.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_small_cases() {
        assert_eq!(enumerate_orders(1).unwrap(), vec![ord(&[0])]);
        let three = enumerate_orders(3).unwrap();
        assert_eq!(three.len(), 6);
        assert_eq!(three[0], ord(&[0, 1, 2]));
        assert_eq!(three[5], ord(&[2, 1, 0]));
        assert_eq!(enumerate_orders(4).unwrap().len(), 24);
        assert!(matches!(
            enumerate_orders(0),
            Err(Error::TooFewCandidates { .. })
        ));
    }

    #[test]
    fn index_matches_enumeration_position() {
        for m in 1..=5 {
            for (k, o) in enumerate_orders(m).unwrap().iter().enumerate() {
                assert_eq!(o.index(), k);
                assert_eq!(&LinearOrder::from_index(m, k).unwrap(), o);
            }
        }
    }

    #[test]
    fn prefers_examples() {
        assert!(ord(&[0, 1, 2]).prefers(0, 2).unwrap());
        assert!(!ord(&[0, 1, 2]).prefers(2, 0).unwrap());
        assert!(ord(&[2, 0, 1]).prefers(2, 1).unwrap());
        assert_eq!(ord(&[0, 1, 2]).prefers(1, 1), Err(Error::SameCandidate(1)));
        assert_eq!(
            ord(&[0, 1, 2]).prefers(0, 3),
            Err(Error::CandidateOutOfRange(3, 3))
        );
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(LinearOrder::new(vec![0, 0, 1]).is_err());
        assert!(LinearOrder::new(vec![0, 2]).is_err());
        assert!(LinearOrder::new(vec![]).is_err());
    }

    #[test]
    fn profile_index_examples() {
        let space = ProfileSpace::new(2, 3).unwrap();
        let o = |k| LinearOrder::from_index(3, k).unwrap();
        let p = |a, b| Profile::new(vec![o(a), o(b)]).unwrap();
        assert_eq!(space.profile_index(&p(0, 0)).unwrap(), 0);
        assert_eq!(space.profile_index(&p(0, 1)).unwrap(), 1);
        assert_eq!(space.profile_index(&p(5, 5)).unwrap(), 35);
        assert_eq!(space.profile_from_index(35).unwrap(), p(5, 5));
        assert!(space.profile_from_index(36).is_err());
    }

    #[test]
    fn voter_permutation_examples() {
        let o = |k| LinearOrder::from_index(3, k).unwrap();
        let p = Profile::new(vec![o(1), o(4)]).unwrap();
        let id = VoterPermutation::identity(2);
        assert_eq!(p.apply_voter_permutation(&id).unwrap(), p);
        let swap = VoterPermutation::transposition(2, 0, 1).unwrap();
        assert_eq!(
            p.apply_voter_permutation(&swap).unwrap(),
            Profile::new(vec![o(4), o(1)]).unwrap()
        );
        let cycle = VoterPermutation::new(vec![1, 2, 0]).unwrap();
        let q = Profile::new(vec![o(0), o(2), o(5)]).unwrap();
        let twice = q
            .apply_voter_permutation(&cycle)
            .unwrap()
            .apply_voter_permutation(&cycle)
            .unwrap();
        assert_eq!(
            twice,
            q.apply_voter_permutation(&cycle.compose(&cycle)).unwrap()
        );
        assert!(p
            .apply_voter_permutation(&VoterPermutation::identity(3))
            .is_err());
    }

    #[test]
    fn collapse_and_drop() {
        let o = |k| LinearOrder::from_index(3, k).unwrap();
        let p = Profile::new(vec![o(1), o(2)]).unwrap();
        assert_eq!(
            p.collapse_to_voter(0).unwrap(),
            Profile::new(vec![o(1), o(1)]).unwrap()
        );
        assert_eq!(
            p.collapse_to_voter(1).unwrap(),
            Profile::new(vec![o(2), o(2)]).unwrap()
        );
        assert!(p.collapse_to_voter(2).is_err());
        let u = Profile::unanimous(o(3), 3).unwrap();
        assert_eq!(u.collapse_to_voter(1).unwrap(), u);

        let q = Profile::new(vec![o(0), o(1), o(2)]).unwrap();
        assert_eq!(
            q.drop_voter(1).unwrap(),
            Profile::new(vec![o(0), o(2)]).unwrap()
        );
        assert_eq!(p.drop_voter(1).unwrap(), Profile::new(vec![o(1)]).unwrap());
        for i in 0..3 {
            let rest = q.drop_voter(i).unwrap();
            assert_eq!(
                Profile::reassemble(&rest, q.ballot(i).clone(), i).unwrap(),
                q
            );
        }
        let single = Profile::new(vec![o(0)]).unwrap();
        assert!(matches!(
            single.drop_voter(0),
            Err(Error::TooFewVoters { .. })
        ));
        assert!(q.drop_voter(3).is_err());
    }

    #[test]
    fn scale_limits() {
        assert!(ScaleLimits::DEFAULT.check(4, 4).is_ok());
        assert!(ScaleLimits::DEFAULT.check(5, 3).is_err());
        assert!(ScaleLimits::DEFAULT.check(2, 5).is_err());
        assert!(ScaleLimits::DEFAULT.check(0, 3).is_err());
        assert_eq!(ScaleLimits::DEFAULT.check(3, 3).unwrap(), 216);
    }

    #[test]
    fn unanimity_masks_on_unanimous_profile_pin_the_order() {
        let space = ProfileSpace::new(3, 3).unwrap();
        for o in 0..6 {
            let d = vec![o; 3];
            assert_eq!(space.pareto_consistent_orders(&d), vec![o]);
        }
    }
}
