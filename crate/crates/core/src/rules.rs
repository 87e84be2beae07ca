//! Voting rules as dense lookup tables over the profile space.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{mismatch, Error, Result};
use crate::orders::{Candidate, LinearOrder, Profile, ProfileSpace, Voter, VoterPermutation};

pub const RULE_FORMAT_VERSION: u32 = 1;

/// A total map `L(A)^n → L(A)`.
///
/// `table[k]` is the canonical index of the output order on the profile with
/// index `k`. Pareto and IIA verdicts are computed on first request and cached.
pub struct VotingRule {
    space: Arc<ProfileSpace>,
    table: Vec<u32>,
    pareto: OnceLock<bool>,
    iia: OnceLock<bool>,
}

/// Two profiles that agree on every voter's comparison of `pair` while the
/// rule's outputs disagree on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IiaViolation {
    pub pair: (Candidate, Candidate),
    pub first: usize,
    pub second: usize,
}

impl VotingRule {
    pub fn from_table(n: usize, m: usize, table: Vec<u32>) -> Result<Self> {
        Self::from_table_in(ProfileSpace::shared(n, m)?, table)
    }

    pub fn from_table_in(space: Arc<ProfileSpace>, table: Vec<u32>) -> Result<Self> {
        if table.len() != space.profile_count() {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, got {}",
                space.profile_count(),
                table.len()
            )));
        }
        let limit = space.order_count();
        if let Some(bad) = table.iter().find(|&&o| o as usize >= limit) {
            return Err(Error::InvalidTable(format!("entry {bad} >= {limit}")));
        }
        Ok(Self::raw(space, table))
    }

    fn raw(space: Arc<ProfileSpace>, table: Vec<u32>) -> Self {
        Self {
            space,
            table,
            pareto: OnceLock::new(),
            iia: OnceLock::new(),
        }
    }

    /// Builds a rule from a function of the ballot digit vector.
    pub fn from_fn(space: Arc<ProfileSpace>, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let mut digits = vec![0; space.voters()];
        let table = (0..space.profile_count())
            .map(|k| {
                space.fill_digits(k, &mut digits);
                let out = f(&digits);
                debug_assert!(out < space.order_count());
                out as u32
            })
            .collect();
        Self::raw(space, table)
    }

    /// `Dict_i(x) = x_i`.
    pub fn dictator(n: usize, m: usize, i: Voter) -> Result<Self> {
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        Ok(Self::from_fn(ProfileSpace::shared(n, m)?, |d| d[i]))
    }

    pub fn constant(n: usize, m: usize, order: usize) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        if order >= space.order_count() {
            return Err(Error::IndexOutOfRange(order, space.order_count()));
        }
        Ok(Self::from_fn(space, |_| order))
    }

    /// Pairwise majority with a canonical fallback.
    ///
    /// Takes the strict-majority relation; if some order extends it, the one
    /// of smallest index is returned, otherwise the smallest-index order
    /// consistent with the unanimous comparisons. The output depends only on
    /// the multiset of ballots, so the rule is voter-symmetric, and it is
    /// Pareto because strict majorities contain unanimous comparisons.
    pub fn majority_with_canonical_tiebreak(n: usize, m: usize) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        let sp = Arc::clone(&space);
        Ok(Self::from_fn(space, move |d| {
            let pairs = sp.pairs().len();
            let (mut up, mut down) = (0u32, 0u32);
            for p in 0..pairs {
                let ayes = d.iter().filter(|&&o| sp.pair_bits(o) >> p & 1 == 1).count();
                if 2 * ayes > d.len() {
                    up |= 1 << p;
                } else if 2 * ayes < d.len() {
                    down |= 1 << p;
                }
            }
            (0..sp.order_count())
                .find(|&o| {
                    let bits = sp.pair_bits(o);
                    bits & up == up && bits & down == 0
                })
                .unwrap_or_else(|| sp.pareto_consistent_orders(d)[0])
        }))
    }

    /// Borda count, ties broken toward the smaller candidate index.
    pub fn borda_with_tiebreak(n: usize, m: usize) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        let sp = Arc::clone(&space);
        Ok(Self::from_fn(space, move |d| {
            let mut score = vec![0usize; m];
            for &o in d {
                for (pos, &c) in sp.order(o).ranking().iter().enumerate() {
                    score[c] += m - 1 - pos;
                }
            }
            let mut ranking: Vec<Candidate> = (0..m).collect();
            ranking.sort_by_key(|&c| (std::cmp::Reverse(score[c]), c));
            LinearOrder::new(ranking).unwrap().index()
        }))
    }

    /// A Pareto rule drawn with a seeded generator: on each profile, the
    /// output is uniform over the orders that respect every unanimous
    /// pairwise comparison, independently across profiles.
    pub fn random_pareto(n: usize, m: usize, seed: u64) -> Result<Self> {
        let space = ProfileSpace::shared(n, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = Arc::clone(&space);
        Ok(Self::from_fn(space, move |d| {
            let choices = sp.pareto_consistent_orders(d);
            choices[rng.gen_range(0..choices.len())]
        }))
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

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn output_index(&self, profile: usize) -> usize {
        self.table[profile] as usize
    }

    pub fn evaluate(&self, p: &Profile) -> Result<LinearOrder> {
        let k = self.space.profile_index(p)?;
        Ok(self.space.order(self.output_index(k)).clone())
    }

    /// Copy with the output on one profile replaced.
    pub fn with_output(&self, profile: usize, order: usize) -> Result<Self> {
        if profile >= self.table.len() {
            return Err(Error::IndexOutOfRange(profile, self.table.len()));
        }
        if order >= self.space.order_count() {
            return Err(Error::IndexOutOfRange(order, self.space.order_count()));
        }
        let mut table = self.table.clone();
        table[profile] = order as u32;
        Ok(Self::raw(Arc::clone(&self.space), table))
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.voters() != other.voters() || self.candidates() != other.candidates() {
            return Err(mismatch(
                format!(
                    "{} voters x {} candidates",
                    self.voters(),
                    self.candidates()
                ),
                format!(
                    "{} voters x {} candidates",
                    other.voters(),
                    other.candidates()
                ),
            ));
        }
        Ok(())
    }

    pub fn is_pareto(&self) -> bool {
        *self.pareto.get_or_init(|| {
            let mut digits = vec![0; self.voters()];
            (0..self.table.len()).all(|k| {
                self.space.fill_digits(k, &mut digits);
                let (up, down) = self.space.unanimity_masks(&digits);
                let bits = self.space.pair_bits(self.output_index(k));
                bits & up == up && bits & down == 0
            })
        })
    }

    pub fn is_iia(&self) -> bool {
        *self.iia.get_or_init(|| self.find_iia_violation().is_none())
    }

    /// First IIA counterexample in scan order (pairs lexicographic, then profiles).
    pub fn find_iia_violation(&self) -> Option<IiaViolation> {
        let n = self.voters();
        let mut digits = vec![0; n];
        for (p, &pair) in self.space.pairs().iter().enumerate() {
            // comparison vector -> (first profile seen, its output comparison)
            let mut seen: Vec<Option<(usize, bool)>> = vec![None; 1 << n];
            for k in 0..self.table.len() {
                self.space.fill_digits(k, &mut digits);
                let key = digits.iter().fold(0usize, |acc, &d| {
                    acc << 1 | (self.space.pair_bits(d) >> p & 1) as usize
                });
                let out = self.space.pair_bits(self.output_index(k)) >> p & 1 == 1;
                match seen[key] {
                    None => seen[key] = Some((k, out)),
                    Some((first, expected)) if expected != out => {
                        return Some(IiaViolation {
                            pair,
                            first,
                            second: k,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        None
    }

    /// The unique `i` with `self = Dict_i`, if any.
    pub fn is_dictatorship(&self) -> Option<Voter> {
        let mut digits = vec![0; self.voters()];
        (0..self.voters()).find(|&i| {
            (0..self.table.len()).all(|k| {
                self.space.fill_digits(k, &mut digits);
                digits[i] == self.output_index(k)
            })
        })
    }

    /// `f ∘ π⃗`.
    pub fn compose_voter_permutation(&self, pi: &VoterPermutation) -> Result<Self> {
        if pi.voters() != self.voters() {
            return Err(mismatch(self.voters(), pi.voters()));
        }
        let table = (0..self.table.len())
            .map(|k| self.table[self.space.permute_index(k, pi)])
            .collect();
        Ok(Self::raw(Arc::clone(&self.space), table))
    }

    /// `f ∘ s_i`, where `s_i` copies voter `i`'s ballot to everyone.
    pub fn compose_collapse(&self, i: Voter) -> Result<Self> {
        let n = self.voters();
        if i >= n {
            return Err(Error::VoterOutOfRange(i, n));
        }
        let table = (0..self.table.len())
            .map(|k| {
                let d = self.space.digits(k);
                self.table[self.space.unanimous_index(d[i])]
            })
            .collect();
        Ok(Self::raw(Arc::clone(&self.space), table))
    }

    /// Lifts an `(n-1)`-voter rule to `n` voters by ignoring the last ballot.
    pub fn cylinder_extend(&self) -> Result<Self> {
        let space = ProfileSpace::shared(self.voters() + 1, self.candidates())?;
        let base = space.order_count();
        let table = (0..space.profile_count())
            .map(|k| self.table[k / base])
            .collect();
        Ok(Self::raw(space, table))
    }

    /// SHA-256 of the table, entries encoded as little-endian `u32`, hex.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for &entry in &self.table {
            hasher.update(entry.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }

    pub fn to_file(&self) -> RuleFile {
        RuleFile {
            format_version: RULE_FORMAT_VERSION,
            n: self.voters(),
            m: self.candidates(),
            table: self.table.clone(),
        }
    }

    pub fn from_file(file: RuleFile) -> Result<Self> {
        if file.format_version != RULE_FORMAT_VERSION {
            return Err(Error::UnsupportedFormat(file.format_version));
        }
        Self::from_table(file.n, file.m, file.table)
    }
}

impl Clone for VotingRule {
    fn clone(&self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            table: self.table.clone(),
            pareto: self.pareto.clone(),
            iia: self.iia.clone(),
        }
    }
}

impl PartialEq for VotingRule {
    fn eq(&self, other: &Self) -> bool {
        self.voters() == other.voters()
            && self.candidates() == other.candidates()
            && self.table == other.table
    }
}

impl Eq for VotingRule {}

impl Hash for VotingRule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.voters().hash(state);
        self.candidates().hash(state);
        self.table.hash(state);
    }
}

impl PartialOrd for VotingRule {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VotingRule {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.voters(), self.candidates(), &self.table).cmp(&(
            other.voters(),
            other.candidates(),
            &other.table,
        ))
    }
}

impl fmt::Debug for VotingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VotingRule")
            .field("n", &self.voters())
            .field("m", &self.candidates())
            .field("digest", &&self.digest()[..16])
            .finish()
    }
}

/// On-disk form of a voting rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFile {
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    pub table: Vec<u32>,
}
