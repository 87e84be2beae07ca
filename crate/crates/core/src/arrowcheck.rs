//! Exhaustive search for Pareto and IIA rules, and a replay of the final
//! fixpoint argument on a cylinder rule.
//!
//! An IIA rule is determined by one Boolean function per candidate pair:
//! bit `i` of the input says voter `i` ranks the pair's first candidate above
//! the second, and the output bit says the rule does. Pareto pins the two
//! unanimous rows, so each pair has `2^n - 2` free bits.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{cylinder_bounds_with, force_profile, phi, CylinderBounds};
use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::orders::{scale_override, LinearOrder, ProfileSpace, Voter};
use crate::ratio::{self, Rational};
use crate::rules::VotingRule;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Largest aggregator space scanned without the scale override.
pub const MAX_CANDIDATES_SCANNED: u64 = 10_000_000;

/// Truth tables are `u64`, so at most 6 voters.
const MAX_AGGREGATOR_VOTERS: usize = 6;

/// One truth table per candidate pair, indexed by voter input mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairwiseAggregator {
    voters: usize,
    tables: Vec<u64>,
}

impl PairwiseAggregator {
    fn check_voters(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::TooFewVoters { min: 1, got: 0 });
        }
        if n > MAX_AGGREGATOR_VOTERS {
            return Err(Error::ScaleExceeded(format!(
                "pairwise aggregators support at most {MAX_AGGREGATOR_VOTERS} voters, got {n}"
            )));
        }
        Ok(())
    }

    fn rows(n: usize) -> u32 {
        1 << n
    }

    fn free_bits(n: usize) -> u32 {
        Self::rows(n) - 2
    }

    fn pinned(n: usize) -> u64 {
        1 << (Self::rows(n) - 1)
    }

    /// Builds tables from the free (non-unanimous) rows, row `r` stored in bit `r - 1`.
    pub fn from_free_bits(n: usize, free: &[u64]) -> Result<Self> {
        Self::check_voters(n)?;
        let width = Self::free_bits(n);
        let limit = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        if let Some(&bad) = free.iter().find(|&&f| f > limit) {
            return Err(Error::InvalidTable(format!(
                "free bits {bad:#x} exceed {width} rows"
            )));
        }
        let tables = free.iter().map(|&f| Self::pinned(n) | (f << 1)).collect();
        Ok(Self { voters: n, tables })
    }

    /// Every pair copies voter `i`.
    pub fn projection(n: usize, pairs: usize, i: Voter) -> Result<Self> {
        Self::from_fn(n, pairs, |_, mask| mask >> i & 1 == 1)
    }

    /// Every pair follows the strict majority, voter `i` breaking ties.
    pub fn majority_with_tiebreak(n: usize, pairs: usize, i: Voter) -> Result<Self> {
        Self::from_fn(n, pairs, |_, mask| {
            let yes = mask.count_ones() as usize;
            match (2 * yes).cmp(&n) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => mask >> i & 1 == 1,
            }
        })
    }

    /// Tables from `f(pair, input_mask)`; unanimous rows are pinned regardless of `f`.
    pub fn from_fn(n: usize, pairs: usize, mut f: impl FnMut(usize, u32) -> bool) -> Result<Self> {
        Self::check_voters(n)?;
        let rows = Self::rows(n);
        let tables = (0..pairs)
            .map(|p| {
                (1..rows - 1)
                    .filter(|&mask| f(p, mask))
                    .fold(Self::pinned(n), |t, mask| t | 1 << mask)
            })
            .collect();
        Ok(Self { voters: n, tables })
    }

    pub fn voters(&self) -> usize {
        self.voters
    }

    pub fn tables(&self) -> &[u64] {
        &self.tables
    }

    pub fn output(&self, pair: usize, mask: u32) -> bool {
        self.tables[pair] >> mask & 1 == 1
    }
}

/// Precomputed profile data shared by every assembly in a scan.
struct Assembler {
    space: Arc<ProfileSpace>,
    /// `masks[k * pairs + p]`: voters ranking pair `p` upwards on profile `k`.
    masks: Vec<u32>,
    /// Output pair pattern to order index, `u32::MAX` for cyclic patterns.
    pattern_order: Vec<u32>,
}

impl Assembler {
    fn new(space: Arc<ProfileSpace>) -> Self {
        let pairs = space.pairs().len();
        let mut masks = Vec::with_capacity(space.profile_count() * pairs);
        let mut digits = vec![0; space.voters()];
        for k in 0..space.profile_count() {
            space.fill_digits(k, &mut digits);
            for p in 0..pairs {
                let mask = digits
                    .iter()
                    .enumerate()
                    .filter(|(_, &o)| space.pair_bits(o) >> p & 1 == 1)
                    .fold(0u32, |acc, (i, _)| acc | 1 << i);
                masks.push(mask);
            }
        }
        let mut pattern_order = vec![u32::MAX; 1 << pairs];
        for o in 0..space.order_count() {
            pattern_order[space.pair_bits(o) as usize] = o as u32;
        }
        Self {
            space,
            masks,
            pattern_order,
        }
    }

    fn assemble(&self, tables: &[u64]) -> Option<Vec<u32>> {
        let pairs = tables.len();
        self.masks
            .chunks_exact(pairs)
            .map(|row| {
                let pattern = row
                    .iter()
                    .zip(tables)
                    .enumerate()
                    .fold(0usize, |acc, (p, (&mask, &t))| {
                        acc | ((t >> mask & 1) as usize) << p
                    });
                match self.pattern_order[pattern] {
                    u32::MAX => None,
                    o => Some(o),
                }
            })
            .collect()
    }
}

fn check_aggregator_shape(agg: &PairwiseAggregator, space: &ProfileSpace) -> Result<()> {
    if agg.voters != space.voters() {
        return Err(crate::error::mismatch(space.voters(), agg.voters));
    }
    if agg.tables.len() != space.pairs().len() {
        return Err(crate::error::mismatch(
            space.pairs().len(),
            agg.tables.len(),
        ));
    }
    Ok(())
}

/// The rule induced by `agg`, or `None` if some profile yields a cyclic relation.
pub fn assemble_rule(agg: &PairwiseAggregator, n: usize, m: usize) -> Result<Option<VotingRule>> {
    let space = ProfileSpace::shared(n, m)?;
    check_aggregator_shape(agg, &space)?;
    let assembler = Assembler::new(space.clone());
    match assembler.assemble(&agg.tables) {
        Some(table) => Ok(Some(VotingRule::from_table_in(space, table)?)),
        None => Ok(None),
    }
}

/// First profile on which `agg` produces a cyclic pairwise relation.
pub fn find_cyclic_profile(agg: &PairwiseAggregator, n: usize, m: usize) -> Result<Option<usize>> {
    let space = ProfileSpace::shared(n, m)?;
    check_aggregator_shape(agg, &space)?;
    let assembler = Assembler::new(space);
    Ok((0..assembler.space.profile_count()).find(|&k| {
        let pairs = agg.tables.len();
        let row = &assembler.masks[k * pairs..(k + 1) * pairs];
        let pattern = row
            .iter()
            .zip(&agg.tables)
            .enumerate()
            .fold(0usize, |acc, (p, (&mask, &t))| {
                acc | ((t >> mask & 1) as usize) << p
            });
        assembler.pattern_order[pattern] == u32::MAX
    }))
}

/// `(2^(2^n - 2))^(m choose 2)`, or `None` on overflow.
pub fn aggregator_space_size(n: usize, m: usize) -> Option<u64> {
    if n == 0 || n > MAX_AGGREGATOR_VOTERS {
        return None;
    }
    let pairs = (m * m.saturating_sub(1) / 2) as u32;
    let per_pair = 1u64.checked_shl(PairwiseAggregator::free_bits(n))?;
    per_pair.checked_pow(pairs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoundRule {
    /// Position of the aggregator in the lexicographic scan.
    pub candidate: u64,
    pub digest: String,
    pub dictator: Option<Voter>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowReport {
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    pub candidates_scanned: u64,
    pub rules_found: Vec<FoundRule>,
    pub all_dictators: bool,
    #[serde(skip)]
    pub rules: Vec<VotingRule>,
}

/// Scans every pinned aggregator combination in lexicographic order (pair 0
/// most significant) and keeps the ones that assemble into total rules.
/// Parallel over contiguous blocks of the current rayon pool; the result does
/// not depend on the pool size.
pub fn verify_arrow(n: usize, m: usize) -> Result<ArrowReport> {
    if m < 3 {
        return Err(Error::TooFewCandidates { min: 3, got: m });
    }
    PairwiseAggregator::check_voters(n)?;
    let total = aggregator_space_size(n, m)
        .filter(|&t| t <= MAX_CANDIDATES_SCANNED || scale_override())
        .ok_or_else(|| {
            Error::ScaleExceeded(format!(
                "aggregator space for n={n}, m={m} exceeds {MAX_CANDIDATES_SCANNED} candidates"
            ))
        })?;
    let space = ProfileSpace::shared(n, m)?;
    let assembler = Assembler::new(space.clone());
    let pairs = space.pairs().len();
    let width = PairwiseAggregator::free_bits(n);
    let pinned = PairwiseAggregator::pinned(n);

    const BLOCK: u64 = 4096;
    let blocks = total.div_ceil(BLOCK);
    let found: Vec<(u64, Vec<u32>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut tables = vec![0u64; pairs];
            let mut hits = Vec::new();
            for c in b * BLOCK..((b + 1) * BLOCK).min(total) {
                let mut rest = c;
                for p in (0..pairs).rev() {
                    let free = if width == 64 {
                        rest
                    } else {
                        rest & ((1 << width) - 1)
                    };
                    rest = if width == 64 { 0 } else { rest >> width };
                    tables[p] = pinned | free << 1;
                }
                if let Some(table) = assembler.assemble(&tables) {
                    hits.push((c, table));
                }
            }
            hits
        })
        .flatten()
        .collect();

    let mut rules = Vec::with_capacity(found.len());
    let mut rules_found = Vec::with_capacity(found.len());
    for (candidate, table) in found {
        let rule = VotingRule::from_table_in(space.clone(), table)?;
        rules_found.push(FoundRule {
            candidate,
            digest: rule.digest(),
            dictator: rule.is_dictatorship(),
        });
        rules.push(rule);
    }
    Ok(ArrowReport {
        format_version: REPORT_FORMAT_VERSION,
        n,
        m,
        candidates_scanned: total,
        all_dictators: rules_found.iter().all(|r| r.dictator.is_some()),
        rules_found,
        rules,
    })
}

/// Outcome of the final fixpoint argument for one Pareto rule `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub format_version: u32,
    pub n: usize,
    pub m: usize,
    #[serde(with = "ratio::serde_fraction")]
    pub epsilon: Rational,
    pub y_index: usize,
    pub inner_rule_digest: String,
    pub rule_digest: String,
    pub full_support: bool,
    pub permutation_invariant: bool,
    #[serde(with = "ratio::serde_fraction::vec")]
    pub forces: Vec<Rational>,
    pub most_forceful: Vec<Voter>,
    pub least_forceful: Vec<Voter>,
    pub last_voter_unique_least: bool,
    pub phi_fixed: bool,
    pub dictator: Option<Voter>,
    /// A Φ-fixed rule that is not a dictatorship.
    pub non_dictatorial_fixpoint: bool,
    pub cylinder_bounds: CylinderBounds,
}

/// Builds `f = cylinder(g)` and `μ = star(ε, y)` lifted at the last voter,
/// then evaluates each step of the argument on them exactly.
pub fn replay_contradiction(
    g: &VotingRule,
    eps: &Rational,
    y: &LinearOrder,
) -> Result<ReplayReport> {
    let m = g.candidates();
    Distribution::check_epsilon(m, eps)?;
    if y.candidates() != m {
        return Err(crate::error::mismatch(m, y.candidates()));
    }
    if !g.is_pareto() {
        return Err(Error::NotPareto);
    }
    let inner = g.voters();
    let nu = Distribution::star(inner, m, eps, y)?;
    let mu = nu.lift(inner)?;
    let f = g.cylinder_extend()?;
    let n = f.voters();

    let full_support = mu.has_full_support();
    let permutation_invariant = mu.is_permutation_invariant();
    let fp = force_profile(&mu, &f)?;
    let phi_fixed = phi(&mu, &f)? == f;
    let dictator = f.is_dictatorship();
    let cylinder_bounds = cylinder_bounds_with(&nu, &mu, g, &f)?;
    Ok(ReplayReport {
        format_version: REPORT_FORMAT_VERSION,
        n,
        m,
        epsilon: eps.clone(),
        y_index: y.index(),
        inner_rule_digest: g.digest(),
        rule_digest: f.digest(),
        full_support,
        permutation_invariant,
        last_voter_unique_least: fp.unique_least_forceful() == Some(n - 1),
        forces: fp.forces,
        most_forceful: fp.most_forceful,
        least_forceful: fp.least_forceful,
        phi_fixed,
        dictator,
        non_dictatorial_fixpoint: phi_fixed && dictator.is_none(),
        cylinder_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rational;

    #[test]
    fn projections_assemble_into_dictators() {
        for n in 1..=3 {
            for i in 0..n {
                let agg = PairwiseAggregator::projection(n, 3, i).unwrap();
                let rule = assemble_rule(&agg, n, 3).unwrap().unwrap();
                assert_eq!(rule, VotingRule::dictator(n, 3, i).unwrap());
            }
        }
    }

    #[test]
    fn two_voter_majority_with_tiebreak_is_the_tiebreaker() {
        let agg = PairwiseAggregator::majority_with_tiebreak(2, 3, 0).unwrap();
        assert_eq!(agg, PairwiseAggregator::projection(2, 3, 0).unwrap());
        let rule = assemble_rule(&agg, 2, 3).unwrap().unwrap();
        assert_eq!(rule.is_dictatorship(), Some(0));
    }

    #[test]
    fn three_voter_majority_hits_a_condorcet_cycle() {
        let agg = PairwiseAggregator::majority_with_tiebreak(3, 3, 0).unwrap();
        assert!(assemble_rule(&agg, 3, 3).unwrap().is_none());
        let k = find_cyclic_profile(&agg, 3, 3).unwrap().unwrap();
        let space = ProfileSpace::shared(3, 3).unwrap();
        let p = space.profile_from_index(k).unwrap();
        // each ballot is a rotation of the others
        let mut firsts: Vec<_> = p.ballots().iter().map(|b| b.ranking()[0]).collect();
        firsts.sort();
        assert_eq!(firsts, vec![0, 1, 2]);
    }

    #[test]
    fn mixed_projections_are_cyclic_somewhere() {
        // pair (0,1) follows voter 0, the others voter 1
        let agg = PairwiseAggregator::from_fn(2, 3, |p, mask| {
            let voter = if p == 0 { 0 } else { 1 };
            mask >> voter & 1 == 1
        })
        .unwrap();
        let k = find_cyclic_profile(&agg, 2, 3).unwrap().unwrap();
        assert!(assemble_rule(&agg, 2, 3).unwrap().is_none());
        // independent check: decode the relation on that profile and find a 3-cycle
        let space = ProfileSpace::shared(2, 3).unwrap();
        let p = space.profile_from_index(k).unwrap();
        let beats = |a: usize, b: usize| {
            let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };
            let pair = space.pairs().iter().position(|&q| q == (lo, hi)).unwrap();
            let voter = if pair == 0 { 0 } else { 1 };
            p.ballot(voter).prefers(lo, hi).unwrap() != flip
        };
        let cyclic = (beats(0, 1) && beats(1, 2) && beats(2, 0))
            || (beats(1, 0) && beats(2, 1) && beats(0, 2));
        assert!(cyclic);
    }

    #[test]
    fn free_bits_pin_unanimity() {
        let agg = PairwiseAggregator::from_free_bits(2, &[0, 3, 1]).unwrap();
        for p in 0..3 {
            assert!(agg.output(p, 0b11));
            assert!(!agg.output(p, 0b00));
        }
        assert!(agg.output(1, 0b01) && agg.output(1, 0b10));
        assert!(PairwiseAggregator::from_free_bits(2, &[4]).is_err());
    }

    #[test]
    fn arrow_counts() {
        for (n, scanned) in [(1, 1), (2, 64)] {
            let r = verify_arrow(n, 3).unwrap();
            assert_eq!(r.candidates_scanned, scanned);
            assert_eq!(r.rules_found.len(), n);
            assert!(r.all_dictators);
            for rule in &r.rules {
                assert!(rule.is_pareto() && rule.is_iia());
            }
        }
        assert_eq!(aggregator_space_size(3, 3), Some(262_144));
        assert!(matches!(
            verify_arrow(2, 2),
            Err(Error::TooFewCandidates { .. })
        ));
        assert!(matches!(verify_arrow(5, 3), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn arrow_report_is_independent_of_pool_size() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| serde_json::to_string(&verify_arrow(2, 3).unwrap()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn replay_on_a_dictator() {
        let g = VotingRule::dictator(2, 3, 0).unwrap();
        let r = replay_contradiction(&g, &rational(1, 2), &LinearOrder::identity(3)).unwrap();
        assert!(r.full_support && r.permutation_invariant && r.phi_fixed);
        assert_eq!(r.dictator, Some(0));
        assert!(!r.non_dictatorial_fixpoint);
    }

    #[test]
    fn replay_on_majority_finds_a_non_dictatorial_fixpoint() {
        let g = VotingRule::majority_with_canonical_tiebreak(2, 3).unwrap();
        let r = replay_contradiction(&g, &rational(1, 2), &LinearOrder::identity(3)).unwrap();
        assert!(r.full_support && r.permutation_invariant);
        assert!(r.last_voter_unique_least);
        assert!(r.phi_fixed);
        assert_eq!(r.dictator, None);
        assert!(r.non_dictatorial_fixpoint);
        assert!(r.cylinder_bounds.lower_bounds_hold);
    }

    #[test]
    fn replay_preconditions() {
        let g = VotingRule::majority_with_canonical_tiebreak(2, 3).unwrap();
        let y = LinearOrder::identity(3);
        assert!(matches!(
            replay_contradiction(&g, &rational(3, 4), &y),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        // ε is checked before Pareto
        let c = VotingRule::constant(2, 3, 0).unwrap();
        assert!(matches!(
            replay_contradiction(&c, &rational(3, 4), &y),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert_eq!(
            replay_contradiction(&c, &rational(1, 2), &y),
            Err(Error::NotPareto)
        );
    }
}
