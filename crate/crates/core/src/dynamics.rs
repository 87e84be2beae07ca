//! Voter force, the `Φ` map, the relabeling equivalence `∼`, and `Φ` on
//! equivalence classes.
//!
//! `Φ(f)` replaces the ballot of every least forceful voter by the ballot of
//! one most forceful voter (the first, by default) and then applies `f`.
//! Rules with a unique most forceful voter are equivalent to all their voter
//! relabelings; every other rule is alone in its class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::orders::{Voter, VoterPermutation};
use crate::quotient::{check_rule_measure, rule_distance};
use crate::ratio::{self, Rational};
use crate::rules::VotingRule;

/// Forces of all voters with their argmax and argmin sets (ascending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForceProfile {
    pub forces: Vec<Rational>,
    pub most_forceful: Vec<Voter>,
    pub least_forceful: Vec<Voter>,
}

impl ForceProfile {
    fn new(forces: Vec<Rational>) -> Self {
        let max = forces.iter().max().unwrap().clone();
        let min = forces.iter().min().unwrap().clone();
        let most_forceful = (0..forces.len()).filter(|&i| forces[i] == max).collect();
        let least_forceful = (0..forces.len()).filter(|&i| forces[i] == min).collect();
        Self {
            forces,
            most_forceful,
            least_forceful,
        }
    }

    pub fn unique_most_forceful(&self) -> Option<Voter> {
        match self.most_forceful[..] {
            [i] => Some(i),
            _ => None,
        }
    }

    pub fn unique_least_forceful(&self) -> Option<Voter> {
        match self.least_forceful[..] {
            [i] => Some(i),
            _ => None,
        }
    }

    pub fn all_tied(&self) -> bool {
        self.most_forceful.len() == self.forces.len()
    }
}

/// `Inf_μ^i[f] = Prob_{x∼μ}[f(x) = x_i]`.
pub fn force(mu: &Distribution, f: &VotingRule, i: Voter) -> Result<Rational> {
    check_rule_measure(mu, f)?;
    let n = f.voters();
    if i >= n {
        return Err(Error::VoterOutOfRange(i, n));
    }
    let space = f.space();
    let base = space.order_count();
    let shift = base.pow((n - 1 - i) as u32);
    let table = f.table();
    Ok(mu.probability(|k| (k / shift) % base == table[k] as usize))
}

pub fn force_profile(mu: &Distribution, f: &VotingRule) -> Result<ForceProfile> {
    let forces = (0..f.voters())
        .map(|i| force(mu, f, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForceProfile::new(forces))
}

/// Which most forceful voter receives the least forceful voters' ballots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Smallest index.
    #[default]
    First,
    /// Largest index.
    Last,
    /// Uniform among the most forceful, seeded by the value and the rule's digest.
    Seeded(u64),
}

impl TieBreak {
    fn pick(self, most: &[Voter], f: &VotingRule) -> Voter {
        match self {
            TieBreak::First => most[0],
            TieBreak::Last => *most.last().unwrap(),
            TieBreak::Seeded(seed) => {
                let digest = f.digest();
                let salt = u64::from_str_radix(&digest[..16], 16).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
                most[rng.gen_range(0..most.len())]
            }
        }
    }
}

/// `Φ^μ(f)` with the first-voter tie-break.
pub fn phi(mu: &Distribution, f: &VotingRule) -> Result<VotingRule> {
    phi_with(mu, f, TieBreak::First)
}

pub fn phi_with(mu: &Distribution, f: &VotingRule, tie: TieBreak) -> Result<VotingRule> {
    if !mu.has_full_support() {
        return Err(Error::NoFullSupport);
    }
    let profile = force_profile(mu, f)?;
    Ok(phi_from_profile(f, &profile, tie))
}

fn phi_from_profile(f: &VotingRule, profile: &ForceProfile, tie: TieBreak) -> VotingRule {
    let target = tie.pick(&profile.most_forceful, f);
    let least = &profile.least_forceful;
    let space = f.space().clone();
    let table = f.table();
    let sp = space.clone();
    let mut substituted = vec![0; f.voters()];
    VotingRule::from_fn(space, move |digits| {
        substituted.copy_from_slice(digits);
        for &i in least {
            substituted[i] = digits[target];
        }
        table[sp.index_of_digits(&substituted)] as usize
    })
}

/// `f ∼ g`: `f = g`, or `f = g ∘ π⃗` for some `π` and `f` has a unique most
/// forceful voter.
pub fn equivalent(mu: &Distribution, f: &VotingRule, g: &VotingRule) -> Result<bool> {
    f.same_shape(g)?;
    if f == g {
        return Ok(true);
    }
    if force_profile(mu, f)?.unique_most_forceful().is_none() {
        return Ok(false);
    }
    for pi in VoterPermutation::all(f.voters()) {
        if *f == g.compose_voter_permutation(&pi)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// An equivalence class of `∼`, members sorted by table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitClass {
    members: Vec<VotingRule>,
}

impl OrbitClass {
    /// The class with exactly these members.
    pub fn from_members(mut members: Vec<VotingRule>) -> Self {
        members.sort();
        members.dedup();
        Self { members }
    }

    pub fn members(&self) -> &[VotingRule] {
        &self.members
    }

    /// Canonical representative (smallest table).
    pub fn representative(&self) -> &VotingRule {
        &self.members[0]
    }

    pub fn contains(&self, f: &VotingRule) -> bool {
        self.members.binary_search(f).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    /// True iff this class is `DICT`.
    pub fn is_dict(&self) -> bool {
        let n = self.members[0].voters();
        self.members.len() == n && self.members.iter().all(|f| f.is_dictatorship().is_some())
    }

    /// The class `DICT` for `n` voters and `m` candidates.
    pub fn dict(n: usize, m: usize) -> Result<Self> {
        Ok(Self::from_members(
            (0..n)
                .map(|i| VotingRule::dictator(n, m, i))
                .collect::<Result<_>>()?,
        ))
    }
}

/// `[f]`: all relabelings of `f` if it has a unique most forceful voter, else `{f}`.
pub fn orbit_class(mu: &Distribution, f: &VotingRule) -> Result<OrbitClass> {
    let profile = force_profile(mu, f)?;
    if profile.unique_most_forceful().is_none() {
        return Ok(OrbitClass::from_members(vec![f.clone()]));
    }
    let members = VoterPermutation::all(f.voters())
        .iter()
        .map(|pi| f.compose_voter_permutation(pi))
        .collect::<Result<_>>()?;
    Ok(OrbitClass::from_members(members))
}

fn check_quotient_measure(mu: &Distribution) -> Result<()> {
    if !mu.has_full_support() {
        return Err(Error::NoFullSupport);
    }
    if !mu.is_permutation_invariant() {
        return Err(Error::NotPermutationInvariant);
    }
    Ok(())
}

/// `Φ_∼([f]) = [Φ(f)]`, computed from the canonical representative.
pub fn phi_quotient(mu: &Distribution, class: &OrbitClass) -> Result<OrbitClass> {
    check_quotient_measure(mu)?;
    orbit_class(mu, &phi(mu, class.representative())?)
}

/// `Φ_∼` evaluated from every member of the class.
#[derive(Clone, Debug)]
pub struct QuotientDiagnostic {
    pub image: OrbitClass,
    /// Members whose image class differs from the representative's.
    pub disagreeing: Vec<usize>,
}

impl QuotientDiagnostic {
    pub fn well_defined(&self) -> bool {
        self.disagreeing.is_empty()
    }
}

pub fn phi_quotient_diagnostic(
    mu: &Distribution,
    class: &OrbitClass,
) -> Result<QuotientDiagnostic> {
    check_quotient_measure(mu)?;
    let images = class
        .members()
        .iter()
        .map(|f| orbit_class(mu, &phi(mu, f)?))
        .collect::<Result<Vec<_>>>()?;
    let disagreeing = (1..images.len())
        .filter(|&j| images[j] != images[0])
        .collect();
    Ok(QuotientDiagnostic {
        image: images.into_iter().next().unwrap(),
        disagreeing,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Fixpoint,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub rule: VotingRule,
    pub forces: ForceProfile,
}

/// The orbit `f, Φ(f), Φ(Φ(f)), …` up to the first fixpoint.
///
/// Each rule appears once. When `terminated_by` is [`Termination::Fixpoint`],
/// applying `Φ` to the last rule returns it unchanged.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub terminated_by: Termination,
    pub fixpoint_is_dictatorship: bool,
}

impl IterationTrace {
    pub fn last_rule(&self) -> &VotingRule {
        &self.steps.last().unwrap().rule
    }

    /// Index of the fixpoint within `steps`.
    pub fn fixpoint_step(&self) -> Option<usize> {
        (self.terminated_by == Termination::Fixpoint).then(|| self.steps.len() - 1)
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        self.steps
            .iter()
            .enumerate()
            .map(|(step, s)| TraceRecord {
                step,
                rule_table_digest: s.rule.digest(),
                forces: s.forces.forces.clone(),
                most_forceful: s.forces.most_forceful.clone(),
                least_forceful: s.forces.least_forceful.clone(),
            })
            .collect()
    }
}

/// One line of an exported trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub rule_table_digest: String,
    #[serde(with = "ratio::serde_fraction::vec")]
    pub forces: Vec<Rational>,
    pub most_forceful: Vec<Voter>,
    pub least_forceful: Vec<Voter>,
}

/// Applies `Φ` at most `max_steps` times, stopping when a rule is fixed.
pub fn iterate_phi(mu: &Distribution, f: &VotingRule, max_steps: usize) -> Result<IterationTrace> {
    iterate_phi_with(mu, f, max_steps, TieBreak::First)
}

pub fn iterate_phi_with(
    mu: &Distribution,
    f: &VotingRule,
    max_steps: usize,
    tie: TieBreak,
) -> Result<IterationTrace> {
    if !mu.has_full_support() {
        return Err(Error::NoFullSupport);
    }
    let mut current = f.clone();
    let mut forces = force_profile(mu, &current)?;
    let mut steps = Vec::new();
    for _ in 0..max_steps {
        let next = phi_from_profile(&current, &forces, tie);
        let done = next == current;
        steps.push(TraceStep {
            rule: current,
            forces,
        });
        if done {
            let fixpoint_is_dictatorship = steps.last().unwrap().rule.is_dictatorship().is_some();
            return Ok(IterationTrace {
                steps,
                terminated_by: Termination::Fixpoint,
                fixpoint_is_dictatorship,
            });
        }
        forces = force_profile(mu, &next)?;
        current = next;
    }
    steps.push(TraceStep {
        rule: current,
        forces,
    });
    Ok(IterationTrace {
        steps,
        terminated_by: Termination::StepLimit,
        fixpoint_is_dictatorship: false,
    })
}

/// Outcome of the collapse test `Φ^(n)(f) = f ∘ s_i` on one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseEntry {
    pub index: usize,
    pub rule_digest: String,
    pub iterate_digest: String,
    /// The `i` with `Φ^(n)(f) = f ∘ s_i`, if any.
    pub collapsed_to: Option<Voter>,
    pub iterate_is_dictatorship: Option<Voter>,
    pub input_is_phi_fixed: bool,
}

impl CollapseEntry {
    pub fn passed(&self) -> bool {
        self.collapsed_to.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub rules_checked: usize,
    pub passed: usize,
    pub failed: usize,
    pub entries: Vec<CollapseEntry>,
}

impl CollapseReport {
    pub fn witnesses(&self) -> impl Iterator<Item = &CollapseEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }
}

/// Tests, for each rule, whether `n` applications of `Φ` land on some
/// `f ∘ s_i`. Reports per-rule outcomes; never fails on a negative finding.
pub fn check_collapse_conjecture(
    mu: &Distribution,
    rules: &[VotingRule],
) -> Result<CollapseReport> {
    check_quotient_measure(mu)?;
    let entries = rules
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            let n = f.voters();
            let first = phi(mu, f)?;
            let input_is_phi_fixed = first == *f;
            let mut iterate = first;
            for _ in 1..n {
                iterate = phi(mu, &iterate)?;
            }
            let mut collapsed_to = None;
            for i in 0..n {
                if iterate == f.compose_collapse(i)? {
                    collapsed_to = Some(i);
                    break;
                }
            }
            Ok(CollapseEntry {
                index,
                rule_digest: f.digest(),
                iterate_digest: iterate.digest(),
                collapsed_to,
                iterate_is_dictatorship: iterate.is_dictatorship(),
                input_is_phi_fixed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().filter(|e| e.passed()).count();
    Ok(CollapseReport {
        rules_checked: entries.len(),
        passed,
        failed: entries.len() - passed,
        entries,
    })
}

/// `min_{k,l} d_μ(f ∘ s_k, g ∘ s_l)`.
pub fn collapsed_distance(mu: &Distribution, f: &VotingRule, g: &VotingRule) -> Result<Rational> {
    f.same_shape(g)?;
    let n = f.voters();
    let fs = (0..n)
        .map(|k| f.compose_collapse(k))
        .collect::<Result<Vec<_>>>()?;
    let gs = (0..n)
        .map(|l| g.compose_collapse(l))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<Rational> = None;
    for a in &fs {
        for b in &gs {
            let d = rule_distance(mu, a, b)?;
            if best.as_ref().is_none_or(|v| d < *v) {
                best = Some(d);
            }
        }
    }
    Ok(best.unwrap())
}

/// Forces of `f = cylinder(g)` under `μ = ν^[n]` next to the bounds
/// `Inf^n ≤ 2/(n·m!)` and `Inf^i ≥ Inf_ν^i[g]/n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderBounds {
    #[serde(with = "ratio::serde_fraction::vec")]
    pub forces: Vec<Rational>,
    #[serde(with = "ratio::serde_fraction::vec")]
    pub inner_forces: Vec<Rational>,
    #[serde(with = "ratio::serde_fraction")]
    pub last_voter_bound: Rational,
    pub last_voter_within_bound: bool,
    pub lower_bounds_hold: bool,
}

impl CylinderBounds {
    pub fn holds(&self) -> bool {
        self.last_voter_within_bound && self.lower_bounds_hold
    }
}

/// Evaluates [`CylinderBounds`] with `μ = nu.lift(last)` and `f = g.cylinder_extend()`.
pub fn cylinder_bounds(nu: &Distribution, g: &VotingRule) -> Result<CylinderBounds> {
    let mu = nu.lift(nu.voters())?;
    let f = g.cylinder_extend()?;
    cylinder_bounds_with(nu, &mu, g, &f)
}

pub(crate) fn cylinder_bounds_with(
    nu: &Distribution,
    mu: &Distribution,
    g: &VotingRule,
    f: &VotingRule,
) -> Result<CylinderBounds> {
    let n = f.voters();
    let forces = force_profile(mu, f)?.forces;
    let inner_forces = force_profile(nu, g)?.forces;
    let last_voter_bound = ratio::rational(2, (n * f.space().order_count()) as i64);
    let n_rat = ratio::from_int(n as i64);
    Ok(CylinderBounds {
        last_voter_within_bound: forces[n - 1] <= last_voter_bound,
        lower_bounds_hold: (0..n - 1).all(|i| forces[i] >= &inner_forces[i] / &n_rat),
        forces,
        inner_forces,
        last_voter_bound,
    })
}
