//! Finite metric spaces, quotients by an equivalence relation, and the
//! distance `d_μ` between voting rules.
//!
//! Two routes compute the quotient distance between classes `[x]` and `[y]`:
//!
//! * [`quotient_distance_chain`] takes the infimum over chains
//!   `x = a0 ∼ b0, a1 ∼ b1, …, an ∼ bn = y` of `Σ d(b_i, a_{i+1})`. On a
//!   finite space the infimum is attained and equals a shortest path in the
//!   graph with free edges inside classes and `d` on all other edges.
//! * [`quotient_distance_orbit`] takes `min d(x', y')` over the two classes,
//!   which agrees with the chain value when the classes are orbits of a
//!   group of isometries. [`verify_isometry_orbits`] checks that hypothesis.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::ratio::{self, Rational};
use crate::rules::VotingRule;

/// A finite set `0..len` with a rational distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    pub fn from_matrix(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidFixture("empty space".into()));
        }
        if dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidFixture(
                "distance matrix is not square".into(),
            ));
        }
        Ok(Self { dist })
    }

    /// Evaluates `f` on every ordered pair, diagonal included.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self> {
        Self::from_matrix(
            (0..len)
                .map(|i| (0..len).map(|j| f(i, j)).collect())
                .collect(),
        )
    }

    /// Row-major entries `d(i, j)` for `i < j`; zero diagonal, mirrored below.
    pub fn from_upper_triangular(len: usize, upper: &[Rational]) -> Result<Self> {
        if upper.len() != len * len.saturating_sub(1) / 2 {
            return Err(Error::InvalidFixture(format!(
                "{} upper-triangular entries for {len} points",
                upper.len()
            )));
        }
        let mut dist = vec![vec![ratio::zero(); len]; len];
        let mut it = upper.iter();
        for i in 0..len {
            for j in i + 1..len {
                let d = it.next().unwrap().clone();
                dist[i][j] = d.clone();
                dist[j][i] = d;
            }
        }
        Self::from_matrix(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    pub fn upper_triangular(&self) -> Vec<Rational> {
        (0..self.len())
            .flat_map(|i| (i + 1..self.len()).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j].clone())
            .collect()
    }
}

/// A partition of the points, stored as a class id per point.
///
/// Class ids are renumbered by first occurrence, so equal partitions have
/// equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquivalencePartition {
    class_of: Vec<usize>,
}

impl EquivalencePartition {
    pub fn new(class_of: Vec<usize>) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let class_of = class_of
            .into_iter()
            .map(|c| {
                let next = relabel.len();
                *relabel.entry(c).or_insert(next)
            })
            .collect();
        Self { class_of }
    }

    pub fn singletons(len: usize) -> Self {
        Self {
            class_of: (0..len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_of
    }

    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn members(&self, x: usize) -> Vec<usize> {
        let c = self.class_of[x];
        (0..self.len()).filter(|&y| self.class_of[y] == c).collect()
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }
}

fn check_partition(space: &FiniteMetricSpace, part: &EquivalencePartition) -> Result<()> {
    if space.len() != part.len() {
        return Err(Error::InvalidFixture(format!(
            "partition covers {} points, space has {}",
            part.len(),
            space.len()
        )));
    }
    Ok(())
}

/// Chain-infimum distances from `x` to every point.
pub fn chain_distances_from(
    space: &FiniteMetricSpace,
    part: &EquivalencePartition,
    x: usize,
) -> Result<Vec<Rational>> {
    check_partition(space, part)?;
    let n = space.len();
    let mut best: Vec<Option<Rational>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    best[x] = Some(ratio::zero());
    heap.push(Reverse((ratio::zero(), x)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for v in 0..n {
            if done[v] {
                continue;
            }
            let step = if part.equivalent(u, v) {
                ratio::zero()
            } else {
                space.dist(u, v).clone()
            };
            let cand = &d + step;
            if best[v].as_ref().is_none_or(|b| cand < *b) {
                best[v] = Some(cand.clone());
                heap.push(Reverse((cand, v)));
            }
        }
    }
    Ok(best.into_iter().map(Option::unwrap).collect())
}

/// `d_∼([x], [y])` as the minimum chain length.
pub fn quotient_distance_chain(
    space: &FiniteMetricSpace,
    part: &EquivalencePartition,
    x: usize,
    y: usize,
) -> Result<Rational> {
    Ok(chain_distances_from(space, part, x)?.swap_remove(y))
}

/// `min { d(x', y') | x' ∈ [x], y' ∈ [y] }`.
///
/// Equals [`quotient_distance_chain`] only when the classes are orbits of a
/// group of isometries; the caller is responsible for that hypothesis.
pub fn quotient_distance_orbit(
    space: &FiniteMetricSpace,
    part: &EquivalencePartition,
    x: usize,
    y: usize,
) -> Result<Rational> {
    check_partition(space, part)?;
    let ys = part.members(y);
    Ok(part
        .members(x)
        .iter()
        .flat_map(|&a| ys.iter().map(move |&b| (a, b)))
        .map(|(a, b)| space.dist(a, b).clone())
        .min()
        .unwrap())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricViolation {
    NonzeroSelfDistance { x: usize },
    Negative { x: usize, y: usize },
    Asymmetric { x: usize, y: usize },
    IdentityOfIndiscernibles { x: usize, y: usize },
    Triangle { x: usize, y: usize, z: usize },
}

/// Outcome of an exhaustive axiom check; `violation` is the first one found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub points: usize,
    pub triples_checked: usize,
    pub violation: Option<MetricViolation>,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustive check of the metric axioms. Scan order: diagonal, ordered
/// pairs, ordered triples.
pub fn check_metric_axioms(space: &FiniteMetricSpace) -> MetricReport {
    check_axioms(space, true)
}

/// As [`check_metric_axioms`] but allowing distinct points at distance zero.
pub fn check_pseudometric_axioms(space: &FiniteMetricSpace) -> MetricReport {
    check_axioms(space, false)
}

fn check_axioms(space: &FiniteMetricSpace, separate: bool) -> MetricReport {
    let n = space.len();
    let report = |violation| MetricReport {
        points: n,
        triples_checked: n * n * n,
        violation,
    };
    let zero = ratio::zero();
    for x in 0..n {
        if space.dist(x, x) != &zero {
            return report(Some(MetricViolation::NonzeroSelfDistance { x }));
        }
    }
    for x in 0..n {
        for y in 0..n {
            let d = space.dist(x, y);
            if d < &zero {
                return report(Some(MetricViolation::Negative { x, y }));
            }
            if d != space.dist(y, x) {
                return report(Some(MetricViolation::Asymmetric { x, y }));
            }
            if separate && x != y && d == &zero {
                return report(Some(MetricViolation::IdentityOfIndiscernibles { x, y }));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if space.dist(x, z) > &(space.dist(x, y) + space.dist(y, z)) {
                    return report(Some(MetricViolation::Triangle { x, y, z }));
                }
            }
        }
    }
    report(None)
}

/// Why a partition failed to be the orbit partition of an isometry group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitDiagnostic {
    NotAPermutation {
        generator: usize,
    },
    NotAnIsometry {
        generator: usize,
        x: usize,
        y: usize,
    },
    ClassMismatch {
        point: usize,
    },
}

/// Checks that each generator is an isometric permutation of the points and
/// that the orbits of the group they generate are exactly the classes.
pub fn verify_isometry_orbits(
    space: &FiniteMetricSpace,
    part: &EquivalencePartition,
    generators: &[Vec<usize>],
) -> std::result::Result<(), OrbitDiagnostic> {
    let n = space.len();
    for (g, map) in generators.iter().enumerate() {
        let mut seen = vec![false; n];
        if map.len() != n
            || map
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(OrbitDiagnostic::NotAPermutation { generator: g });
        }
        for x in 0..n {
            for y in 0..n {
                if space.dist(map[x], map[y]) != space.dist(x, y) {
                    return Err(OrbitDiagnostic::NotAnIsometry { generator: g, x, y });
                }
            }
        }
    }
    // In a finite group, closure under the generators gives the full orbit.
    let mut orbit_of = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        orbit_of[start] = next;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for map in generators {
                let y = map[x];
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    let orbits = EquivalencePartition::new(orbit_of);
    if part.len() != n {
        return Err(OrbitDiagnostic::ClassMismatch { point: 0 });
    }
    match (0..n).find(|&x| orbits.class_of(x) != part.class_of(x)) {
        Some(point) => Err(OrbitDiagnostic::ClassMismatch { point }),
        None => Ok(()),
    }
}

/// A synthetic space together with the isometries generating its partition.
#[derive(Clone, Debug)]
pub struct OrbitFixture {
    pub space: FiniteMetricSpace,
    pub partition: EquivalencePartition,
    pub generators: Vec<Vec<usize>>,
}

/// Random fixture of at most `max_points` points whose classes are orbits of
/// a cyclic isometry group.
///
/// Points are `layers` copies of `Z_k` plus some fixed points. Raw weights
/// depend only on the layers and the cyclic offset, so the shift is an
/// isometry of the raw weights; the metric is their shortest-path closure,
/// which inherits every isometry.
pub fn random_orbit_fixture(seed: u64, max_points: usize) -> OrbitFixture {
    let max_points = max_points.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(1..=4.min(max_points));
    let layers = rng.gen_range(1..=(max_points / k).clamp(1, 3));
    let fixed = rng.gen_range(0..=(max_points - k * layers).min(3));
    let cyc = k * layers;
    let n = cyc + fixed;

    let mut weight = || ratio::rational(rng.gen_range(2..=24), rng.gen_range(1..=3));
    // (layer s, layer t, offset δ) with h(s,t,δ) = h(t,s,-δ)
    let mut h = vec![vec![vec![ratio::zero(); k]; layers]; layers];
    for s in 0..layers {
        for t in s..layers {
            for delta in 0..k {
                if s == t && delta == 0 {
                    continue;
                }
                if s == t && (k - delta) % k < delta {
                    continue;
                }
                let w = weight();
                h[s][t][delta] = w.clone();
                h[t][s][(k - delta) % k] = w;
            }
        }
    }
    let to_layer: Vec<Vec<Rational>> = (0..fixed)
        .map(|_| (0..layers).map(|_| weight()).collect())
        .collect();
    let mut between_fixed = vec![vec![ratio::zero(); fixed]; fixed];
    for a in 0..fixed {
        for b in a + 1..fixed {
            let w = weight();
            between_fixed[a][b] = w.clone();
            between_fixed[b][a] = w;
        }
    }

    let raw = |x: usize, y: usize| -> Rational {
        if x == y {
            return ratio::zero();
        }
        match (x < cyc, y < cyc) {
            (true, true) => {
                let (s, a) = (x / k, x % k);
                let (t, b) = (y / k, y % k);
                h[s][t][(b + k - a) % k].clone()
            }
            (true, false) => to_layer[y - cyc][x / k].clone(),
            (false, true) => to_layer[x - cyc][y / k].clone(),
            (false, false) => between_fixed[x - cyc][y - cyc].clone(),
        }
    };
    let mut dist: Vec<Vec<Rational>> = (0..n)
        .map(|x| (0..n).map(|y| raw(x, y)).collect())
        .collect();
    for via in 0..n {
        for x in 0..n {
            for y in 0..n {
                let through = &dist[x][via] + &dist[via][y];
                if through < dist[x][y] {
                    dist[x][y] = through;
                }
            }
        }
    }

    let shift: Vec<usize> = (0..n)
        .map(|x| {
            if x < cyc {
                (x / k) * k + (x % k + 1) % k
            } else {
                x
            }
        })
        .collect();
    let classes: Vec<usize> = (0..n).map(|x| if x < cyc { x / k } else { x }).collect();
    OrbitFixture {
        space: FiniteMetricSpace::from_matrix(dist).unwrap(),
        partition: EquivalencePartition::new(classes),
        generators: vec![shift],
    }
}

/// On-disk form of a synthetic metric fixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub points: usize,
    #[serde(with = "ratio::serde_fraction::vec")]
    pub dist: Vec<Rational>,
    pub classes: Vec<usize>,
}

impl FixtureFile {
    pub fn new(space: &FiniteMetricSpace, part: &EquivalencePartition) -> Self {
        Self {
            points: space.len(),
            dist: space.upper_triangular(),
            classes: part.class_ids().to_vec(),
        }
    }

    pub fn load(&self) -> Result<(FiniteMetricSpace, EquivalencePartition)> {
        let space = FiniteMetricSpace::from_upper_triangular(self.points, &self.dist)?;
        if self.classes.len() != self.points {
            return Err(Error::InvalidFixture(format!(
                "{} class ids for {} points",
                self.classes.len(),
                self.points
            )));
        }
        Ok((space, EquivalencePartition::new(self.classes.clone())))
    }
}

/// `d_μ(f, g) = Prob_{x∼μ}[f(x) ≠ g(x)]`.
pub fn rule_distance(mu: &Distribution, f: &VotingRule, g: &VotingRule) -> Result<Rational> {
    f.same_shape(g)?;
    check_rule_measure(mu, f)?;
    let (a, b) = (f.table(), g.table());
    Ok(mu.probability(|k| a[k] != b[k]))
}

pub(crate) fn check_rule_measure(mu: &Distribution, f: &VotingRule) -> Result<()> {
    if mu.voters() != f.voters() || mu.candidates() != f.candidates() {
        return Err(crate::error::mismatch(
            format!("{} voters x {} candidates", f.voters(), f.candidates()),
            format!("{} voters x {} candidates", mu.voters(), mu.candidates()),
        ));
    }
    Ok(())
}

/// The rules as points of `(M, d_μ)`.
pub fn rule_metric_space(mu: &Distribution, rules: &[VotingRule]) -> Result<FiniteMetricSpace> {
    let mut dist = Vec::with_capacity(rules.len());
    for f in rules {
        dist.push(
            rules
                .iter()
                .map(|g| rule_distance(mu, f, g))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    FiniteMetricSpace::from_matrix(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{from_int, rational};

    /// Points a, b, b', c with b ∼ b'.
    fn four_point() -> (FiniteMetricSpace, EquivalencePartition) {
        let d = |v: i64| from_int(v);
        // a-b, a-b', a-c, b-b', b-c, b'-c
        let upper = [d(3), d(5), d(8), d(2), d(6), d(4)];
        let space = FiniteMetricSpace::from_upper_triangular(4, &upper).unwrap();
        (space, EquivalencePartition::new(vec![0, 1, 1, 2]))
    }

    /// Every chain with at most `hops` metric steps, enumerated directly.
    fn brute_force_chain(
        space: &FiniteMetricSpace,
        part: &EquivalencePartition,
        x: usize,
        y: usize,
        hops: usize,
    ) -> Rational {
        let n = space.len();
        let mut best: Option<Rational> = None;
        // frontier: (current a_i, accumulated length)
        let mut frontier = vec![(x, ratio::zero())];
        for _ in 0..=hops {
            let mut next = Vec::new();
            for (a, len) in frontier {
                // lengths only grow, so chains already at the best length can stop
                if best.as_ref().is_some_and(|v| len >= *v) {
                    continue;
                }
                for b in (0..n).filter(|&b| part.equivalent(a, b)) {
                    if b == y && best.as_ref().is_none_or(|v| len < *v) {
                        best = Some(len.clone());
                    }
                    for a2 in 0..n {
                        next.push((a2, &len + space.dist(b, a2)));
                    }
                }
            }
            frontier = next;
        }
        best.unwrap()
    }

    #[test]
    fn four_point_fixture_chain_is_seven() {
        let (space, part) = four_point();
        assert!(check_metric_axioms(&space).passed());
        assert_eq!(brute_force_chain(&space, &part, 0, 3, 3), from_int(7));
        assert_eq!(
            quotient_distance_chain(&space, &part, 0, 3).unwrap(),
            from_int(7)
        );
        assert_eq!(
            quotient_distance_chain(&space, &part, 1, 2).unwrap(),
            ratio::zero()
        );
    }

    #[test]
    fn singleton_partition_reproduces_the_metric() {
        let (space, _) = four_point();
        let part = EquivalencePartition::singletons(4);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(
                    &quotient_distance_chain(&space, &part, x, y).unwrap(),
                    space.dist(x, y)
                );
                assert_eq!(
                    &quotient_distance_orbit(&space, &part, x, y).unwrap(),
                    space.dist(x, y)
                );
            }
        }
    }

    #[test]
    fn orbit_route_same_class_is_zero() {
        let (space, part) = four_point();
        assert_eq!(
            quotient_distance_orbit(&space, &part, 2, 1).unwrap(),
            ratio::zero()
        );
    }

    #[test]
    fn chain_matches_brute_force_on_random_fixtures() {
        for seed in 0..30 {
            let fx = random_orbit_fixture(seed, 5);
            let n = fx.space.len();
            let hops = fx.partition.class_count();
            for x in 0..n {
                let fast = chain_distances_from(&fx.space, &fx.partition, x).unwrap();
                for y in 0..n {
                    assert_eq!(
                        fast[y],
                        brute_force_chain(&fx.space, &fx.partition, x, y, hops)
                    );
                }
            }
        }
    }

    #[test]
    fn random_fixtures_are_verified_orbit_metrics() {
        for seed in 0..50 {
            let fx = random_orbit_fixture(seed, 12);
            assert!(fx.space.len() <= 12);
            assert!(check_metric_axioms(&fx.space).passed(), "seed {seed}");
            verify_isometry_orbits(&fx.space, &fx.partition, &fx.generators).unwrap();
        }
    }

    #[test]
    fn orbit_diagnostic_catches_bad_partitions() {
        let (space, part) = four_point();
        // swapping b and b' is not an isometry here (d(a,b) != d(a,b'))
        assert_eq!(
            verify_isometry_orbits(&space, &part, &[vec![0, 2, 1, 3]]),
            Err(OrbitDiagnostic::NotAnIsometry {
                generator: 0,
                x: 0,
                y: 1
            })
        );
        assert_eq!(
            verify_isometry_orbits(&space, &part, &[vec![0, 0, 1, 3]]),
            Err(OrbitDiagnostic::NotAPermutation { generator: 0 })
        );
        assert_eq!(
            verify_isometry_orbits(&space, &part, &[]),
            Err(OrbitDiagnostic::ClassMismatch { point: 2 })
        );
    }

    #[test]
    fn axiom_checker_reports_violations() {
        let single = FiniteMetricSpace::from_matrix(vec![vec![ratio::zero()]]).unwrap();
        assert!(check_metric_axioms(&single).passed());

        let d = |v: i64| from_int(v);
        let bad = FiniteMetricSpace::from_upper_triangular(3, &[d(1), d(5), d(1)]).unwrap();
        assert_eq!(
            check_metric_axioms(&bad).violation,
            Some(MetricViolation::Triangle { x: 0, y: 1, z: 2 })
        );
        let pseudo = FiniteMetricSpace::from_upper_triangular(2, &[d(0)]).unwrap();
        assert_eq!(
            check_metric_axioms(&pseudo).violation,
            Some(MetricViolation::IdentityOfIndiscernibles { x: 0, y: 1 })
        );
        assert!(check_pseudometric_axioms(&pseudo).passed());
        let asym =
            FiniteMetricSpace::from_matrix(vec![vec![d(0), d(1)], vec![d(2), d(0)]]).unwrap();
        assert_eq!(
            check_metric_axioms(&asym).violation,
            Some(MetricViolation::Asymmetric { x: 0, y: 1 })
        );
    }

    #[test]
    fn dictator_distance_under_uniform() {
        let mu = Distribution::uniform(2, 3).unwrap();
        let d0 = VotingRule::dictator(2, 3, 0).unwrap();
        let d1 = VotingRule::dictator(2, 3, 1).unwrap();
        // oracle: count the profiles where the two ballots differ
        let space = d0.space().clone();
        let differing = (0..36)
            .filter(|&k| {
                let p = space.profile_from_index(k).unwrap();
                p.ballot(0) != p.ballot(1)
            })
            .count();
        assert_eq!(differing, 30);
        let expected = rational(differing as i64, 36);
        assert_eq!(rule_distance(&mu, &d0, &d1).unwrap(), expected);
        assert_eq!(expected, rational(5, 6));
        assert_eq!(rule_distance(&mu, &d0, &d0).unwrap(), ratio::zero());
    }

    #[test]
    fn point_mass_metric_fails_identity() {
        // both rules are Pareto and agree on the unanimous profile carrying all mass
        let mu = Distribution::point_mass(2, 3, 0).unwrap();
        let rules = vec![
            VotingRule::dictator(2, 3, 0).unwrap(),
            VotingRule::dictator(2, 3, 1).unwrap(),
        ];
        let space = rule_metric_space(&mu, &rules).unwrap();
        assert_eq!(
            check_metric_axioms(&space).violation,
            Some(MetricViolation::IdentityOfIndiscernibles { x: 0, y: 1 })
        );
    }

    #[test]
    fn fixture_file_round_trip() {
        let fx = random_orbit_fixture(3, 8);
        let file = FixtureFile::new(&fx.space, &fx.partition);
        let json = serde_json::to_string(&file).unwrap();
        let back: FixtureFile = serde_json::from_str(&json).unwrap();
        let (space, part) = back.load().unwrap();
        assert_eq!(space, fx.space);
        assert_eq!(part, fx.partition);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mu = Distribution::uniform(2, 3).unwrap();
        let f = VotingRule::dictator(2, 3, 0).unwrap();
        let g = VotingRule::dictator(3, 3, 0).unwrap();
        assert!(rule_distance(&mu, &f, &g).is_err());
        assert!(rule_distance(&Distribution::uniform(3, 3).unwrap(), &f, &f).is_err());
    }
}
