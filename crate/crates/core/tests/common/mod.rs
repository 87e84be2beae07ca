//! Reference computations that avoid the library's fast paths.
#![allow(dead_code)]

use arrowlab::quotient::{EquivalencePartition, FiniteMetricSpace};
use arrowlab::ratio::{self, Rational};
use arrowlab::{Distribution, LinearOrder, ProfileSpace, VotingRule};
use itertools::Itertools;

/// All Pareto and IIA rules, found by trying every unrestricted per-pair truth
/// table and assembling outputs with `LinearOrder::prefers`.
pub fn arrow_rules(n: usize, m: usize) -> Vec<VotingRule> {
    let space = ProfileSpace::shared(n, m).unwrap();
    let pairs: Vec<(usize, usize)> = (0..m).tuple_combinations().collect();
    let rows = 1u64 << n;
    let per_pair = 1u64 << rows;
    let total = per_pair.pow(pairs.len() as u32);
    let mut found = Vec::new();
    'candidate: for c in 0..total {
        let tables: Vec<u64> = (0..pairs.len())
            .map(|p| (c / per_pair.pow(p as u32)) % per_pair)
            .collect();
        let mut table = Vec::with_capacity(space.profile_count());
        for k in 0..space.profile_count() {
            let profile = space.profile_from_index(k).unwrap();
            let wanted: Vec<bool> = pairs
                .iter()
                .zip(&tables)
                .map(|(&(a, b), &t)| {
                    let mask = (0..n)
                        .filter(|&i| profile.ballot(i).prefers(a, b).unwrap())
                        .fold(0u64, |acc, i| acc | 1 << i);
                    t >> mask & 1 == 1
                })
                .collect();
            let order = space.orders().iter().position(|o| {
                pairs
                    .iter()
                    .zip(&wanted)
                    .all(|(&(a, b), &w)| o.prefers(a, b).unwrap() == w)
            });
            match order {
                Some(o) => table.push(o as u32),
                None => continue 'candidate,
            }
        }
        let rule = VotingRule::from_table(n, m, table).unwrap();
        if rule.is_pareto() && rule.is_iia() {
            found.push(rule);
        }
    }
    found
}

/// `d_μ(f, g)` under the uniform distribution, by counting disagreeing profiles.
pub fn uniform_distance(f: &VotingRule, g: &VotingRule) -> Rational {
    let space = f.space();
    let differ = (0..space.profile_count())
        .filter(|&k| {
            let p = space.profile_from_index(k).unwrap();
            f.evaluate(&p).unwrap() != g.evaluate(&p).unwrap()
        })
        .count();
    ratio::rational(differ as i64, space.profile_count() as i64)
}

/// `Prob_{x∼μ}[f(x) = x_i]` by evaluating the rule on decoded profiles.
pub fn force(mu: &Distribution, f: &VotingRule, i: usize) -> Rational {
    let space = f.space();
    let mut total = ratio::zero();
    for k in 0..space.profile_count() {
        let p = space.profile_from_index(k).unwrap();
        if f.evaluate(&p).unwrap() == *p.ballot(i) {
            total += mu.weight(k);
        }
    }
    total
}

/// `Σ_τ ν(v_i(τ⃗ x)) / (n!·m!)` summed literally over decoded profiles.
pub fn lift(nu: &Distribution, i: usize) -> Vec<Rational> {
    let n = nu.voters() + 1;
    let m = nu.candidates();
    let big = ProfileSpace::shared(n, m).unwrap();
    let small = nu.space();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let norm = ratio::from_int((perms.len() * small.order_count()) as i64);
    (0..big.profile_count())
        .map(|k| {
            let x = big.profile_from_index(k).unwrap();
            let mut sum = ratio::zero();
            for tau in &perms {
                let moved: Vec<LinearOrder> = tau.iter().map(|&t| x.ballot(t).clone()).collect();
                let rest: Vec<LinearOrder> = moved
                    .into_iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, o)| o)
                    .collect();
                let idx = small
                    .profile_index(&arrowlab::Profile::new(rest).unwrap())
                    .unwrap();
                sum += nu.weight(idx);
            }
            sum / &norm
        })
        .collect()
}

/// Shortest chains with free hops inside classes, by Floyd–Warshall.
pub fn chain_distances(
    space: &FiniteMetricSpace,
    part: &EquivalencePartition,
) -> Vec<Vec<Rational>> {
    let n = space.len();
    let mut d: Vec<Vec<Rational>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    if part.class_of(x) == part.class_of(y) {
                        ratio::zero()
                    } else {
                        space.dist(x, y).clone()
                    }
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = &d[x][k] + &d[k][y];
                if via < d[x][y] {
                    d[x][y] = via;
                }
            }
        }
    }
    d
}
