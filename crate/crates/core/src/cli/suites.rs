//! Seeded verification suites behind `check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{
    check_collapse_conjecture, cylinder_bounds, force, force_profile, orbit_class, phi,
    phi_quotient, phi_quotient_diagnostic, OrbitClass,
};
use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::orders::{LinearOrder, VoterPermutation};
use crate::quotient::{
    check_metric_axioms, quotient_distance_chain, quotient_distance_orbit, random_orbit_fixture,
    rule_distance, rule_metric_space, verify_isometry_orbits,
};
use crate::ratio::{self, Rational};
use crate::rules::VotingRule;

pub const SUITE_NAMES: [&str; 8] = [
    "metric",
    "isometry",
    "relabel",
    "equivalence",
    "welldef",
    "cylinder",
    "quotient",
    "collapse",
];

pub struct SuiteParams<'a> {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub mu: &'a Distribution,
    /// Star parameters for the cylinder suite.
    pub epsilon: Rational,
    pub y_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    /// Report-only suites never affect the exit status.
    pub asserted: bool,
    pub passed: bool,
    pub details: Value,
}

fn outcome(name: &str, passed: bool, details: Value) -> SuiteOutcome {
    SuiteOutcome {
        name: name.to_string(),
        asserted: true,
        passed,
        details,
    }
}

/// `count` random Pareto rules drawn from per-rule seeds of one seeded stream.
pub fn pareto_population(n: usize, m: usize, seed: u64, count: usize) -> Result<Vec<VotingRule>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| rng.gen()).collect();
    seeds
        .into_par_iter()
        .map(|s| VotingRule::random_pareto(n, m, s))
        .collect()
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<SuiteOutcome> {
    match name {
        "metric" => metric(p),
        "isometry" => isometry(p),
        "relabel" => relabel(p),
        "equivalence" => equivalence(p),
        "welldef" => welldef(p),
        "cylinder" => cylinder(p),
        "quotient" => quotient(p),
        "collapse" => collapse(p),
        other => Err(Error::InvalidFixture(format!("unknown suite '{other}'"))),
    }
}

fn metric(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut rules = pareto_population(p.n, p.m, p.seed, 50)?;
    rules.extend(
        (0..p.n)
            .map(|i| VotingRule::dictator(p.n, p.m, i))
            .collect::<Result<Vec<_>>>()?,
    );
    rules.sort();
    rules.dedup();
    let space = rule_metric_space(p.mu, &rules)?;
    let report = check_metric_axioms(&space);
    let d01 = if p.n >= 2 {
        let d0 = VotingRule::dictator(p.n, p.m, 0)?;
        let d1 = VotingRule::dictator(p.n, p.m, 1)?;
        Some(ratio::to_fraction_string(&rule_distance(p.mu, &d0, &d1)?))
    } else {
        None
    };
    Ok(outcome(
        "metric",
        report.passed(),
        json!({
            "rules": rules.len(),
            "triples_checked": report.triples_checked,
            "violation": report.violation.map(|v| format!("{v:?}")),
            "dictator_0_1_distance": d01,
        }),
    ))
}

fn isometry(p: &SuiteParams) -> Result<SuiteOutcome> {
    let rules = pareto_population(p.n, p.m, p.seed, 200)?;
    let perms = VoterPermutation::all(p.n);
    let failures: usize = (0..rules.len())
        .into_par_iter()
        .map(|j| -> Result<usize> {
            let (f, g) = (&rules[j], &rules[(j + 1) % rules.len()]);
            let d = rule_distance(p.mu, f, g)?;
            let mut bad = 0;
            for pi in &perms {
                let moved = rule_distance(
                    p.mu,
                    &f.compose_voter_permutation(pi)?,
                    &g.compose_voter_permutation(pi)?,
                )?;
                bad += usize::from(moved != d);
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(outcome(
        "isometry",
        failures == 0,
        json!({ "pairs": rules.len(), "permutations": perms.len(), "failures": failures }),
    ))
}

fn relabel(p: &SuiteParams) -> Result<SuiteOutcome> {
    let rules = pareto_population(p.n, p.m, p.seed, 200)?;
    let perms = VoterPermutation::all(p.n);
    let failures: usize = rules
        .par_iter()
        .map(|f| -> Result<usize> {
            let forces = force_profile(p.mu, f)?.forces;
            let mut bad = 0;
            for pi in &perms {
                let g = f.compose_voter_permutation(pi)?;
                for (i, fi) in forces.iter().enumerate() {
                    bad += usize::from(force(p.mu, &g, pi.image(i))? != *fi);
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(outcome(
        "relabel",
        failures == 0,
        json!({ "rules": rules.len(), "permutations": perms.len(), "failures": failures }),
    ))
}

fn equivalence(p: &SuiteParams) -> Result<SuiteOutcome> {
    let dict = OrbitClass::dict(p.n, p.m)?;
    let mut dict_ok = true;
    for i in 0..p.n {
        dict_ok &= orbit_class(p.mu, &VotingRule::dictator(p.n, p.m, i)?)? == dict;
    }
    let dict_fixed = phi_quotient(p.mu, &dict)? == dict;
    let rules = pareto_population(p.n, p.m, p.seed, 100)?;
    let failures: usize = rules
        .par_iter()
        .map(|f| -> Result<usize> {
            let collapsed = (0..p.n)
                .map(|k| f.compose_collapse(k))
                .collect::<Result<Vec<_>>>()?;
            let expected = OrbitClass::from_members(collapsed.clone());
            let mut bad = 0;
            for (i, fs) in collapsed.iter().enumerate() {
                let unique = force_profile(p.mu, fs)?.unique_most_forceful() == Some(i);
                bad += usize::from(!unique || orbit_class(p.mu, fs)? != expected);
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(outcome(
        "equivalence",
        dict_ok && dict_fixed && failures == 0,
        json!({
            "dict_is_orbit_of_each_dictator": dict_ok,
            "phi_fixes_dict": dict_fixed,
            "collapsed_rules_checked": rules.len(),
            "failures": failures,
        }),
    ))
}

/// Rules whose classes are mostly non-trivial: dictators with a few outputs
/// replaced, collapsed rules, and plain random Pareto rules.
fn welldef_samples(p: &SuiteParams, count: usize) -> Result<Vec<VotingRule>> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x5745_4c4c);
    let profiles = p.mu.space().profile_count();
    (0..count)
        .map(|k| {
            let donor = VotingRule::random_pareto(p.n, p.m, rng.gen())?;
            match k % 3 {
                0 => {
                    let mut f = VotingRule::dictator(p.n, p.m, rng.gen_range(0..p.n))?;
                    for _ in 0..rng.gen_range(1..=3) {
                        let x = rng.gen_range(0..profiles);
                        f = f.with_output(x, donor.output_index(x))?;
                    }
                    Ok(f)
                }
                1 => donor.compose_collapse(rng.gen_range(0..p.n)),
                _ => Ok(donor),
            }
        })
        .collect()
}

fn welldef(p: &SuiteParams) -> Result<SuiteOutcome> {
    let samples = welldef_samples(p, 100)?;
    let results = samples
        .par_iter()
        .map(|f| -> Result<(bool, bool, bool)> {
            let class = orbit_class(p.mu, f)?;
            let diag = phi_quotient_diagnostic(p.mu, &class)?;
            let image = phi(p.mu, class.representative())?;
            let tied = force_profile(p.mu, &image)?
                .unique_most_forceful()
                .is_none();
            Ok((class.is_singleton(), diag.well_defined(), tied))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = results.iter().filter(|r| !r.1).count();
    let tied_failures = results.iter().filter(|r| !r.1 && r.2).count();
    let nontrivial = results.iter().filter(|r| !r.0).count();
    let witness = match results.iter().position(|r| !r.1) {
        Some(k) => {
            let class = orbit_class(p.mu, &samples[k])?;
            let f = class.representative();
            let image = phi(p.mu, f)?;
            let fractions =
                |v: Vec<Rational>| v.iter().map(ratio::to_fraction_string).collect::<Vec<_>>();
            Some(json!({
                "sample": k,
                "representative_digest": f.digest(),
                "class_size": class.len(),
                "forces": fractions(force_profile(p.mu, f)?.forces),
                "image_digest": image.digest(),
                "image_forces": fractions(force_profile(p.mu, &image)?.forces),
            }))
        }
        None => None,
    };
    Ok(outcome(
        "welldef",
        failures == 0,
        json!({
            "orbits": results.len(),
            "non_singleton_orbits": nontrivial,
            "failures": failures,
            "failures_with_tied_image_maximum": tied_failures,
            "first_witness": witness,
        }),
    ))
}

fn cylinder(p: &SuiteParams) -> Result<SuiteOutcome> {
    if p.n < 2 {
        return Err(Error::TooFewVoters { min: 2, got: p.n });
    }
    let inner = p.n - 1;
    Distribution::check_epsilon(p.m, &p.epsilon)?;
    let y = LinearOrder::from_index(p.m, p.y_index)?;
    let rules = pareto_population(inner, p.m, p.seed, 200)?;
    let mut passed = true;
    let mut entries = Vec::new();
    for (name, nu) in [
        ("uniform", Distribution::uniform(inner, p.m)?),
        ("star", Distribution::star(inner, p.m, &p.epsilon, &y)?),
    ] {
        let mu = nu.lift(inner)?;
        let mass_one = mu.total_mass() == ratio::one();
        let full_support = mu.has_full_support();
        let invariant = mu.is_permutation_invariant();
        let bounds = rules
            .par_iter()
            .map(|g| cylinder_bounds(&nu, g))
            .collect::<Result<Vec<_>>>()?;
        let upper_failures = bounds.iter().filter(|b| !b.last_voter_within_bound).count();
        let lower_failures = bounds.iter().filter(|b| !b.lower_bounds_hold).count();
        let worst_last = bounds.iter().map(|b| &b.forces[p.n - 1]).max().cloned();
        passed &=
            mass_one && full_support && invariant && upper_failures == 0 && lower_failures == 0;
        entries.push(json!({
            "inner": name,
            "mass_is_one": mass_one,
            "full_support": full_support,
            "permutation_invariant": invariant,
            "rules": bounds.len(),
            "last_voter_bound": ratio::to_fraction_string(&bounds[0].last_voter_bound),
            "max_last_voter_force": worst_last.map(|r| ratio::to_fraction_string(&r)),
            "upper_bound_failures": upper_failures,
            "lower_bound_failures": lower_failures,
        }));
    }
    Ok(outcome(
        "cylinder",
        passed,
        json!({ "distributions": entries }),
    ))
}

fn quotient(p: &SuiteParams) -> Result<SuiteOutcome> {
    let results = (0..100u64)
        .into_par_iter()
        .map(|k| -> Result<(bool, usize, usize)> {
            let fx = random_orbit_fixture(p.seed.wrapping_mul(1000).wrapping_add(k), 12);
            let orbits_ok =
                verify_isometry_orbits(&fx.space, &fx.partition, &fx.generators).is_ok();
            let len = fx.space.len();
            let mut mismatches = 0;
            for x in 0..len {
                for y in 0..len {
                    let chain = quotient_distance_chain(&fx.space, &fx.partition, x, y)?;
                    let orbit = quotient_distance_orbit(&fx.space, &fx.partition, x, y)?;
                    mismatches += usize::from(chain != orbit);
                }
            }
            Ok((orbits_ok, mismatches, len * len))
        })
        .collect::<Result<Vec<_>>>()?;
    let bad_orbits = results.iter().filter(|r| !r.0).count();
    let mismatches: usize = results.iter().map(|r| r.1).sum();
    let pairs: usize = results.iter().map(|r| r.2).sum();
    Ok(outcome(
        "quotient",
        bad_orbits == 0 && mismatches == 0,
        json!({
            "fixtures": results.len(),
            "pairs": pairs,
            "invalid_orbit_partitions": bad_orbits,
            "mismatches": mismatches,
        }),
    ))
}

fn collapse(p: &SuiteParams) -> Result<SuiteOutcome> {
    let mut rules = Vec::new();
    if p.n >= 2 {
        rules.push(VotingRule::majority_with_canonical_tiebreak(p.n - 1, p.m)?.cylinder_extend()?);
    }
    rules.extend(pareto_population(p.n, p.m, p.seed, 1000)?);
    let report = check_collapse_conjecture(p.mu, &rules)?;
    let witnesses: Vec<_> = report.witnesses().take(10).collect();
    let fixed_non_dictatorial = report
        .witnesses()
        .filter(|e| e.input_is_phi_fixed && e.iterate_is_dictatorship.is_none())
        .count();
    Ok(SuiteOutcome {
        name: "collapse".to_string(),
        asserted: false,
        passed: report.failed == 0,
        details: json!({
            "rules_checked": report.rules_checked,
            "collapsed": report.passed,
            "not_collapsed": report.failed,
            "phi_fixed_non_dictatorial": fixed_non_dictatorial,
            "witnesses": witnesses,
        }),
    })
}
