use arrowlab::dynamics::{force, force_profile, orbit_class, phi};
use arrowlab::quotient::rule_distance;
use arrowlab::ratio::{self, rational};
use arrowlab::{Distribution, LinearOrder, ProfileSpace, VoterPermutation, VotingRule};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((1, 3)), Just((2, 3)), Just((3, 3)), Just((2, 4))]
}

fn permutation(n: usize) -> impl Strategy<Value = VoterPermutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|m| VoterPermutation::new(m).unwrap())
}

fn lifted_star(eps_num: i64) -> Distribution {
    Distribution::star(2, 3, &rational(eps_num, 12), &LinearOrder::identity(3))
        .unwrap()
        .lift(2)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_index_round_trips(m in 1usize..=6, seed in any::<usize>()) {
        let count = (1..=m).product::<usize>();
        let idx = seed % count;
        let order = LinearOrder::from_index(m, idx).unwrap();
        prop_assert_eq!(order.index(), idx);
        prop_assert_eq!(LinearOrder::new(order.ranking().to_vec()).unwrap(), order);
    }

    #[test]
    fn profile_index_round_trips((n, m) in shape(), seed in any::<usize>()) {
        let space = ProfileSpace::shared(n, m).unwrap();
        let k = seed % space.profile_count();
        let p = space.profile_from_index(k).unwrap();
        prop_assert_eq!(space.profile_index(&p).unwrap(), k);
    }

    #[test]
    fn voter_permutations_act_on_the_right(
        (pi, sigma) in (1usize..=4).prop_flat_map(|n| (permutation(n), permutation(n))),
        seed in any::<usize>(),
    ) {
        let n = pi.voters();
        let space = ProfileSpace::shared(n, 3).unwrap();
        let p = space.profile_from_index(seed % space.profile_count()).unwrap();
        let stepwise = p.apply_voter_permutation(&pi).unwrap().apply_voter_permutation(&sigma).unwrap();
        prop_assert_eq!(&stepwise, &p.apply_voter_permutation(&pi.compose(&sigma)).unwrap());
        let back = p.apply_voter_permutation(&pi).unwrap().apply_voter_permutation(&pi.inverse()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn relabeling_a_dictator_moves_the_dictator(pi in (1usize..=3).prop_flat_map(permutation), i in 0usize..3) {
        let n = pi.voters();
        let i = i % n;
        let d = VotingRule::dictator(n, 3, i).unwrap();
        let moved = d.compose_voter_permutation(&pi).unwrap();
        prop_assert_eq!(moved.is_dictatorship(), Some(pi.image(i)));
    }

    #[test]
    fn random_pareto_rules_are_pareto((n, m) in shape(), seed in any::<u64>()) {
        let f = VotingRule::random_pareto(n, m, seed).unwrap();
        prop_assert!(f.is_pareto());
        for i in 0..n {
            prop_assert!(f.compose_collapse(i).unwrap().is_pareto());
        }
    }

    #[test]
    fn phi_preserves_pareto(seed in any::<u64>(), star in any::<bool>()) {
        let mu = if star { lifted_star(6) } else { Distribution::uniform(3, 3).unwrap() };
        let f = VotingRule::random_pareto(3, 3, seed).unwrap();
        prop_assert!(phi(&mu, &f).unwrap().is_pareto());
    }

    #[test]
    fn distance_is_symmetric_and_bounded(a in any::<u64>(), b in any::<u64>()) {
        let mu = Distribution::uniform(2, 3).unwrap();
        let f = VotingRule::random_pareto(2, 3, a).unwrap();
        let g = VotingRule::random_pareto(2, 3, b).unwrap();
        let d = rule_distance(&mu, &f, &g).unwrap();
        prop_assert_eq!(&d, &rule_distance(&mu, &g, &f).unwrap());
        prop_assert!(ratio::is_probability(&d));
        prop_assert_eq!(d == ratio::zero(), f == g);
    }

    #[test]
    fn relabeling_is_an_isometry(a in any::<u64>(), b in any::<u64>(), pi in permutation(3), eps in 1i64..8) {
        let mu = lifted_star(eps);
        let f = VotingRule::random_pareto(3, 3, a).unwrap();
        let g = VotingRule::random_pareto(3, 3, b).unwrap();
        let before = rule_distance(&mu, &f, &g).unwrap();
        let after = rule_distance(
            &mu,
            &f.compose_voter_permutation(&pi).unwrap(),
            &g.compose_voter_permutation(&pi).unwrap(),
        ).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn relabeling_moves_force(a in any::<u64>(), pi in permutation(3), i in 0usize..3) {
        let mu = Distribution::uniform(3, 3).unwrap();
        let g = VotingRule::random_pareto(3, 3, a).unwrap();
        let f = g.compose_voter_permutation(&pi).unwrap();
        prop_assert_eq!(force(&mu, &g, i).unwrap(), force(&mu, &f, pi.image(i)).unwrap());
    }

    #[test]
    fn forces_are_probabilities((n, m) in shape(), seed in any::<u64>()) {
        let mu = Distribution::uniform(n, m).unwrap();
        let f = VotingRule::random_pareto(n, m, seed).unwrap();
        let fp = force_profile(&mu, &f).unwrap();
        prop_assert!(fp.forces.iter().all(ratio::is_probability));
        prop_assert!(!fp.most_forceful.is_empty() && !fp.least_forceful.is_empty());
    }

    #[test]
    fn lifts_are_invariant_distributions(eps in 1i64..8, y in 0usize..6, i in 0usize..3) {
        let nu = Distribution::star(2, 3, &rational(eps, 12), &LinearOrder::from_index(3, y).unwrap()).unwrap();
        let mu = nu.lift(i).unwrap();
        prop_assert_eq!(mu.total_mass(), ratio::one());
        prop_assert!(mu.has_full_support());
        prop_assert!(mu.is_permutation_invariant());
    }

    #[test]
    fn orbit_classes_contain_their_rule(seed in any::<u64>(), collapse in proptest::option::of(0usize..3)) {
        let mu = Distribution::uniform(3, 3).unwrap();
        let mut f = VotingRule::random_pareto(3, 3, seed).unwrap();
        if let Some(i) = collapse {
            f = f.compose_collapse(i).unwrap();
        }
        let class = orbit_class(&mu, &f).unwrap();
        prop_assert!(class.contains(&f));
        for g in class.members() {
            prop_assert_eq!(&orbit_class(&mu, g).unwrap(), &class);
        }
    }
}
