use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrcover::forest;
use rrcover::root_order::{explosion, explosion_escape, explosion_prefix, shift, DEFAULT_PERIOD_CAP};
use rrcover::rotor::DEFAULT_ENUMERATION_CAP;
use rrcover::sandpile::{determinant_order, stabilize, stabilize_random_order};
use rrcover::*;

/// Small strongly connected base graphs, `m <= 3`, entries `<= 2`.
fn small_graph() -> impl Strategy<Value = BaseGraph> {
    (1usize..=3)
        .prop_flat_map(|m| proptest::collection::vec(proptest::collection::vec(0u32..=2, m), m))
        .prop_filter_map("not strongly connected", |adj| BaseGraph::new(adj).ok())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn explosion_counts(a in proptest::collection::vec(0u64..6, 0..40)) {
        let x = explosion(&a);
        let total: u64 = a.iter().sum();
        prop_assert_eq!(x.len() as u64, a.len() as u64 + total);
        prop_assert_eq!(x.iter().filter(|&&b| b == 0).count(), a.len());
        prop_assert_eq!(x.iter().filter(|&&b| b == 1).count() as u64, total);
    }

    #[test]
    fn shift_prepends_zero(a in proptest::collection::vec(0u64..6, 0..40)) {
        let s = shift(&a);
        prop_assert_eq!(s.len(), a.len() + 1);
        prop_assert_eq!(s[0], 0);
        prop_assert_eq!(&s[1..], &a[..]);
    }

    #[test]
    fn forest_order_matches_determinant(g in small_graph(), h in 1u32..=3) {
        let table = forest_recursion(&g, h).unwrap();
        for i in g.labels() {
            let w = WiredTree::build(&g, i, h).unwrap();
            prop_assert_eq!(table.order(i, h), determinant_order(&w));
        }
    }

    #[test]
    fn gamma_decreases_and_stays_below_degree(g in small_graph()) {
        let table = forest_recursion(&g, 10).unwrap();
        for i in g.labels() {
            for h in 1..10 {
                prop_assert!(table.gamma(i, h + 1) < table.gamma(i, h));
                if h >= 2 {
                    prop_assert!(table.gamma(i, h) < num_rational::BigRational::from_integer(g.degree(i).into()));
                }
            }
        }
    }

    #[test]
    fn hitting_identity(g in small_graph()) {
        let roots = root_order_recursion(&g, 6).unwrap();
        let hit = hitting_probabilities(&g, 6).unwrap();
        for h in 1..=6 {
            for i in g.labels() {
                prop_assert_eq!(&hit.cell(i, h).down, &roots.cell(i, h).hitting_down());
            }
        }
        prop_assert!(root_order::alternative_system_holds(&g, &roots));
    }

    #[test]
    fn spectral_radius_relabeling(g in small_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = g.labels().collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = g.relabeled(&perm).unwrap();
        let a = g.spectral_radius(1e-12, 1_000_000).unwrap().rho;
        let b = r.spectral_radius(1e-12, 1_000_000).unwrap().rho;
        prop_assert!((a - b).abs() < 1e-10);
        let fa = fixed_point(&g, 1e-12, 10_000_000).unwrap();
        let fb = fixed_point(&r, 1e-12, 10_000_000).unwrap();
        for i in g.labels() {
            prop_assert!((fa.upsilon[i] - fb.upsilon[perm[i]]).abs() <= 2e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn explosion_prefix_matches_simulation(g in small_graph(), h in 1u32..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in g.labels() {
            let w = WiredTree::build(&g, i, h).unwrap();
            let c = RotorConfig::random(&w, &mut rng);
            let (simulated, _) = w.escape_sequence(&c, 64).unwrap();
            prop_assert_eq!(explosion_prefix(&w, &c, 64).unwrap(), simulated);
        }
    }

    #[test]
    fn simulated_period_matches_recursion(g in small_graph(), h in 1u32..=3) {
        let table = root_order_recursion(&g, h).unwrap();
        for i in g.labels() {
            let w = WiredTree::build(&g, i, h).unwrap();
            let sim = root_order_simulated(&w, DEFAULT_PERIOD_CAP).unwrap();
            prop_assert_eq!(num_bigint::BigUint::from(sim.down), table.down(i, h).clone());
            prop_assert_eq!(num_bigint::BigUint::from(sim.up), table.up(i, h).clone());
            let word = explosion_escape(&g, i, h, DEFAULT_PERIOD_CAP).unwrap();
            prop_assert_eq!(word.len() as u64, sim.period);
            prop_assert_eq!(word.ones() as u64, sim.up);
        }
    }

    #[test]
    fn stabilization_is_order_independent(g in small_graph(), h in 1u32..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in g.labels() {
            let w = WiredTree::build(&g, i, h).unwrap();
            let c = ChipConfig::random(&w, &mut rng, 3 * w.len() as u64);
            let reference = stabilize(&w, &c).unwrap();
            prop_assert!(reference.is_stable(&w));
            prop_assert_eq!(stabilize_random_order(&w, &c, &mut rng).unwrap(), reference);
        }
    }
}

#[test]
fn routing_operators_commute_on_small_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in [BaseGraph::fibonacci(), BaseGraph::biregular(2, 3).unwrap()] {
        for i in g.labels() {
            let w = WiredTree::build(&g, i, 3).unwrap();
            if w.config_space_size() > u128::from(DEFAULT_ENUMERATION_CAP) {
                continue;
            }
            let rec = w.enumerate_recurrent(DEFAULT_ENUMERATION_CAP, Execution::default()).unwrap();
            for _ in 0..50 {
                let c = &rec[rand::Rng::gen_range(&mut rng, 0..rec.len())];
                let x = rand::Rng::gen_range(&mut rng, 0..w.len());
                let y = rand::Rng::gen_range(&mut rng, 0..w.len());
                let xy = w.route_to_sink(&w.route_to_sink(c, y).unwrap().final_config, x).unwrap().final_config;
                let yx = w.route_to_sink(&w.route_to_sink(c, x).unwrap().final_config, y).unwrap().final_config;
                assert_eq!(xy, yx);
                assert!(w.is_recurrent(&xy));
            }
        }
    }
}

#[test]
fn log_gamma_gap_stays_bounded() {
    // y - x = ln gamma converges, so it stays within [ln upsilon, ln d].
    for g in [BaseGraph::fibonacci(), BaseGraph::biregular(2, 3).unwrap()] {
        let fp = fixed_point(&g, 1e-12, 1_000_000).unwrap();
        for row in forest::log_forest_table(&g, 30).unwrap() {
            for i in g.labels() {
                let gap = row[i].y - row[i].x;
                let slack = 1e-9 + row[i].x.abs() * 1e-14;
                assert!(gap >= fp.upsilon[i].ln() - slack);
                assert!(gap <= f64::from(g.degree(i)).ln() + slack);
            }
        }
    }
}
