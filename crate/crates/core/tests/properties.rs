use proptest::prelude::*;

use sparsegame::certificate::{check_certificate, make_certificate, StrategyCertificate};
use sparsegame::solver::{solve_exact_small, solve_mwu};
use sparsegame::sparsify::{
    dovetail_bound, dovetail_exploitability, dovetail_set, greedy_cover, greedy_k_uniform,
    k_uniform_bound, k_uniform_epsilon, DovetailMethod, DovetailSet,
};
use sparsegame::{
    best_response, expected_payoff, GameMatrix, MixedStrategy, Player, UniformMultiset,
};

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = GameMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-5i32..=5, r * c).prop_map(move |xs| {
            GameMatrix::new(r, c, xs.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_map(|mut w| {
        if w.iter().all(|&x| x == 0.0) {
            w[0] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    })
}

fn game_and_strategies() -> impl Strategy<Value = (GameMatrix, Vec<f64>, Vec<f64>)> {
    matrix(6, 6).prop_flat_map(|g| {
        let (r, c) = (g.rows(), g.cols());
        (Just(g), weights(r), weights(c))
    })
}

fn game_and_multiset() -> impl Strategy<Value = (GameMatrix, Vec<usize>)> {
    matrix(6, 6).prop_flat_map(|g| {
        let r = g.rows();
        (Just(g), prop::collection::vec(0..r, 1..12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expected_payoff_lies_in_range((g, p, q) in game_and_strategies()) {
        let p = MixedStrategy::normalized(Player::Min, p).unwrap();
        let q = MixedStrategy::normalized(Player::Max, q).unwrap();
        let x = expected_payoff(&g, &p, &q).unwrap();
        prop_assert!(g.range_lo() - 1e-9 <= x && x <= g.range_hi() + 1e-9);
    }

    #[test]
    fn best_response_dominates_every_pure_reply((g, p, q) in game_and_strategies()) {
        let p = MixedStrategy::normalized(Player::Min, p).unwrap();
        let q = MixedStrategy::normalized(Player::Max, q).unwrap();
        let br = best_response(&g, &p).unwrap();
        for j in 0..g.cols() {
            let col = MixedStrategy::point(Player::Max, g.cols(), j).unwrap();
            prop_assert!(expected_payoff(&g, &p, &col).unwrap() <= br.value + 1e-9);
        }
        prop_assert!(expected_payoff(&g, &p, &q).unwrap() <= br.value + 1e-9);
        let br = best_response(&g, &q).unwrap();
        for i in 0..g.rows() {
            let row = MixedStrategy::point(Player::Min, g.rows(), i).unwrap();
            prop_assert!(expected_payoff(&g, &row, &q).unwrap() >= br.value - 1e-9);
        }
    }

    #[test]
    fn multiset_and_its_mixed_strategy_agree((g, items) in game_and_multiset()) {
        let m = UniformMultiset::new(Player::Min, items).unwrap();
        let mixed = m.to_strategy(g.rows()).unwrap();
        prop_assert_eq!(best_response(&g, &m).unwrap(), best_response(&g, &mixed).unwrap());
    }

    #[test]
    fn exact_value_is_scale_covariant(g in matrix(5, 5), a in 0.25f64..4.0, b in -3.0f64..3.0) {
        let v = solve_exact_small(&g).unwrap().value_hi;
        let w = solve_exact_small(&g.affine(a, b).unwrap()).unwrap().value_hi;
        prop_assert!((w - (a * v + b)).abs() <= 1e-9 * (1.0 + a * v.abs() + b.abs()));
    }

    #[test]
    fn exact_solution_is_an_equilibrium(g in matrix(6, 6)) {
        let r = solve_exact_small(&g).unwrap();
        prop_assert!(r.value_hi - r.value_lo <= 1e-9);
        prop_assert!(best_response(&g, &r.p).unwrap().value <= r.value_hi + 1e-9);
        prop_assert!(best_response(&g, &r.q).unwrap().value >= r.value_lo - 1e-9);
    }

    #[test]
    fn mwu_bracket_sandwiches_the_value(g in matrix(5, 5)) {
        let v = solve_exact_small(&g).unwrap().value_hi;
        let r = solve_mwu(&g, 0.05, 200_000).unwrap();
        prop_assert!(r.value_lo <= v + 1e-9 && v <= r.value_hi + 1e-9);
        prop_assert!(best_response(&g, &r.p).unwrap().value <= r.value_hi + 1e-9);
        prop_assert!(best_response(&g, &r.q).unwrap().value >= r.value_lo - 1e-9);
    }

    #[test]
    fn bounds_are_monotone(c in 1usize..5000, e1 in 0.01f64..2.0, e2 in 0.01f64..2.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(k_uniform_bound(c, hi).unwrap() <= k_uniform_bound(c, lo).unwrap());
        prop_assert!(dovetail_bound(c, hi).unwrap() <= dovetail_bound(c, lo).unwrap());
        prop_assert!(k_uniform_bound(c, e1).unwrap() <= k_uniform_bound(c + 1, e1).unwrap());
        prop_assert!(dovetail_bound(c, e1).unwrap() <= dovetail_bound(c + 1, e1).unwrap());
    }

    #[test]
    fn greedy_meets_its_bound(g in matrix(6, 6), k in 1usize..40) {
        let v = solve_exact_small(&g).unwrap().value_hi;
        let span = g.range_hi() - g.range_lo();
        let (m, x) = greedy_k_uniform(&g, k, Player::Min).unwrap();
        prop_assert_eq!(m.k(), k);
        prop_assert!(x <= v + k_uniform_epsilon(g.cols(), k) * span + 1e-9);
        let (m, x) = greedy_k_uniform(&g, k, Player::Max).unwrap();
        prop_assert_eq!(m.k(), k);
        prop_assert!(x >= v - k_uniform_epsilon(g.rows(), k) * span - 1e-9);
    }

    #[test]
    fn max_side_matches_min_side_on_mirror(g in matrix(6, 6), k in 1usize..20, eps in 0.1f64..1.0) {
        let m = g.mirrored();
        let (a, x) = greedy_k_uniform(&g, k, Player::Max).unwrap();
        let (b, y) = greedy_k_uniform(&m, k, Player::Min).unwrap();
        prop_assert_eq!(a.items(), b.items());
        prop_assert!((x + y).abs() <= 1e-12);

        let method = DovetailMethod::Sampled { seed: 3, max_attempts: 5 };
        let da = dovetail_set(&g, eps, Player::Max, method).unwrap();
        let db = dovetail_set(&m, eps, Player::Min, method).unwrap();
        prop_assert_eq!(da.set.items(), db.set.items());
        prop_assert!((da.achieved + db.achieved).abs() <= 1e-12);
    }

    #[test]
    fn verified_dovetail_sets_meet_their_threshold(g in matrix(6, 6), eps in 0.05f64..1.5, seed in 0u64..100) {
        for player in [Player::Min, Player::Max] {
            for method in [DovetailMethod::Sampled { seed, max_attempts: 5 }, DovetailMethod::GreedyCover] {
                let out = dovetail_set(&g, eps, player, method).unwrap();
                let achieved = dovetail_exploitability(&g, &out.set).unwrap();
                prop_assert_eq!(achieved, out.achieved);
                if out.verified {
                    match player {
                        Player::Min => prop_assert!(achieved <= out.threshold),
                        Player::Max => prop_assert!(achieved >= out.threshold),
                    }
                }
            }
        }
    }

    #[test]
    fn greedy_cover_covers(g in matrix(6, 6)) {
        let v = solve_exact_small(&g).unwrap().value_hi;
        let tau = v + 1e-9;
        let set: DovetailSet = greedy_cover(&g, Player::Min, tau).unwrap();
        for j in 0..g.cols() {
            prop_assert!(set.items().iter().any(|&i| g.get(i, j) <= tau));
        }
    }

    #[test]
    fn certificates_round_trip_and_are_sound(g in matrix(5, 5), eps in 0.05f64..0.6, seed in 0u64..1000) {
        let cert = make_certificate(&g, eps, seed).unwrap();
        prop_assert!(check_certificate(&g, &cert).unwrap().accepted);
        let back = StrategyCertificate::from_json_str(&cert.to_json_string()).unwrap();
        prop_assert_eq!(&back, &cert);
        let v = solve_exact_small(&g).unwrap().value_hi;
        let span = g.range_hi() - g.range_lo();
        prop_assert!((v - cert.claimed_value).abs() <= eps * span + 1e-12);
        if span > 0.0 {
            for sign in [-1.0, 1.0] {
                let shifted = StrategyCertificate {
                    claimed_value: cert.claimed_value + sign * 1.01 * eps * span,
                    ..cert.clone()
                };
                prop_assert!(!check_certificate(&g, &shifted).unwrap().accepted);
            }
        }
    }

    #[test]
    fn arbitrary_accepted_certificates_are_sound(
        (g, items) in game_and_multiset(),
        cols in prop::collection::vec(0usize..6, 1..8),
        claimed in -5.0f64..5.0,
        eps in 0.05f64..1.0,
    ) {
        let cols: Vec<usize> = cols.into_iter().map(|j| j % g.cols()).collect();
        let bounds = (g.range_lo(), g.range_hi());
        let cert = StrategyCertificate::new(claimed, eps, items, cols, bounds).unwrap();
        if check_certificate(&g, &cert).unwrap().accepted {
            let v = solve_exact_small(&g).unwrap().value_hi;
            prop_assert!((v - claimed).abs() <= eps * (bounds.1 - bounds.0) + 1e-12);
        }
    }
}
