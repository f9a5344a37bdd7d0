use proptest::prelude::*;

use strategic_pricing::benchmarks::{no_learning_revenue, undisclosed_revenue};
use strategic_pricing::continuous::{case3_cubic, case_boundaries, solve_continuous_pbe, ContinuousParams};
use strategic_pricing::io::sig9;
use strategic_pricing::network::{apply_manipulation, bundled_fixture, run_mechanism, sample_preferences, ArrivalSequence, MechanismKind};
use strategic_pricing::pbe::{classify_region, indifference_gaps, posterior_beliefs_with_prior};
use strategic_pricing::welfare::strategic_revenue;
use strategic_pricing::{solve_pbe, solve_pbe_nonuniform, MarketParams, Region};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn market() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..10.0, 0.01f64..0.99, 0.01f64..0.99).prop_map(|(v_h, ratio, l)| (v_h, ratio * v_h, l))
}

fn exactly_one(flags: [bool; 5]) -> bool {
    flags.iter().filter(|&&f| f).count() == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn region_predicates_partition_the_domain((v_h, v_l, l) in market()) {
        let d = v_h - v_l;
        let k = (1.0 - l) * (1.0 - l);
        let one = v_l / v_h >= 2.0 / 3.0;
        let two = !one && d <= 2.0 * (1.0 - l);
        let three = !one && !two && d * v_l < 8.0 * k && d * (v_h - 2.0 * v_l) < 4.0 * k;
        let four = !one && !two && !three && v_l >= 2.0 * v_h / 5.0 && d * v_l >= 8.0 * k;
        let five = !one && !two && !three && !four;
        prop_assert!(exactly_one([one, two, three, four, five]));
        let expected = [Region::I, Region::II, Region::III, Region::IV, Region::V]
            [[one, two, three, four, five].iter().position(|&f| f).unwrap()];
        prop_assert_eq!(classify_region(v_h, v_l, l).unwrap(), expected);
    }

    #[test]
    fn posteriors_match_bayes_enumeration(rho in 0.0f64..=1.0, alpha in 0.01f64..=0.5) {
        let (on_1, on_0) = posterior_beliefs_with_prior(rho, alpha);
        let s = (1.0 - rho) * (1.0 - rho);
        let mut joint = [[0.0f64; 2]; 2];
        for (hi, hj) in [(true, true), (true, false), (false, true), (false, false)] {
            let w = if hi { alpha } else { 1.0 - alpha } * if hj { alpha } else { 1.0 - alpha };
            let p_one = match (hi, hj) {
                (true, true) => s,
                (false, false) => 1.0,
                _ => 0.0,
            };
            let hh = usize::from(hi && hj);
            joint[1][hh] += w * p_one;
            joint[0][hh] += w * (1.0 - p_one);
        }
        let bayes_1 = joint[1][1] / (joint[1][1] + joint[1][0]);
        let bayes_0 = joint[0][1] / (joint[0][1] + joint[0][0]);
        prop_assert!((0.0..=1.0).contains(&on_1) && (0.0..=1.0).contains(&on_0));
        prop_assert!((on_1 - bayes_1).abs() < 1e-12);
        prop_assert!((on_0 - bayes_0).abs() < 1e-12);
    }

    #[test]
    fn revenue_sandwich((v_h, v_l, l) in market()) {
        let p = MarketParams::new(v_h, v_l, l).unwrap();
        let st = strategic_revenue(&p).unwrap();
        let tol = 1e-12 * v_h;
        prop_assert!(no_learning_revenue(&p, 2) <= st + tol);
        prop_assert!(st <= undisclosed_revenue(&p, 2) + tol);
    }

    #[test]
    fn indifference_holds_in_mixed_regions((v_h, v_l, l) in market()) {
        let p = MarketParams::new(v_h, v_l, l).unwrap();
        let o = solve_pbe(&p).unwrap();
        prop_assume!(matches!(o.region, Region::III | Region::IV | Region::V));
        prop_assert!(o.rho_star > 0.0 && o.rho_star < 1.0);
        let (buyer, seller) = indifference_gaps(&o, &p);
        prop_assert!(buyer < 1e-9 && seller < 1e-9);
    }

    #[test]
    fn prior_limit_is_continuous((v_h, v_l, l) in market()) {
        let p = MarketParams::new(v_h, v_l, l).unwrap();
        let base = solve_pbe(&p).unwrap();
        let near = solve_pbe_nonuniform(&p.with_alpha(0.5 - 1e-6).unwrap()).unwrap();
        prop_assume!(near.region == base.region);
        prop_assert!((near.rho_star - base.rho_star).abs() < 1e-4);
        if let (Some(a), Some(b)) = (near.beta_star, base.beta_star) {
            prop_assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn sig9_round_trips(x in prop::num::f64::NORMAL) {
        let back: f64 = sig9(x).parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-9);
    }

    #[test]
    fn continuous_case_boundary_is_continuous(l in 0.01f64..0.99) {
        let (b1, _) = case_boundaries(l);
        let at = solve_continuous_pbe(&ContinuousParams::new(b1, l).unwrap()).unwrap();
        let past = solve_continuous_pbe(&ContinuousParams::new(b1 * (1.0 + 1e-9), l).unwrap()).unwrap();
        prop_assert_eq!(at.case_id, 1);
        prop_assert_eq!(past.case_id, 2);
        prop_assert!(past.rho_star.abs() < 1e-6);
    }

    #[test]
    fn case3_cubic_changes_sign(l in 0.01f64..0.99, stretch in 1.0001f64..50.0) {
        let (_, b2) = case_boundaries(l);
        let p = ContinuousParams::new(b2 * stretch, l).unwrap();
        prop_assert!(case3_cubic((3.0f64 / 8.0).sqrt(), &p) < 0.0);
        prop_assert!(case3_cubic(3f64.sqrt() / 2.0, &p) > 0.0);
        let o = solve_continuous_pbe(&p).unwrap();
        prop_assert_eq!(o.case_id, 3);
        prop_assert!(case3_cubic(1.0 - o.rho_star, &p).abs() < 1e-9 * p.v_bar());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn manipulation_only_touches_high_pairs(seed in any::<u64>(), v_h in 2.1f64..8.0) {
        let g = sample_preferences(&bundled_fixture(), 0.5, seed).unwrap();
        let p = MarketParams::new(v_h, 0.5 * v_h, 0.5).unwrap();
        let m = apply_manipulation(&g, &p, seed ^ 0x5eed).unwrap();
        m.check_invariants().unwrap();
        for (e, &(u, v)) in m.edges().iter().enumerate() {
            let (pu, pv) = (m.preference(u), m.preference(v));
            if !(pu.is_high() && pv.is_high()) {
                prop_assert_eq!(m.choices(e), g.choices(e));
                prop_assert_eq!(m.realized(e), u8::from(pu == pv));
            }
        }
    }

    #[test]
    fn mechanism_revenue_is_bounded(seed in any::<u64>(), v_h in 0.5f64..6.0) {
        let g = sample_preferences(&bundled_fixture(), 0.5, seed).unwrap();
        let p = MarketParams::new(v_h, 0.5 * v_h, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arrivals = ArrivalSequence::shuffled(&g, &mut rng);
        let full: f64 = (0..g.n_nodes()).map(|u| p.value(g.preference(u))).sum();
        let n = run_mechanism(&g, MechanismKind::Nlp, &arrivals, &p, &mut rng).unwrap().revenue;
        let u = run_mechanism(&g, MechanismKind::Ulp, &arrivals, &p, &mut rng).unwrap().revenue;
        let m = apply_manipulation(&g, &p, seed).unwrap();
        let s = run_mechanism(&m, MechanismKind::Slp, &arrivals, &p, &mut rng).unwrap().revenue;
        for r in [n, u, s] {
            prop_assert!(r >= 0.0 && r <= full + 1e-9);
        }
        let highs = (0..g.n_nodes()).filter(|&k| g.preference(k).is_high()).count() as f64;
        prop_assert!((n - highs * v_h).abs() < 1e-9);
        prop_assert!(u >= n - 1e-9);
    }
}
