use approx::assert_abs_diff_eq;

use strategic_pricing::continuous::{best_response_rho, solve_continuous_pbe, ContinuousParams};
use strategic_pricing::oracle::{brute_force_pbe, structure_violations, verify_binary_pricing, GridSpec};
use strategic_pricing::pbe::{posterior_beliefs, seller_mixing};
use strategic_pricing::policy::Plan;
use strategic_pricing::welfare::{average_buyer_payoff, known_low_buyer_gain, loss_from_awareness, strategic_revenue, PayoffMechanism};
use strategic_pricing::{solve_pbe, EquilibriumOutcome, MarketParams, Region};

fn mp(v_h: f64, v_l: f64, l: f64) -> MarketParams {
    MarketParams::new(v_h, v_l, l).unwrap()
}

const WORKED: [(f64, f64, f64, Region); 5] = [
    (4.0, 3.0, 0.5, Region::I),
    (2.0, 1.2, 0.5, Region::II),
    (2.6, 1.4, 0.5, Region::III),
    (3.0, 1.5, 0.5, Region::IV),
    (4.0, 1.0, 0.5, Region::V),
];

/// Prices of a plan written out by hand: (first, second after purchase, second after a pass).
fn prices(plan: Plan, v_h: f64, v_l: f64) -> (f64, f64, f64) {
    match plan {
        Plan::UniformLow => (v_l, v_l, v_l),
        Plan::UniformHigh => (v_h, v_h, v_h),
        Plan::HighThenMatch => (v_h, v_h, v_l),
        Plan::HighThenFlip => (v_h, v_l, v_h),
    }
}

/// Revenue and average buyer payoff by enumerating types, choices, plan draws and arrival orders.
fn enumerate(o: &EquilibriumOutcome, v_h: f64, v_l: f64, l: f64) -> (f64, f64) {
    let rho = o.rho_star;
    let social = |x: u8, y: u8| match (x, y) {
        (1, 1) => 1.0,
        (1, 0) => 1.0 - l,
        (0, 1) => l,
        _ => 0.0,
    };
    let (mut revenue, mut payoff) = (0.0, 0.0);
    for hi in [true, false] {
        for hj in [true, false] {
            let choice_dist: Vec<(u8, u8, f64)> = match (hi, hj) {
                (true, true) => vec![(1, 1, (1.0 - rho) * (1.0 - rho)), (1, 0, (1.0 - rho) * rho), (0, 1, rho * (1.0 - rho)), (0, 0, rho * rho)],
                (false, false) => vec![(1, 1, 1.0)],
                _ => vec![(0, 0, 1.0)],
            };
            for (x, y, wx) in choice_dist {
                let (ui, uj) = if hi == hj { (social(x, y), social(y, x)) } else { (0.0, 0.0) };
                for plan in Plan::ALL {
                    let wp = o.policy.on_signal(x.min(y)).weight(plan);
                    if wp == 0.0 {
                        continue;
                    }
                    let (p1, p2_buy, p2_pass) = prices(plan, v_h, v_l);
                    for (first, second) in [(hi, hj), (hj, hi)] {
                        let v1 = if first { v_h } else { v_l };
                        let v2 = if second { v_h } else { v_l };
                        let b1 = v1 >= p1;
                        let p2 = if b1 { p2_buy } else { p2_pass };
                        let b2 = v2 >= p2;
                        let w = 0.25 * wx * wp * 0.5;
                        revenue += w * (if b1 { p1 } else { 0.0 } + if b2 { p2 } else { 0.0 });
                        let surplus = if b1 { v1 - p1 } else { 0.0 } + if b2 { v2 - p2 } else { 0.0 };
                        payoff += w * 0.5 * (surplus + ui + uj);
                    }
                }
            }
        }
    }
    (revenue, payoff)
}

#[test]
fn closed_form_welfare_matches_enumeration() {
    for (v_h, v_l, l, region) in WORKED.iter().copied().chain([(3.8, 1.9, 0.5, Region::IV), (1.0, 0.5, 0.8, Region::III)]) {
        let p = mp(v_h, v_l, l);
        let o = solve_pbe(&p).unwrap();
        assert_eq!(o.region, region);
        let (rev, pay) = enumerate(&o, v_h, v_l, l);
        assert_abs_diff_eq!(strategic_revenue(&p).unwrap(), rev, epsilon = 1e-12);
        assert_abs_diff_eq!(average_buyer_payoff(&p, PayoffMechanism::StrategicLearning).unwrap(), pay, epsilon = 1e-12);
    }
}

#[test]
fn frozen_welfare_values() {
    assert_abs_diff_eq!(strategic_revenue(&mp(4.0, 3.0, 0.5)).unwrap(), 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(strategic_revenue(&mp(3.0, 1.5, 0.5)).unwrap(), 3.5625, epsilon = 1e-12);
    assert_abs_diff_eq!(strategic_revenue(&mp(4.0, 1.0, 0.5)).unwrap(), 4.25, epsilon = 1e-12);
    let st = PayoffMechanism::StrategicLearning;
    assert_abs_diff_eq!(average_buyer_payoff(&mp(2.6, 1.4, 0.5), st).unwrap(), 0.504167, epsilon = 1e-6);
    assert_abs_diff_eq!(average_buyer_payoff(&mp(4.0, 3.0, 0.5), st).unwrap(), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(average_buyer_payoff(&mp(1.0, 0.5, 0.8), st).unwrap(), 0.4725, epsilon = 1e-4);
    assert_abs_diff_eq!(average_buyer_payoff(&mp(4.0, 2.0, 0.5), PayoffMechanism::UndisclosedLearning).unwrap(), 0.5);
    assert_eq!(loss_from_awareness(&mp(2.0, 1.2, 0.5)).unwrap(), 0.0);
    let s3 = 3f64.sqrt();
    assert_abs_diff_eq!(loss_from_awareness(&mp(5.0 / s3, 2.0 / s3, 0.5)).unwrap(), 1.0 / 12.0, epsilon = 1e-12);
    assert_abs_diff_eq!(known_low_buyer_gain(&mp(4.0, 3.0, 0.5)).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(known_low_buyer_gain(&mp(2.0, 1.2, 0.5)).unwrap(), 1.2 / 5.2, epsilon = 1e-12);
}

#[test]
fn worked_examples_and_mixing() {
    let o = solve_pbe(&mp(3.8, 1.9, 0.5)).unwrap();
    assert_eq!(o.region, Region::IV);
    assert_abs_diff_eq!(o.rho_star, 1.0 - 0.5f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(o.beta_star.unwrap(), 0.12784, epsilon = 1e-5);
    assert_abs_diff_eq!(seller_mixing(Region::V, &mp(4.0, 1.0, 0.5)).unwrap().unwrap(), 1.0 - 1.0 / 6f64.sqrt(), epsilon = 1e-12);
    let (a, b) = posterior_beliefs(0.5);
    assert_abs_diff_eq!(a, 0.2, epsilon = 1e-12);
    assert_abs_diff_eq!(b, 3.0 / 11.0, epsilon = 1e-12);
}

#[test]
fn brute_force_recovers_worked_examples() {
    for (v_h, v_l, l, region) in WORKED {
        let p = mp(v_h, v_l, l);
        let o = solve_pbe(&p).unwrap();
        assert_eq!(o.region, region);
        let grid = GridSpec::default_for(&p);
        let found = brute_force_pbe(&p, &grid).unwrap();
        assert!(!found.is_empty(), "{region}: no equilibrium found");
        let eps = grid.epsilon(&p);
        assert!(found.iter().all(|e| e.epsilon <= eps));
        let nearest = found.iter().map(|e| (e.rho - o.rho_star).abs()).fold(f64::INFINITY, f64::min);
        assert!(nearest <= grid.rho_step, "{region}: nearest rho {nearest}");
    }
}

#[test]
fn equilibrium_structure_and_binary_prices() {
    for (v_h, v_l, l, _) in WORKED {
        let p = mp(v_h, v_l, l);
        let coarse = GridSpec { rho_step: 0.01, mix_step: 0.01, ..GridSpec::default_for(&p) };
        assert_eq!(structure_violations(&p, &coarse, 5).unwrap(), 0);
        let grid: Vec<f64> = (0..=40).map(|k| v_h * 1.2 * k as f64 / 40.0).collect();
        assert!(verify_binary_pricing(&p, &grid).unwrap());
    }
}

#[test]
fn brute_force_rejects_bad_grids() {
    let p = mp(3.0, 1.5, 0.5);
    let empty = GridSpec { price_grid: vec![], ..GridSpec::default_for(&p) };
    assert!(brute_force_pbe(&p, &empty).is_err());
    let zero = GridSpec { rho_step: 0.0, ..GridSpec::default_for(&p) };
    assert!(brute_force_pbe(&p, &zero).is_err());
}

#[test]
fn continuous_best_response_matches_closed_form() {
    for v in [5.0, 6.0, 8.0, 12.0] {
        let p = ContinuousParams::new(v, 0.5).unwrap();
        let o = solve_continuous_pbe(&p).unwrap();
        let oracle = best_response_rho(&p, 801, 0.005);
        assert!((oracle - o.rho_star).abs() < 2e-3, "v̄ = {v}: {oracle} vs {}", o.rho_star);
    }
    let p = ContinuousParams::new(3.0, 0.5).unwrap();
    assert_eq!(best_response_rho(&p, 401, 0.01), 0.0);
}
