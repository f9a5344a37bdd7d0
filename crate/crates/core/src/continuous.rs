//! Continuous valuations: each buyer's value is uniform on `[0, v̄]`, and
//! buyers split into a high-end class (`v ≥ v̄/2`) and a low-end class.
//! Interactions follow class membership the way they follow preference in the
//! binary model.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sim::{self, SimulationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousParams {
    v_bar: f64,
    l: f64,
}

impl ContinuousParams {
    pub fn new(v_bar: f64, l: f64) -> Result<Self> {
        if !(v_bar.is_finite() && v_bar > 0.0) {
            return Err(invalid("v_bar", format!("must be positive and finite, got {v_bar}")));
        }
        if !(l > 0.0 && l < 1.0) {
            return Err(invalid("l", format!("must lie in (0, 1), got {l}")));
        }
        Ok(ContinuousParams { v_bar, l })
    }

    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

/// Upper ends of case 1 and case 2 in `v̄`.
pub fn case_boundaries(l: f64) -> (f64, f64) {
    let one = 8.0 * (1.0 - l);
    (one, 64.0 * (1.0 - l) / (3.0 * 3f64.sqrt()))
}

/// Stage-II prices after one signal: first price, then the second price
/// indexed by the first arrival's decision `[passed, bought]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalPrices {
    pub p1: f64,
    pub p2: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPricing {
    pub on_signal_1: SignalPrices,
    pub on_signal_0: SignalPrices,
}

impl ContinuousPricing {
    pub fn on_signal(&self, x_hat: u8) -> &SignalPrices {
        if x_hat == 1 {
            &self.on_signal_1
        } else {
            &self.on_signal_0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousOutcome {
    pub case_id: u8,
    pub rho_star: f64,
    pub belief_s: f64,
    pub p1_on_signal1: f64,
    pub p1_on_signal0: f64,
    pub pricing: ContinuousPricing,
}

impl ContinuousOutcome {
    /// Second price after signal `x_hat` when the first arrival bought (`a1`).
    pub fn p2(&self, x_hat: u8, a1: bool) -> f64 {
        self.pricing.on_signal(x_hat).p2[usize::from(a1)]
    }
}

/// Bisection on `[lo, hi]`. Requires a sign change; stops at an exact zero,
/// at machine resolution, or after 200 halvings.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || hi - lo <= f64::EPSILON * mid.abs() {
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Joint weights of ordered class pairs `[first][second]` (index 1 = high
/// end) given signal `x_hat`, unnormalized, with `s` the probability that two
/// high-end buyers show `x̂ = 1`.
pub fn class_weights(x_hat: u8, s: f64) -> [[f64; 2]; 2] {
    if x_hat == 1 {
        [[0.25, 0.0], [0.0, 0.25 * s]]
    } else {
        [[0.0, 0.25], [0.25, 0.25 * (1.0 - s)]]
    }
}

/// Probability that a buyer of class `high` has value at least `p`.
fn buy_prob(p: f64, high: bool, v_bar: f64) -> f64 {
    let (lo, hi) = if high { (0.5 * v_bar, v_bar) } else { (0.0, 0.5 * v_bar) };
    ((hi - p.max(lo)) / (hi - lo)).clamp(0.0, 1.0)
}

/// Weights of the second arrival's class after the first arrival's decision.
fn after_first(w: &[[f64; 2]; 2], p1: f64, bought: bool, v_bar: f64) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (c1, row) in w.iter().enumerate() {
        let b = buy_prob(p1, c1 == 1, v_bar);
        let pr = if bought { b } else { 1.0 - b };
        for (c2, &x) in row.iter().enumerate() {
            out[c2] += x * pr;
        }
    }
    out
}

/// Revenue-maximizing second price when the buyer is high end with
/// probability `pi`.
pub fn second_price(pi: f64, v_bar: f64) -> f64 {
    if pi >= 0.5 {
        0.5 * v_bar
    } else {
        v_bar / (4.0 * (1.0 - pi))
    }
}

fn second_price_after(w: &[[f64; 2]; 2], p1: f64, bought: bool, v_bar: f64) -> f64 {
    let m = after_first(w, p1, bought, v_bar);
    let total = m[0] + m[1];
    if total <= 0.0 {
        return 0.5 * v_bar;
    }
    second_price(m[1] / total, v_bar)
}

/// Expected revenue under signal weights `w` (unnormalized) for given prices.
pub fn signal_revenue(w: &[[f64; 2]; 2], prices: &SignalPrices, v_bar: f64) -> f64 {
    let mut rev = 0.0;
    for (c1, row) in w.iter().enumerate() {
        let b = buy_prob(prices.p1, c1 == 1, v_bar);
        for (c2, &x) in row.iter().enumerate() {
            let second = |bought: bool| {
                let p2 = prices.p2[usize::from(bought)];
                p2 * buy_prob(p2, c2 == 1, v_bar)
            };
            rev += x * (b * (prices.p1 + second(true)) + (1.0 - b) * second(false));
        }
    }
    rev
}

fn prices_for(w: &[[f64; 2]; 2], p1: f64, v_bar: f64) -> SignalPrices {
    SignalPrices {
        p1,
        p2: [second_price_after(w, p1, false, v_bar), second_price_after(w, p1, true, v_bar)],
    }
}

/// Seller-optimal prices for belief parameter `s`.
pub fn continuous_optimal_pricing_given_s(s: f64, params: &ContinuousParams) -> Result<ContinuousPricing> {
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid("s", format!("must lie in [0, 1], got {s}")));
    }
    let v = params.v_bar;
    let p1 = if s >= 0.75 {
        0.5 * v
    } else if s >= 0.25 {
        (4.0 * s + 5.0) * v / 16.0
    } else {
        let g = |p: f64| 1.0 + s - 4.0 * p / v + s * s * v * v / (4.0 * (v - 2.0 * p).powi(2));
        bisect(g, 0.0, 0.5 * (1.0 - s) * v)?
    };
    let w1 = class_weights(1, s);
    let w0 = class_weights(0, s);
    Ok(ContinuousPricing {
        on_signal_1: prices_for(&w1, p1, v),
        on_signal_0: prices_for(&w0, 0.5 * v, v),
    })
}

/// Residual of the case-3 cubic in `u = 1 − ρ`.
pub fn case3_cubic(u: f64, params: &ContinuousParams) -> f64 {
    let v = params.v_bar;
    8.0 * v * u.powi(3) - 3.0 * v * u + 32.0 * params.l - 32.0
}

pub fn solve_continuous_pbe(params: &ContinuousParams) -> Result<ContinuousOutcome> {
    let (b1, b2) = case_boundaries(params.l);
    let v = params.v_bar;
    let (case_id, rho) = if v <= b1 {
        (1, 0.0)
    } else if v <= b2 {
        (2, 1.0 - 2.0 * ((1.0 - params.l) / v).cbrt())
    } else {
        let u = bisect(|u| case3_cubic(u, params), (3.0f64 / 8.0).sqrt(), 3f64.sqrt() / 2.0)?;
        (3, 1.0 - u)
    };
    outcome_at(case_id, rho, params)
}

fn outcome_at(case_id: u8, rho: f64, params: &ContinuousParams) -> Result<ContinuousOutcome> {
    let s = (1.0 - rho) * (1.0 - rho);
    let pricing = continuous_optimal_pricing_given_s(s, params)?;
    Ok(ContinuousOutcome {
        case_id,
        rho_star: rho,
        belief_s: s,
        p1_on_signal1: pricing.on_signal_1.p1,
        p1_on_signal0: pricing.on_signal_0.p1,
        pricing,
    })
}

/// Benchmark where buyers interact honestly and the seller prices on the
/// honest signal.
pub fn undisclosed_outcome(params: &ContinuousParams) -> Result<ContinuousOutcome> {
    outcome_at(1, 0.0, params)
}

/// Revenue of one uniform price per arrival.
pub fn no_learning_revenue(params: &ContinuousParams) -> f64 {
    0.5 * params.v_bar
}

/// Expected revenue when high-end pairs show `x̂ = 1` with probability `s`
/// and the seller posts `pricing`.
pub fn expected_revenue(s: f64, pricing: &ContinuousPricing, params: &ContinuousParams) -> f64 {
    [0u8, 1]
        .iter()
        .map(|&x| signal_revenue(&class_weights(x, s), pricing.on_signal(x), params.v_bar))
        .sum()
}

pub fn outcome_revenue(outcome: &ContinuousOutcome, params: &ContinuousParams) -> f64 {
    expected_revenue(outcome.belief_s, &outcome.pricing, params)
}

/// Mean of `max(v − p, 0)` for a high-end value.
fn high_surplus(p: f64, v_bar: f64) -> f64 {
    if p <= 0.5 * v_bar {
        0.75 * v_bar - p
    } else if p < v_bar {
        (v_bar - p).powi(2) / v_bar
    } else {
        0.0
    }
}

/// Expected purchase surplus of a high-end buyer paired with a high-end
/// buyer under the given signal prices, averaged over arrival order.
pub fn high_pair_surplus(prices: &SignalPrices, v_bar: f64) -> f64 {
    let first = high_surplus(prices.p1, v_bar);
    let b = buy_prob(prices.p1, true, v_bar);
    let second = b * high_surplus(prices.p2[1], v_bar) + (1.0 - b) * high_surplus(prices.p2[0], v_bar);
    0.5 * (first + second)
}

/// Gain of a high-end buyer from interacting rather than hiding, when the
/// partner hides with probability `rho`.
pub fn honesty_gain(rho: f64, pricing: &ContinuousPricing, params: &ContinuousParams) -> f64 {
    let s1 = high_pair_surplus(&pricing.on_signal_1, params.v_bar);
    let s0 = high_pair_surplus(&pricing.on_signal_0, params.v_bar);
    (1.0 - params.l) - (1.0 - rho) * (s0 - s1)
}

/// Best first price on an `n`-point grid over `[0, v̄]`, second prices chosen
/// from the same grid.
pub fn grid_best_prices(w: &[[f64; 2]; 2], v_bar: f64, n: usize) -> (SignalPrices, f64) {
    let grid: Vec<f64> = (0..n).map(|k| v_bar * k as f64 / (n - 1) as f64).collect();
    let best_p2 = |m: [f64; 2]| -> f64 {
        let rev = |p: f64| p * (m[0] * buy_prob(p, false, v_bar) + m[1] * buy_prob(p, true, v_bar));
        grid.iter().cloned().fold((0.0, f64::MIN), |acc, p| if rev(p) > acc.1 { (p, rev(p)) } else { acc }).0
    };
    let mut best = (SignalPrices { p1: 0.0, p2: [0.0; 2] }, f64::MIN);
    for &p1 in &grid {
        let prices = SignalPrices {
            p1,
            p2: [best_p2(after_first(w, p1, false, v_bar)), best_p2(after_first(w, p1, true, v_bar))],
        };
        let r = signal_revenue(w, &prices, v_bar);
        if r > best.1 {
            best = (prices, r);
        }
    }
    best
}

/// Manipulation probability at which a high-end buyer is indifferent when
/// the seller best-responds on an `n`-point price grid, scanned over `ρ` in
/// steps of `rho_step`. Returns 0 when honesty is weakly optimal at `ρ = 0`.
pub fn best_response_rho(params: &ContinuousParams, n: usize, rho_step: f64) -> f64 {
    let v = params.v_bar;
    let gain = |rho: f64| {
        let s = (1.0 - rho) * (1.0 - rho);
        let (on1, _) = grid_best_prices(&class_weights(1, s), v, n);
        let (on0, _) = grid_best_prices(&class_weights(0, s), v, n);
        honesty_gain(rho, &ContinuousPricing { on_signal_1: on1, on_signal_0: on0 }, params)
    };
    if gain(0.0) >= 0.0 {
        return 0.0;
    }
    let steps = (1.0 / rho_step).round() as usize;
    let mut prev = (0.0, gain(0.0));
    for k in 1..=steps {
        let rho = k as f64 * rho_step;
        let g = gain(rho);
        if g >= 0.0 {
            let t = prev.1 / (prev.1 - g);
            return prev.0 + t * (rho - prev.0);
        }
        prev = (rho, g);
    }
    1.0
}

/// Simulates pairs under `outcome`. The report's `low_payoff` averages the
/// payoffs of low-end buyers.
pub fn continuous_monte_carlo(
    outcome: &ContinuousOutcome,
    params: &ContinuousParams,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let (v_bar, l, rho) = (params.v_bar, params.l, outcome.rho_star);
    let pricing = outcome.pricing;
    let acc = sim::run::<3, _>(n, seed, |rng, acc| {
        let vi = rng.gen::<f64>() * v_bar;
        let vj = rng.gen::<f64>() * v_bar;
        let (hi, hj) = (vi >= 0.5 * v_bar, vj >= 0.5 * v_bar);
        let (x, y) = match (hi, hj) {
            (true, true) => (u8::from(rng.gen::<f64>() >= rho), u8::from(rng.gen::<f64>() >= rho)),
            (false, false) => (1, 1),
            _ => (0, 0),
        };
        let prices = pricing.on_signal(x.min(y));
        let i_first = rng.gen::<bool>();
        let (v1, v2) = if i_first { (vi, vj) } else { (vj, vi) };
        let a1 = v1 >= prices.p1;
        let p2 = prices.p2[usize::from(a1)];
        let a2 = v2 >= p2;
        let rev = if a1 { prices.p1 } else { 0.0 } + if a2 { p2 } else { 0.0 };
        let (s1, s2) = (if a1 { v1 - prices.p1 } else { 0.0 }, if a2 { v2 - p2 } else { 0.0 });
        let (si, sj) = if i_first { (s1, s2) } else { (s2, s1) };
        let social = |own: u8, other: u8| -> f64 {
            if hi != hj {
                return 0.0;
            }
            match (own, other) {
                (1, 1) => 1.0,
                (1, 0) => 1.0 - l,
                (0, 1) => l,
                _ => 0.0,
            }
        };
        let (ui, uj) = (si + social(x, y), sj + social(y, x));
        acc[0].push(rev);
        acc[1].push(0.5 * (ui + uj));
        if !hi {
            acc[2].push(ui);
        }
        if !hj {
            acc[2].push(uj);
        }
    });
    Ok(SimulationReport {
        samples: n,
        seed,
        revenue: acc[0].estimate(),
        buyer_payoff: acc[1].estimate(),
        low_payoff: Some(acc[2].estimate()),
    })
}
