//! Independent verification layer: exhaustive ε-equilibrium search over
//! discretized strategies, Monte-Carlo play of an equilibrium, and direct
//! checks that optimal prices are binary and that interaction frequencies
//! polarize.
//!
//! Nothing here calls the closed-form solver. Beliefs come from enumerating
//! preference pairs, revenues from playing prices against buyers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{common_frequency, purchase_decision, social_utility, MarketParams, Preference};
use crate::pbe::EquilibriumOutcome;
use crate::policy::{Plan, PlanMix, PricingPolicy};
use crate::sim::{self, SimulationReport};

/// Discretization of the strategy spaces searched by [`brute_force_pbe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rho_step: f64,
    pub mix_step: f64,
    pub price_grid: Vec<f64>,
}

impl GridSpec {
    pub fn default_for(params: &MarketParams) -> Self {
        let (h, l) = (params.v_h(), params.v_l());
        GridSpec {
            rho_step: 1e-3,
            mix_step: 1e-3,
            price_grid: vec![0.0, l / 2.0, l, (l + h) / 2.0, h, h * (1.0 + 1e-3)],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.price_grid.is_empty() {
            return Err(Error::InvalidInput("price grid is empty".into()));
        }
        if !(self.rho_step > 0.0 && self.rho_step <= 1.0 && self.mix_step > 0.0 && self.mix_step <= 1.0) {
            return Err(Error::InvalidInput("grid steps must lie in (0, 1]".into()));
        }
        if self.price_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("price grid must be sorted ascending".into()));
        }
        Ok(())
    }

    /// Acceptance slack: a Lipschitz bound on payoffs times the coarsest step.
    pub fn epsilon(&self, params: &MarketParams) -> f64 {
        let lipschitz = 3.0 * params.v_h() + 2.0;
        (lipschitz * self.rho_step.max(self.mix_step)).max(1e-6 * params.v_h())
    }
}

/// A strategy profile that survived the ε-equilibrium filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsEquilibrium {
    pub rho: f64,
    pub policy: PricingPolicy,
    /// Largest unilateral gain found for any player.
    pub epsilon: f64,
}

/// Buyer behavior off the High–High pair, for structure checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    /// Probability a High buyer facing a High buyer sets x = 0.
    pub rho: f64,
    /// Probability a Low buyer facing a Low buyer sets x = 0.
    pub tau_low: f64,
    /// Probability the High buyer of a mixed pair sets x = 1.
    pub mu_high: f64,
    /// Probability the Low buyer of a mixed pair sets x = 1.
    pub mu_low: f64,
}

impl Profile {
    fn honest(rho: f64) -> Self {
        Profile { rho, tau_low: 0.0, mu_high: 0.0, mu_low: 0.0 }
    }
}

const PAIRS: [(bool, bool); 4] = [(true, true), (true, false), (false, true), (false, false)];

fn value(params: &MarketParams, high: bool) -> f64 {
    if high {
        params.v_h()
    } else {
        params.v_l()
    }
}

fn pref(high: bool) -> Preference {
    if high {
        Preference::High
    } else {
        Preference::Low
    }
}

/// Joint probability of each ordered pair `[HH, HL, LH, LL]` and signal.
fn joint(params: &MarketParams, prof: &Profile) -> [[f64; 4]; 2] {
    let a = params.alpha();
    let mut out = [[0.0; 4]; 2];
    for (k, &(h1, h2)) in PAIRS.iter().enumerate() {
        let prior = (if h1 { a } else { 1.0 - a }) * (if h2 { a } else { 1.0 - a });
        let (p1, p2) = match (h1, h2) {
            (true, true) => (1.0 - prof.rho, 1.0 - prof.rho),
            (false, false) => (1.0 - prof.tau_low, 1.0 - prof.tau_low),
            (true, false) => (prof.mu_high, prof.mu_low),
            (false, true) => (prof.mu_low, prof.mu_high),
        };
        let one = p1 * p2;
        out[1][k] = prior * one;
        out[0][k] = prior * (1.0 - one);
    }
    out
}

fn normalize(w: [f64; 4]) -> Option<[f64; 4]> {
    let total: f64 = w.iter().sum();
    (total > 0.0).then(|| w.map(|x| x / total))
}

/// Bayes posteriors over ordered pairs for each signal; `None` off path.
pub fn enumerate_posteriors(params: &MarketParams, prof: &Profile) -> [Option<[f64; 4]>; 2] {
    let j = joint(params, prof);
    [normalize(j[0]), normalize(j[1])]
}

/// Revenue and surpluses of the first and second arrival.
fn play(plan: Plan, h1: bool, h2: bool, params: &MarketParams) -> (f64, f64, f64) {
    let (v1, v2) = (value(params, h1), value(params, h2));
    let p1 = plan.first_price(params);
    let a1 = purchase_decision(v1, p1);
    let p2 = plan.second_price(params, a1);
    let a2 = purchase_decision(v2, p2);
    let pay = |v: f64, p: f64, a: bool| if a { v - p } else { 0.0 };
    let rev = if a1 { p1 } else { 0.0 } + if a2 { p2 } else { 0.0 };
    (rev, pay(v1, p1, a1), pay(v2, p2, a2))
}

fn revenue(plan: Plan, post: &[f64; 4], params: &MarketParams) -> f64 {
    PAIRS.iter().zip(post).map(|(&(h1, h2), w)| w * play(plan, h1, h2, params).0).sum()
}

/// Best two-period revenue over arbitrary grid prices, by backward induction.
fn grid_best_revenue(post: &[f64; 4], params: &MarketParams, prices: &[f64]) -> f64 {
    let best_second = |mass: &[(f64, bool)]| -> f64 {
        prices
            .iter()
            .map(|&p2| mass.iter().filter(|(_, h2)| purchase_decision(value(params, *h2), p2)).map(|(w, _)| w * p2).sum::<f64>())
            .fold(0.0, f64::max)
    };
    prices
        .iter()
        .map(|&p1| {
            let mut bought = Vec::new();
            let mut passed = Vec::new();
            let mut first = 0.0;
            for (&(h1, h2), &w) in PAIRS.iter().zip(post) {
                if purchase_decision(value(params, h1), p1) {
                    first += w * p1;
                    bought.push((w, h2));
                } else {
                    passed.push((w, h2));
                }
            }
            first + best_second(&bought) + best_second(&passed)
        })
        .fold(f64::MIN, f64::max)
}

/// Buyer roles whose incentives are checked.
#[derive(Clone, Copy)]
enum Role {
    HighWithHigh,
    LowWithLow,
    HighWithLow,
    LowWithHigh,
}

const ROLES: [Role; 4] = [Role::HighWithHigh, Role::LowWithLow, Role::HighWithLow, Role::LowWithHigh];

impl Role {
    fn types(self) -> (bool, bool) {
        match self {
            Role::HighWithHigh => (true, true),
            Role::LowWithLow => (false, false),
            Role::HighWithLow => (true, false),
            Role::LowWithHigh => (false, true),
        }
    }

    /// Own and partner probability of choosing x = 1.
    fn interact_probs(self, prof: &Profile) -> (f64, f64) {
        match self {
            Role::HighWithHigh => (1.0 - prof.rho, 1.0 - prof.rho),
            Role::LowWithLow => (1.0 - prof.tau_low, 1.0 - prof.tau_low),
            Role::HighWithLow => (prof.mu_high, prof.mu_low),
            Role::LowWithHigh => (prof.mu_low, prof.mu_high),
        }
    }
}

/// Average purchase surplus of a buyer in `role` under `plan`, over arrival orders.
fn role_surplus(plan: Plan, role: Role, params: &MarketParams) -> f64 {
    let (me, other) = role.types();
    let (_, first, _) = play(plan, me, other, params);
    let (_, _, second) = play(plan, other, me, params);
    0.5 * (first + second)
}

/// Per-role surplus vector of a plan mixture.
fn mix_surplus(mix: &PlanMix, params: &MarketParams) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, role) in ROLES.iter().enumerate() {
        out[k] = mix.expect(|p| role_surplus(p, *role, params));
    }
    out
}

/// Well-supported unilateral gain of a buyer in `role`.
fn buyer_gain(role: Role, k: usize, prof: &Profile, s: [&[f64; 4]; 2], params: &MarketParams) -> f64 {
    let (me, other) = role.types();
    let (own, partner) = role.interact_probs(prof);
    let value_of = |x: u8| -> f64 {
        [(1u8, partner), (0u8, 1.0 - partner)]
            .iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|&(y, w)| {
                let social = social_utility(pref(me), pref(other), x, y, params).expect("binary").0;
                w * (social + s[common_frequency(x, y) as usize][k])
            })
            .sum()
    };
    let (u1, u0) = (value_of(1), value_of(0));
    let best = u1.max(u0);
    let mut worst_used = best;
    if own > 0.0 {
        worst_used = worst_used.min(u1);
    }
    if own < 1.0 {
        worst_used = worst_used.min(u0);
    }
    best - worst_used
}

/// Mixtures over ε-optimal plans: pure plans and two-plan mixes on the grid.
fn candidate_mixes(rev: &[f64; 4], best: f64, eps: f64, step: f64) -> Vec<PlanMix> {
    let good: Vec<Plan> = Plan::ALL.into_iter().filter(|p| rev[p.index()] >= best - eps).collect();
    let mut out: Vec<PlanMix> = good.iter().map(|&p| PlanMix::pure(p)).collect();
    let n = (1.0 / step).round() as usize;
    for (i, &a) in good.iter().enumerate() {
        for &b in &good[i + 1..] {
            for k in 1..n {
                out.push(PlanMix::mix(a, k as f64 / n as f64, b));
            }
        }
    }
    out
}

struct SignalSide {
    mixes: Vec<(PlanMix, f64, [f64; 4])>,
}

fn signal_side(post: Option<[f64; 4]>, params: &MarketParams, grid: &GridSpec, eps: f64) -> SignalSide {
    match post {
        None => {
            let mixes = Plan::ALL
                .iter()
                .map(|&p| {
                    let m = PlanMix::pure(p);
                    (m, 0.0, mix_surplus(&m, params))
                })
                .collect();
            SignalSide { mixes }
        }
        Some(post) => {
            let revenues = Plan::ALL.map(|p| revenue(p, &post, params));
            let plan_best = revenues.iter().cloned().fold(f64::MIN, f64::max);
            let best = grid_best_revenue(&post, params, &grid.price_grid).max(plan_best);
            let mixes = candidate_mixes(&revenues, best, eps, grid.mix_step)
                .into_iter()
                .map(|m| {
                    let worst = m.support().map(|(p, _)| revenues[p.index()]).fold(f64::MAX, f64::min);
                    (m, best - worst, mix_surplus(&m, params))
                })
                .collect();
            SignalSide { mixes }
        }
    }
}

/// All ε-equilibria with buyer behavior `prof`, or an empty list.
fn equilibria_for(params: &MarketParams, prof: &Profile, grid: &GridSpec, eps: f64) -> Vec<EpsEquilibrium> {
    let post = enumerate_posteriors(params, prof);
    let sides = [signal_side(post[0], params, grid, eps), signal_side(post[1], params, grid, eps)];
    let mut out = Vec::new();
    for (m1, g1, s1) in &sides[1].mixes {
        if *g1 > eps {
            continue;
        }
        for (m0, g0, s0) in &sides[0].mixes {
            if *g0 > eps {
                continue;
            }
            let mut gain = g1.max(*g0);
            for (k, role) in ROLES.iter().enumerate() {
                gain = gain.max(buyer_gain(*role, k, prof, [s0, s1], params));
                if gain > eps {
                    break;
                }
            }
            if gain <= eps {
                out.push(EpsEquilibrium {
                    rho: prof.rho,
                    policy: PricingPolicy { on_signal_1: *m1, on_signal_0: *m0 },
                    epsilon: gain,
                });
            }
        }
    }
    out
}

/// Exhaustive ε-equilibrium search over the manipulation probability of
/// High–High pairs and the seller's plan mixtures on each signal.
pub fn brute_force_pbe(params: &MarketParams, grid: &GridSpec) -> Result<Vec<EpsEquilibrium>> {
    grid.validate()?;
    let eps = grid.epsilon(params);
    let n = (1.0 / grid.rho_step).round() as usize;
    use rayon::prelude::*;
    let found: Vec<Vec<EpsEquilibrium>> = (0..=n)
        .into_par_iter()
        .map(|k| equilibria_for(params, &Profile::honest(k as f64 / n as f64), grid, eps))
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Number of profiles with manipulation outside High–High pairs that pass the
/// ε-equilibrium filter, over a coarse grid of such deviations.
pub fn structure_violations(params: &MarketParams, grid: &GridSpec, levels: usize) -> Result<usize> {
    grid.validate()?;
    let eps = grid.epsilon(params);
    let coarse = GridSpec { mix_step: grid.mix_step.max(0.01), ..grid.clone() };
    let lv: Vec<f64> = (0..=levels).map(|k| k as f64 / levels as f64).collect();
    let mut count = 0;
    for &tau_low in &lv {
        for &mu_high in &lv {
            for &mu_low in &lv {
                if tau_low == 0.0 && mu_high == 0.0 && mu_low == 0.0 {
                    continue;
                }
                for &rho in &lv {
                    let prof = Profile { rho, tau_low, mu_high, mu_low };
                    count += equilibria_for(params, &prof, &coarse, eps).len();
                }
            }
        }
    }
    Ok(count)
}

/// Simulates the game under `outcome`'s strategies and reports revenue and
/// average buyer payoff with standard errors.
pub fn monte_carlo_play(outcome: &EquilibriumOutcome, params: &MarketParams, n: u64, seed: u64) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let alpha = outcome.alpha;
    let rho = outcome.rho_star;
    let policy = outcome.policy;
    let acc = sim::run::<2, _>(n, seed, |rng, acc| {
        let hi = rng.gen::<f64>() < alpha;
        let hj = rng.gen::<f64>() < alpha;
        let (x, y) = if hi && hj {
            (u8::from(rng.gen::<f64>() >= rho), u8::from(rng.gen::<f64>() >= rho))
        } else if hi == hj {
            (1, 1)
        } else {
            (0, 0)
        };
        let mix = policy.on_signal(common_frequency(x, y));
        let mut u = rng.gen::<f64>();
        let mut plan = Plan::UniformLow;
        for (p, w) in mix.support() {
            plan = p;
            if u < w {
                break;
            }
            u -= w;
        }
        let i_first = rng.gen::<bool>();
        let (first, second) = if i_first { (hi, hj) } else { (hj, hi) };
        let (rev, s1, s2) = play(plan, first, second, params);
        let (si, sj) = if i_first { (s1, s2) } else { (s2, s1) };
        let (ui, uj) = social_utility(pref(hi), pref(hj), x, y, params).expect("binary");
        acc[0].push(rev);
        acc[1].push(0.5 * (si + ui + sj + uj));
    });
    Ok(SimulationReport {
        samples: n,
        seed,
        revenue: acc[0].estimate(),
        buyer_payoff: acc[1].estimate(),
        low_payoff: None,
    })
}

/// Checks on a belief grid that every revenue-maximizing grid price, in
/// either period and at every information set, is v_L or v_H.
///
/// The grid is augmented with v_L, v_H and 16 evenly spaced interior prices.
pub fn verify_binary_pricing(params: &MarketParams, price_grid: &[f64]) -> Result<bool> {
    if price_grid.is_empty() {
        return Err(Error::InvalidInput("price grid is empty".into()));
    }
    let (lo, hi) = (params.v_l(), params.v_h());
    let mut grid: Vec<f64> = price_grid.to_vec();
    grid.extend([lo, hi]);
    grid.extend((1..=16).map(|k| lo + (hi - lo) * k as f64 / 17.0));
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite prices"));
    grid.dedup();
    let binary = |p: f64| p == lo || p == hi;
    const TOL: f64 = 1e-12;

    let second_ok = |mass: &[(f64, bool)]| -> bool {
        if mass.iter().all(|(w, _)| *w == 0.0) {
            return true;
        }
        let rev = |p2: f64| mass.iter().filter(|(_, h)| purchase_decision(value(params, *h), p2)).map(|(w, _)| w * p2).sum::<f64>();
        let best = grid.iter().map(|&p| rev(p)).fold(f64::MIN, f64::max);
        let best_binary = [lo, hi].iter().map(|&p| rev(p)).fold(f64::MIN, f64::max);
        grid.iter().all(|&p| binary(p) || rev(p) < best - TOL) && best_binary >= best - TOL
    };

    for k in 0..=20 {
        let rho = k as f64 / 20.0;
        for post in enumerate_posteriors(params, &Profile::honest(rho)).into_iter().flatten() {
            let mut totals = Vec::with_capacity(grid.len());
            for &p1 in &grid {
                let (mut bought, mut passed, mut first) = (Vec::new(), Vec::new(), 0.0);
                for (&(h1, h2), &w) in PAIRS.iter().zip(&post) {
                    if purchase_decision(value(params, h1), p1) {
                        first += w * p1;
                        bought.push((w, h2));
                    } else {
                        passed.push((w, h2));
                    }
                }
                if !second_ok(&bought) || !second_ok(&passed) {
                    return Ok(false);
                }
                totals.push(first + grid_best_revenue_from(&bought, params, &grid) + grid_best_revenue_from(&passed, params, &grid));
            }
            let best = totals.iter().cloned().fold(f64::MIN, f64::max);
            for (&p1, &t) in grid.iter().zip(&totals) {
                if !binary(p1) && t >= best - TOL {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn grid_best_revenue_from(mass: &[(f64, bool)], params: &MarketParams, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&p2| mass.iter().filter(|(_, h)| purchase_decision(value(params, *h), p2)).map(|(w, _)| w * p2).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Social utility over continuous interaction frequencies.
pub trait InteractionUtility: Sync {
    /// Utility of buyer i toward a like-minded buyer.
    fn same(&self, x_ij: f64, x_ji: f64) -> f64;
    /// Utility of buyer i toward a buyer with the other preference.
    fn different(&self, x_ij: f64, x_ji: f64) -> f64;
}

/// `u(x, y) = (1 − l) x + l y` for like pairs and `−(c − r) x − r y` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct LinearUtility {
    pub l: f64,
    pub c: f64,
    pub r: f64,
}

impl InteractionUtility for LinearUtility {
    fn same(&self, x: f64, y: f64) -> f64 {
        (1.0 - self.l) * x + self.l * y
    }
    fn different(&self, x: f64, y: f64) -> f64 {
        -(self.c - self.r) * x - self.r * y
    }
}

/// `u(x, y) = (1 − l) √x + l √y` for like pairs and `−c x y − r (x + y)/2` otherwise.
#[derive(Debug, Clone, Copy)]
pub struct ConcaveUtility {
    pub l: f64,
    pub c: f64,
    pub r: f64,
}

impl InteractionUtility for ConcaveUtility {
    fn same(&self, x: f64, y: f64) -> f64 {
        (1.0 - self.l) * x.sqrt() + self.l * y.sqrt()
    }
    fn different(&self, x: f64, y: f64) -> f64 {
        -self.c * x * y - self.r * (x + y) / 2.0
    }
}

fn check_utility(u: &dyn InteractionUtility, grid: &[f64], l: f64) -> Result<()> {
    const TOL: f64 = 1e-12;
    for &x in grid {
        for &y in grid {
            if u.same(x, y) < -TOL {
                return Err(Error::UtilityCondition("same-preference utility is non-negative"));
            }
            if u.different(x, y) > TOL {
                return Err(Error::UtilityCondition("different-preference utility is non-positive"));
            }
        }
    }
    for w in grid.windows(2) {
        for &z in grid {
            if !(u.same(w[1], z) > u.same(w[0], z) && u.same(z, w[1]) > u.same(z, w[0])) {
                return Err(Error::UtilityCondition("same-preference utility increases in both frequencies"));
            }
            if !(u.different(w[1], z) < u.different(w[0], z) && u.different(z, w[1]) < u.different(z, w[0])) {
                return Err(Error::UtilityCondition("different-preference utility decreases in both frequencies"));
            }
        }
    }
    if (u.same(1.0, 1.0) - 1.0).abs() > TOL || u.same(0.0, 0.0).abs() > TOL {
        return Err(Error::UtilityCondition("u(1,1) = 1 and u(0,0) = 0"));
    }
    for x in [0.0, 1.0] {
        if (u.same(x, 1.0) - u.same(x, 0.0) - l).abs() > TOL {
            return Err(Error::UtilityCondition("u(x,1) − u(x,0) = l for x in {0,1}"));
        }
    }
    Ok(())
}

/// Searches symmetric High–High frequency mixtures (support of at most two
/// grid points) for ε-equilibria and reports whether every one found puts
/// weight only on frequencies 0 and 1.
///
/// A common frequency strictly inside (0, 1) can only come from a High–High
/// pair, so the seller answers it with a high uniform price.
pub fn verify_frequency_polarization(
    params: &MarketParams,
    freq_grid: &[f64],
    utility: &dyn InteractionUtility,
) -> Result<bool> {
    Ok(polarization_search(params, freq_grid, utility, 1e-3)?.iter().all(|e| e.polarized))
}

/// A frequency-game ε-equilibrium: support and weights of the High buyers'
/// symmetric mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyEquilibrium {
    pub support: Vec<(f64, f64)>,
    pub polarized: bool,
}

pub fn polarization_search(
    params: &MarketParams,
    freq_grid: &[f64],
    utility: &dyn InteractionUtility,
    step: f64,
) -> Result<Vec<FrequencyEquilibrium>> {
    let mut grid = freq_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
    grid.dedup();
    if grid.first() != Some(&0.0) || grid.last() != Some(&1.0) {
        return Err(Error::InvalidInput("frequency grid must include 0 and 1".into()));
    }
    if grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidInput("frequencies must lie in [0, 1]".into()));
    }
    check_utility(utility, &grid, params.l())?;

    let k = grid.len();
    let eps = (3.0 * params.v_h() + 2.0) * step;
    let n = (1.0 / step).round() as usize;
    let mut strategies: Vec<Vec<(usize, f64)>> = (0..k).map(|i| vec![(i, 1.0)]).collect();
    for i in 0..k {
        for j in i + 1..k {
            for m in 1..n {
                let w = m as f64 / n as f64;
                strategies.push(vec![(i, w), (j, 1.0 - w)]);
            }
        }
    }
    let price_grid = GridSpec::default_for(params).price_grid;
    let grid_spec = GridSpec { rho_step: step, mix_step: step, price_grid };
    let hh = role_index(Role::HighWithHigh);
    let high_surplus = mix_surplus(&PlanMix::pure(Plan::UniformHigh), params)[hh];

    use rayon::prelude::*;
    let found: Vec<Vec<FrequencyEquilibrium>> = strategies
        .par_iter()
        .map(|sigma| {
            let mut dist = vec![0.0; k];
            for &(i, wi) in sigma {
                for &(j, wj) in sigma {
                    dist[i.min(j)] += wi * wj;
                }
            }
            let a = params.alpha();
            let post = [
                normalize([a * a * dist[0], a * (1.0 - a), a * (1.0 - a), 0.0]),
                normalize([a * a * dist[k - 1], 0.0, 0.0, (1.0 - a) * (1.0 - a)]),
            ];
            let sides = [signal_side(post[0], params, &grid_spec, eps), signal_side(post[1], params, &grid_spec, eps)];
            let mut out = Vec::new();
            for (_, g1, s1) in &sides[1].mixes {
                if *g1 > eps {
                    continue;
                }
                for (_, g0, s0) in &sides[0].mixes {
                    if *g0 > eps {
                        continue;
                    }
                    let surplus_at = |idx: usize| -> f64 {
                        if idx == 0 {
                            s0[hh]
                        } else if idx == k - 1 {
                            s1[hh]
                        } else {
                            high_surplus
                        }
                    };
                    let values: Vec<f64> = (0..k)
                        .map(|x| sigma.iter().map(|&(y, w)| w * (utility.same(grid[x], grid[y]) + surplus_at(x.min(y)))).sum())
                        .collect();
                    let best = values.iter().cloned().fold(f64::MIN, f64::max);
                    if sigma.iter().all(|&(x, _)| values[x] >= best - eps) {
                        out.push(FrequencyEquilibrium {
                            support: sigma.iter().map(|&(i, w)| (grid[i], w)).collect(),
                            polarized: sigma.iter().all(|&(i, _)| i == 0 || i == k - 1),
                        });
                        break;
                    }
                }
                if out.last().is_some() {
                    break;
                }
            }
            out
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

fn role_index(role: Role) -> usize {
    ROLES.iter().position(|r| std::mem::discriminant(r) == std::mem::discriminant(&role)).expect("known role")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(h: f64, lo: f64, l: f64) -> MarketParams {
        MarketParams::new(h, lo, l).unwrap()
    }

    #[test]
    fn empty_price_grid_rejected() {
        let p = mp(4.0, 3.0, 0.5);
        let grid = GridSpec { price_grid: vec![], ..GridSpec::default_for(&p) };
        assert!(brute_force_pbe(&p, &grid).is_err());
        assert!(verify_binary_pricing(&p, &[]).is_err());
    }

    #[test]
    fn enumerated_posteriors_match_bayes_by_hand() {
        let p = mp(4.0, 1.0, 0.5);
        let post = enumerate_posteriors(&p, &Profile::honest(0.5));
        // s = 1/4: Pr(HH | 1) = (1/16)/(1/16 + 1/4), Pr(HH | 0) = (3/16)/(3/16 + 1/2).
        assert!((post[1].unwrap()[0] - 0.2).abs() < 1e-15);
        assert!((post[0].unwrap()[0] - 3.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn binary_pricing_examples() {
        assert!(verify_binary_pricing(&mp(4.0, 2.0, 0.5), &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap());
        assert!(verify_binary_pricing(&mp(4.0, 3.9, 0.5), &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap());
    }

    #[test]
    fn utility_conditions_named() {
        let bad = LinearUtility { l: 0.3, c: 1.0, r: 0.5 };
        let err = verify_frequency_polarization(&mp(2.6, 1.4, 0.5), &[0.0, 0.5, 1.0], &bad).unwrap_err();
        assert!(err.to_string().contains("u(x,1) − u(x,0) = l"));
        let grid = [0.0, 0.5];
        assert!(verify_frequency_polarization(&mp(2.6, 1.4, 0.5), &grid, &LinearUtility { l: 0.5, c: 1.0, r: 0.5 }).is_err());
    }
}
