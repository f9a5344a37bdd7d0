//! Closed-form perfect Bayesian equilibrium of the two-buyer strategic-learning
//! game: region map, manipulation probability, seller mixing and beliefs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{social_utility_unchecked, MarketParams};
use crate::policy::{high_pair_surplus, plan_revenue, play_plan, PairPosterior, Plan, PlanMix, PricingPolicy};

/// Equilibrium region in the (v_H, v_L, l) space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
    V,
    /// Honest play with a low uniform price on x̂ = 1; exists only when α < 1/2.
    Skewed,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
            Region::IV => "IV",
            Region::V => "V",
            Region::Skewed => "Skewed",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOutcome {
    pub region: Region,
    /// Probability that a High buyer in a High–High pair sets x = 0.
    pub rho_star: f64,
    /// Region IV: UniformLow weight on x̂ = 1. Region V: UniformHigh weight on x̂ = 0.
    pub beta_star: Option<f64>,
    pub policy: PricingPolicy,
    pub belief_s: f64,
    pub posterior_hh_given_1: f64,
    pub posterior_hh_given_0: f64,
    pub alpha: f64,
}

fn check_domain(v_h: f64, v_l: f64, l: f64) -> Result<()> {
    if !(v_h.is_finite() && v_l.is_finite() && l.is_finite()) {
        return Err(Error::InvalidInput("parameters must be finite".into()));
    }
    if !(v_l > 0.0 && v_l < v_h) {
        return Err(invalid("v_l", "must satisfy 0 < v_l < v_h"));
    }
    if !(l > 0.0 && l < 1.0) {
        return Err(invalid("l", "must lie in (0, 1)"));
    }
    Ok(())
}

/// Uniform-prior region with tie order I ≻ II ≻ III ≻ IV ≻ V.
pub fn classify_region(v_h: f64, v_l: f64, l: f64) -> Result<Region> {
    check_domain(v_h, v_l, l)?;
    let d = v_h - v_l;
    let k = (1.0 - l) * (1.0 - l);
    Ok(if v_l / v_h >= 2.0 / 3.0 {
        Region::I
    } else if d <= 2.0 * (1.0 - l) {
        Region::II
    } else if d * v_l < 8.0 * k && d * (v_h - 2.0 * v_l) < 4.0 * k {
        Region::III
    } else if v_l >= 2.0 * v_h / 5.0 && d * v_l >= 8.0 * k {
        Region::IV
    } else {
        Region::V
    })
}

/// Boundary curves of the region map for a prior α ≤ 1/2.
#[derive(Debug, Clone, Copy)]
struct Boundaries {
    alpha: f64,
    /// Ratio above which x̂ = 1 gets a low uniform price under honest play.
    honest_low_ratio: f64,
    /// Ratio separating Regions IV and V.
    split_ratio: f64,
    /// Right-hand side of the CP curve.
    cp: f64,
}

impl Boundaries {
    fn new(alpha: f64) -> Self {
        let a2 = alpha * alpha;
        Boundaries {
            alpha,
            honest_low_ratio: 2.0 * a2 / (3.0 * a2 - 2.0 * alpha + 1.0),
            split_ratio: 2.0 * a2 / (1.0 + a2),
            cp: 8.0 * a2 / ((1.0 - alpha) * (1.0 - alpha)),
        }
    }
}

/// Region map under a prior α ∈ (0, 1/2].
pub fn classify_region_with_prior(params: &MarketParams) -> Region {
    let b = Boundaries::new(params.alpha());
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let d = v_h - v_l;
    let k = (1.0 - l) * (1.0 - l);
    let ratio = v_l / v_h;
    if ratio >= 2.0 / 3.0 {
        Region::I
    } else if ratio >= b.honest_low_ratio {
        Region::Skewed
    } else if d <= 2.0 * (1.0 - l) {
        Region::II
    } else if d * v_l < b.cp * k && d * (v_h - v_l / b.alpha) < 4.0 * k {
        Region::III
    } else if ratio >= b.split_ratio && d * v_l >= b.cp * k {
        Region::IV
    } else {
        Region::V
    }
}

/// Signed distance of a point to each boundary curve of the region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDistances {
    /// `v_L/v_H − 2/3`.
    pub region_i: f64,
    /// `v_L/v_H` minus the ratio above which honest play is sustained on x̂ = 1.
    pub skewed: f64,
    /// `2(1−l) − (v_H − v_L)`.
    pub region_ii: f64,
    /// `(v_H − v_L)·v_L` minus the CP curve.
    pub cp: f64,
    /// `(v_H − v_L)(v_H − v_L/α) − 4(1−l)²`.
    pub bp: f64,
    /// `v_L/v_H` minus the IV/V split ratio.
    pub split: f64,
}

pub fn boundary_distances(params: &MarketParams) -> BoundaryDistances {
    let b = Boundaries::new(params.alpha());
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let d = v_h - v_l;
    let k = (1.0 - l) * (1.0 - l);
    let ratio = v_l / v_h;
    BoundaryDistances {
        region_i: ratio - 2.0 / 3.0,
        skewed: ratio - b.honest_low_ratio,
        region_ii: 2.0 * (1.0 - l) - d,
        cp: d * v_l - b.cp * k,
        bp: d * (v_h - v_l / b.alpha) - 4.0 * k,
        split: ratio - b.split_ratio,
    }
}

fn region_of(params: &MarketParams) -> Result<Region> {
    classify_region(params.v_h(), params.v_l(), params.l())
}

fn require_region(region: Region, params: &MarketParams) -> Result<()> {
    let actual = region_of(params)?;
    if actual != region {
        return Err(Error::InvalidInput(format!(
            "parameters lie in region {actual}, not region {region}"
        )));
    }
    Ok(())
}

/// Equilibrium manipulation probability of a High buyer facing a High partner.
pub fn manipulation_probability(region: Region, params: &MarketParams) -> Result<f64> {
    require_region(region, params)?;
    Ok(rho_uniform(region, params))
}

fn rho_uniform(region: Region, p: &MarketParams) -> f64 {
    let d = p.spread();
    match region {
        Region::I | Region::II | Region::Skewed => 0.0,
        Region::III => 1.0 - 2.0 * (1.0 - p.l()) / d,
        Region::IV => 1.0 - (p.v_l() / (2.0 * d)).sqrt(),
        Region::V => 1.0 - ((p.v_h() - 2.0 * p.v_l()) / d).sqrt(),
    }
}

/// Seller's mixing weight: UniformLow on x̂ = 1 in Region IV, UniformHigh on
/// x̂ = 0 in Region V, absent elsewhere.
pub fn seller_mixing(region: Region, params: &MarketParams) -> Result<Option<f64>> {
    require_region(region, params)?;
    Ok(mixing_uniform(region, params))
}

fn mixing_uniform(region: Region, p: &MarketParams) -> Option<f64> {
    let d = p.spread();
    let one_l = 1.0 - p.l();
    match region {
        Region::IV => Some((0.5 - 2f64.sqrt() * one_l / (d * p.v_l()).sqrt()).clamp(0.0, 1.0)),
        Region::V => Some((1.0 - 2.0 * one_l / (d * (p.v_h() - 2.0 * p.v_l())).sqrt()).clamp(0.0, 1.0)),
        _ => None,
    }
}

/// Posteriors `(Pr(HH | x̂=1), Pr(HH | x̂=0))` under the uniform prior.
pub fn posterior_beliefs(rho: f64) -> (f64, f64) {
    let s = (1.0 - rho) * (1.0 - rho);
    (s / (s + 1.0), (1.0 - s) / (3.0 - s))
}

/// Posteriors `(Pr(HH | x̂=1), Pr(HH | x̂=0))` under prior Pr(High) = α.
pub fn posterior_beliefs_with_prior(rho: f64, alpha: f64) -> (f64, f64) {
    if alpha == 0.5 {
        return posterior_beliefs(rho);
    }
    let s = (1.0 - rho) * (1.0 - rho);
    let a2 = alpha * alpha;
    let on_1 = a2 * s / (a2 * s + (1.0 - alpha) * (1.0 - alpha));
    let on_0 = alpha * (1.0 - s) / (alpha * (1.0 - s) + 2.0 * (1.0 - alpha));
    (on_1, on_0)
}

/// Distribution of the ordered pair `[HH, HL, LH, LL]` given a signal.
pub fn pair_posterior(x_hat: u8, s: f64, alpha: f64) -> PairPosterior {
    let a = alpha;
    let w = if x_hat == 1 {
        [a * a * s, 0.0, 0.0, (1.0 - a) * (1.0 - a)]
    } else {
        [a * a * (1.0 - s), a * (1.0 - a), a * (1.0 - a), 0.0]
    };
    let total: f64 = w.iter().sum();
    w.map(|x| x / total)
}

/// Seller's optimal pure plans given the belief parameter s = (1−ρ)².
pub fn optimal_pricing_given_s(s: f64, params: &MarketParams) -> PricingPolicy {
    let ratio = params.ratio();
    if params.alpha() == 0.5 {
        let on_1 = if ratio >= 2.0 * s / (1.0 + 2.0 * s) { Plan::UniformLow } else { Plan::HighThenMatch };
        let on_0 = if ratio >= (3.0 - s) / (4.0 - s) {
            Plan::UniformLow
        } else if ratio >= (1.0 - s) / (2.0 - s) {
            Plan::HighThenFlip
        } else {
            Plan::UniformHigh
        };
        return PricingPolicy::pure(on_1, on_0);
    }
    let rho = 1.0 - s.sqrt();
    let (q, h) = posterior_beliefs_with_prior(rho, params.alpha());
    let on_1 = if ratio >= 2.0 * q / (1.0 + q) { Plan::UniformLow } else { Plan::HighThenMatch };
    let on_0 = if ratio >= 2.0 / (3.0 - h) {
        Plan::UniformLow
    } else if ratio >= 2.0 * h / (1.0 + h) {
        Plan::HighThenFlip
    } else {
        Plan::UniformHigh
    };
    PricingPolicy::pure(on_1, on_0)
}

fn assemble(region: Region, rho: f64, beta: Option<f64>, policy: PricingPolicy, alpha: f64) -> EquilibriumOutcome {
    let (on_1, on_0) = posterior_beliefs_with_prior(rho, alpha);
    EquilibriumOutcome {
        region,
        rho_star: rho,
        beta_star: beta,
        policy,
        belief_s: (1.0 - rho) * (1.0 - rho),
        posterior_hh_given_1: on_1,
        posterior_hh_given_0: on_0,
        alpha,
    }
}

fn policy_for(region: Region, beta: Option<f64>) -> PricingPolicy {
    match (region, beta) {
        (Region::I, _) => PricingPolicy::pure(Plan::UniformLow, Plan::UniformLow),
        (Region::Skewed, _) => PricingPolicy::pure(Plan::UniformLow, Plan::HighThenFlip),
        (Region::IV, Some(b)) => PricingPolicy {
            on_signal_1: PlanMix::mix(Plan::UniformLow, b, Plan::HighThenMatch),
            on_signal_0: PlanMix::pure(Plan::HighThenFlip),
        },
        (Region::V, Some(b)) => PricingPolicy {
            on_signal_1: PlanMix::pure(Plan::HighThenMatch),
            on_signal_0: PlanMix::mix(Plan::UniformHigh, b, Plan::HighThenFlip),
        },
        _ => PricingPolicy::pure(Plan::HighThenMatch, Plan::HighThenFlip),
    }
}

/// Equilibrium of the base model (uniform prior).
pub fn solve_pbe(params: &MarketParams) -> Result<EquilibriumOutcome> {
    if params.alpha() != 0.5 {
        return Err(invalid("alpha", "the base model requires alpha = 1/2; use solve_pbe_nonuniform"));
    }
    let region = region_of(params)?;
    let rho = rho_uniform(region, params);
    let beta = mixing_uniform(region, params);
    Ok(assemble(region, rho, beta, policy_for(region, beta), 0.5))
}

/// Equilibrium under a prior Pr(High) = α ≤ 1/2; identical to [`solve_pbe`] at α = 1/2.
pub fn solve_pbe_nonuniform(params: &MarketParams) -> Result<EquilibriumOutcome> {
    let alpha = params.alpha();
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(invalid("alpha", "must lie in (0, 1/2]"));
    }
    if alpha == 0.5 {
        return solve_pbe(params);
    }
    let region = classify_region_with_prior(params);
    let (v_h, v_l) = (params.v_h(), params.v_l());
    let d = v_h - v_l;
    let one_l = 1.0 - params.l();
    let (rho, beta) = match region {
        Region::I | Region::II | Region::Skewed => (0.0, None),
        Region::III => (1.0 - 2.0 * one_l / d, None),
        Region::IV => {
            let s = v_l * (1.0 - alpha) * (1.0 - alpha) / (2.0 * alpha * alpha * d);
            let b = 0.5 - one_l / (d * s.sqrt());
            (1.0 - s.sqrt(), Some(b.clamp(0.0, 1.0)))
        }
        Region::V => {
            let s = (alpha * v_h - v_l) / (alpha * d);
            let flip = 2.0 * one_l / (d * s.sqrt());
            (1.0 - s.sqrt(), Some((1.0 - flip).clamp(0.0, 1.0)))
        }
    };
    Ok(assemble(region, rho, beta, policy_for(region, beta), alpha))
}

/// Expected final payoff of a High buyer in a High–High pair, indexed
/// `[x_ij][x_ji]`, given the equilibrium pricing policy.
pub fn buyer_payoff_matrix(outcome: &EquilibriumOutcome, params: &MarketParams) -> [[f64; 2]; 2] {
    let surplus = |x_hat: u8| outcome.policy.on_signal(x_hat).expect(|plan| high_pair_surplus(plan, params));
    let (s1, s0) = (surplus(1), surplus(0));
    let mut m = [[0.0; 2]; 2];
    for x in 0..2u8 {
        for y in 0..2u8 {
            let social = social_utility_unchecked(true, x, y, params).0;
            m[x as usize][y as usize] = social + if x.min(y) == 1 { s1 } else { s0 };
        }
    }
    m
}

/// Expected payoffs of a High buyer from honest (x=1) and manipulative (x=0)
/// play against a partner manipulating with probability ρ*.
pub fn buyer_action_values(outcome: &EquilibriumOutcome, params: &MarketParams) -> (f64, f64) {
    let m = buyer_payoff_matrix(outcome, params);
    let rho = outcome.rho_star;
    let honest = (1.0 - rho) * m[1][1] + rho * m[1][0];
    let manipulate = (1.0 - rho) * m[0][1] + rho * m[0][0];
    (honest, manipulate)
}

/// Expected revenue of every plan on each signal under the outcome's beliefs.
pub fn plan_revenues(outcome: &EquilibriumOutcome, params: &MarketParams) -> [[f64; 4]; 2] {
    let mut out = [[0.0; 4]; 2];
    for x_hat in 0..2u8 {
        let post = pair_posterior(x_hat, outcome.belief_s, outcome.alpha);
        for plan in Plan::ALL {
            out[x_hat as usize][plan.index()] = plan_revenue(plan, &post, params);
        }
    }
    out
}

/// Buyer and seller indifference gaps: `(|honest − manipulate|, max revenue
/// spread across the seller's mixed plans)`.
pub fn indifference_gaps(outcome: &EquilibriumOutcome, params: &MarketParams) -> (f64, f64) {
    let (honest, manipulate) = buyer_action_values(outcome, params);
    let revenues = plan_revenues(outcome, params);
    let mut seller = 0.0f64;
    for x_hat in 0..2u8 {
        let rev = revenues[x_hat as usize];
        let used: Vec<f64> = outcome.policy.on_signal(x_hat).support().map(|(p, _)| rev[p.index()]).collect();
        let hi = used.iter().cloned().fold(f64::MIN, f64::max);
        let lo = used.iter().cloned().fold(f64::MAX, f64::min);
        seller = seller.max(hi - lo);
    }
    ((honest - manipulate).abs(), seller)
}

/// Expected seller revenue and average buyer payoff by exhaustive enumeration of
/// preferences, interaction draws, plan draws and arrival orders.
pub fn expected_play(outcome: &EquilibriumOutcome, params: &MarketParams) -> (f64, f64) {
    let a = outcome.alpha;
    let rho = outcome.rho_star;
    let mut revenue = 0.0;
    let mut payoff = 0.0;
    for (hi, hj, w_pair) in [(true, true, a * a), (true, false, a * (1.0 - a)), (false, true, (1.0 - a) * a), (false, false, (1.0 - a) * (1.0 - a))] {
        let same = hi == hj;
        let choices: Vec<(u8, u8, f64)> = if hi && hj {
            vec![(1, 1, (1.0 - rho) * (1.0 - rho)), (1, 0, (1.0 - rho) * rho), (0, 1, rho * (1.0 - rho)), (0, 0, rho * rho)]
        } else if same {
            vec![(1, 1, 1.0)]
        } else {
            vec![(0, 0, 1.0)]
        };
        for (x, y, w_x) in choices {
            let (ui, uj) = social_utility_unchecked(same, x, y, params);
            let mix = outcome.policy.on_signal(x.min(y));
            for (plan, w_plan) in mix.support() {
                for i_first in [true, false] {
                    let (first, second) = if i_first { (hi, hj) } else { (hj, hi) };
                    let (rev, s1, s2) = play_plan(plan, first, second, params);
                    let (si, sj) = if i_first { (s1, s2) } else { (s2, s1) };
                    let w = w_pair * w_x * w_plan * 0.5;
                    revenue += w * rev;
                    payoff += w * 0.5 * (si + ui + sj + uj);
                }
            }
        }
    }
    (revenue, payoff)
}
