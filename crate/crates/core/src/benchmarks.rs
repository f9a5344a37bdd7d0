//! Honest-buyer benchmarks: a seller that ignores interaction data, and a
//! seller that learns from it while buyers are unaware.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::MarketParams;
use crate::policy::{Plan, PricingPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mechanism {
    NoLearning,
    UndisclosedLearning,
    UndisclosedWithKnown,
}

/// How prices are set across the N selling periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BenchmarkPricing {
    /// The same price in every period.
    Uniform(f64),
    /// v_H to the first arrival, then each later buyer pays their inferred value.
    ProbeThenPersonalized,
    /// Every buyer pays their own value.
    Personalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOutcome {
    pub mechanism: Mechanism,
    pub n_buyers: usize,
    /// Buyers interact at the table-optimal frequency: 1 with like buyers, 0 otherwise.
    pub honest_interactions: bool,
    pub pricing: BenchmarkPricing,
    /// Two-buyer plan form, keyed on the observed common frequency.
    pub two_buyer_policy: Option<PricingPolicy>,
    pub expected_revenue: f64,
    pub gain_over_no_learning: f64,
}

/// Uniform price ignoring interaction data: v_H iff 2v_L ≤ v_H.
pub fn no_learning_price(params: &MarketParams) -> f64 {
    if 2.0 * params.v_l() <= params.v_h() {
        params.v_h()
    } else {
        params.v_l()
    }
}

pub fn no_learning_revenue(params: &MarketParams, n: usize) -> f64 {
    let n = n as f64;
    if 2.0 * params.v_l() <= params.v_h() {
        n * params.v_h() / 2.0
    } else {
        n * params.v_l()
    }
}

/// Two-buyer no-learning equilibrium.
pub fn no_learning_spe(params: &MarketParams) -> BenchmarkOutcome {
    let price = no_learning_price(params);
    let plan = if price == params.v_h() { Plan::UniformHigh } else { Plan::UniformLow };
    BenchmarkOutcome {
        mechanism: Mechanism::NoLearning,
        n_buyers: 2,
        honest_interactions: true,
        pricing: BenchmarkPricing::Uniform(price),
        two_buyer_policy: Some(PricingPolicy::pure(plan, plan)),
        expected_revenue: no_learning_revenue(params, 2),
        gain_over_no_learning: 0.0,
    }
}

fn probes(params: &MarketParams, n: usize) -> bool {
    let n = n as f64;
    params.ratio() < n / (n + 1.0)
}

pub fn undisclosed_revenue(params: &MarketParams, n: usize) -> f64 {
    let nf = n as f64;
    if probes(params, n) {
        nf * params.v_h() / 2.0 + (nf - 1.0) * params.v_l() / 2.0
    } else {
        nf * params.v_l()
    }
}

/// Learning seller facing N honest buyers on a connected network.
pub fn undisclosed_learning_spe(params: &MarketParams, n_buyers: usize) -> Result<BenchmarkOutcome> {
    if n_buyers < 2 {
        return Err(invalid("n_buyers", "at least two buyers are required"));
    }
    let probe = probes(params, n_buyers);
    let pricing = if probe {
        BenchmarkPricing::ProbeThenPersonalized
    } else {
        BenchmarkPricing::Uniform(params.v_l())
    };
    let two_buyer_policy = (n_buyers == 2).then(|| {
        if probe {
            PricingPolicy::pure(Plan::HighThenMatch, Plan::HighThenFlip)
        } else {
            PricingPolicy::pure(Plan::UniformLow, Plan::UniformLow)
        }
    });
    Ok(BenchmarkOutcome {
        mechanism: Mechanism::UndisclosedLearning,
        n_buyers,
        honest_interactions: true,
        pricing,
        two_buyer_policy,
        expected_revenue: undisclosed_revenue(params, n_buyers),
        gain_over_no_learning: revenue_gain_undisclosed(params, n_buyers)?,
    })
}

/// Relative revenue gain of the learning seller over the no-learning seller.
pub fn revenue_gain_undisclosed(params: &MarketParams, n_buyers: usize) -> Result<f64> {
    if n_buyers < 2 {
        return Err(invalid("n_buyers", "at least two buyers are required"));
    }
    if !probes(params, n_buyers) {
        return Ok(0.0);
    }
    let base = no_learning_revenue(params, n_buyers);
    Ok((undisclosed_revenue(params, n_buyers) - base) / base)
}

/// Learning seller who already knows at least one connected buyer's preference.
pub fn known_buyer_undisclosed(
    params: &MarketParams,
    n_unknown: usize,
    n_known: usize,
) -> Result<BenchmarkOutcome> {
    if n_known == 0 {
        return Err(invalid("n_known", "the known-buyer set is empty"));
    }
    if n_unknown < 2 {
        return Err(invalid("n_unknown", "at least two unknown buyers are required"));
    }
    let revenue = known_buyer_revenue(params, n_unknown);
    let base = no_learning_revenue(params, n_unknown);
    Ok(BenchmarkOutcome {
        mechanism: Mechanism::UndisclosedWithKnown,
        n_buyers: n_unknown,
        honest_interactions: true,
        pricing: BenchmarkPricing::Personalized,
        two_buyer_policy: None,
        expected_revenue: revenue,
        gain_over_no_learning: (revenue - base) / base,
    })
}

pub fn known_buyer_revenue(params: &MarketParams, n_unknown: usize) -> f64 {
    n_unknown as f64 * (params.v_l() + params.v_h()) / 2.0
}

/// Gain of knowing one buyer over the plain undisclosed-learning revenue.
pub fn known_buyer_gain(params: &MarketParams, n_unknown: usize) -> f64 {
    let base = undisclosed_revenue(params, n_unknown);
    (known_buyer_revenue(params, n_unknown) - base) / base
}
