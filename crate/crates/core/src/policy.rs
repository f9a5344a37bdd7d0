//! Stage-II pricing plans and per-signal mixtures over them.

use serde::{Deserialize, Serialize};

use crate::model::MarketParams;

/// A two-period pricing plan. Every plan prices in {v_L, v_H}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plan {
    UniformLow,
    UniformHigh,
    /// p1 = v_H; p2 = v_H after a purchase, v_L otherwise.
    HighThenMatch,
    /// p1 = v_H; p2 = v_L after a purchase, v_H otherwise.
    HighThenFlip,
}

impl Plan {
    pub const ALL: [Plan; 4] = [Plan::UniformLow, Plan::UniformHigh, Plan::HighThenMatch, Plan::HighThenFlip];

    pub fn index(self) -> usize {
        match self {
            Plan::UniformLow => 0,
            Plan::UniformHigh => 1,
            Plan::HighThenMatch => 2,
            Plan::HighThenFlip => 3,
        }
    }

    pub fn first_price(self, p: &MarketParams) -> f64 {
        match self {
            Plan::UniformLow => p.v_l(),
            _ => p.v_h(),
        }
    }

    pub fn second_price(self, p: &MarketParams, first_bought: bool) -> f64 {
        match (self, first_bought) {
            (Plan::UniformLow, _) => p.v_l(),
            (Plan::UniformHigh, _) => p.v_h(),
            (Plan::HighThenMatch, true) | (Plan::HighThenFlip, false) => p.v_h(),
            (Plan::HighThenMatch, false) | (Plan::HighThenFlip, true) => p.v_l(),
        }
    }
}

/// Probability weights over the four plans, indexed by [`Plan::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanMix {
    weights: [f64; 4],
}

impl PlanMix {
    pub fn pure(plan: Plan) -> Self {
        let mut weights = [0.0; 4];
        weights[plan.index()] = 1.0;
        PlanMix { weights }
    }

    /// `w` on `a`, the rest on `b`.
    pub fn mix(a: Plan, w: f64, b: Plan) -> Self {
        let mut weights = [0.0; 4];
        weights[a.index()] += w;
        weights[b.index()] += 1.0 - w;
        PlanMix { weights }
    }

    pub fn from_weights(weights: [f64; 4]) -> Self {
        PlanMix { weights }
    }

    pub fn weight(&self, plan: Plan) -> f64 {
        self.weights[plan.index()]
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn support(&self) -> impl Iterator<Item = (Plan, f64)> + '_ {
        Plan::ALL.into_iter().map(|p| (p, self.weight(p))).filter(|(_, w)| *w > 0.0)
    }

    /// The plan with the largest weight (first in [`Plan::ALL`] order on ties).
    pub fn dominant(&self) -> Plan {
        let mut best = Plan::UniformLow;
        for p in Plan::ALL {
            if self.weight(p) > self.weight(best) {
                best = p;
            }
        }
        best
    }

    /// Expectation of a per-plan quantity under the mixture.
    pub fn expect(&self, f: impl Fn(Plan) -> f64) -> f64 {
        self.support().map(|(p, w)| w * f(p)).sum()
    }
}

/// Seller strategy: a plan mixture for each observed common frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingPolicy {
    pub on_signal_1: PlanMix,
    pub on_signal_0: PlanMix,
}

impl PricingPolicy {
    pub fn pure(on_1: Plan, on_0: Plan) -> Self {
        PricingPolicy { on_signal_1: PlanMix::pure(on_1), on_signal_0: PlanMix::pure(on_0) }
    }

    pub fn on_signal(&self, x_hat: u8) -> &PlanMix {
        if x_hat == 1 {
            &self.on_signal_1
        } else {
            &self.on_signal_0
        }
    }
}

/// Joint distribution over ordered preference pairs given a signal:
/// `[HH, HL, LH, LL]` where the first letter is the first arrival.
pub type PairPosterior = [f64; 4];

/// Expected two-period revenue of `plan` when the ordered pair is drawn from `post`.
pub fn plan_revenue(plan: Plan, post: &PairPosterior, p: &MarketParams) -> f64 {
    let pairs = [(true, true), (true, false), (false, true), (false, false)];
    pairs
        .iter()
        .zip(post)
        .map(|(&(h1, h2), &w)| {
            if w == 0.0 {
                return 0.0;
            }
            let (rev, _, _) = play_plan(plan, h1, h2, p);
            w * rev
        })
        .sum()
}

/// Revenue and the two buyers' purchase surpluses for a realized ordered pair.
pub fn play_plan(plan: Plan, first_high: bool, second_high: bool, p: &MarketParams) -> (f64, f64, f64) {
    let v1 = if first_high { p.v_h() } else { p.v_l() };
    let v2 = if second_high { p.v_h() } else { p.v_l() };
    let p1 = plan.first_price(p);
    let a1 = v1 >= p1;
    let p2 = plan.second_price(p, a1);
    let a2 = v2 >= p2;
    let rev = if a1 { p1 } else { 0.0 } + if a2 { p2 } else { 0.0 };
    let s1 = if a1 { v1 - p1 } else { 0.0 };
    let s2 = if a2 { v2 - p2 } else { 0.0 };
    (rev, s1, s2)
}

/// Average purchase surplus of a High buyer in a High–High pair under `plan`.
pub fn high_pair_surplus(plan: Plan, p: &MarketParams) -> f64 {
    let (_, s1, s2) = play_plan(plan, true, true, p);
    0.5 * (s1 + s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_prices() {
        let p = MarketParams::new(4.0, 2.0, 0.5).unwrap();
        assert_eq!(play_plan(Plan::HighThenMatch, false, false, &p).0, 2.0);
        assert_eq!(play_plan(Plan::HighThenFlip, true, false, &p).0, 6.0);
        assert_eq!(play_plan(Plan::UniformHigh, true, true, &p).0, 8.0);
        assert_eq!(high_pair_surplus(Plan::UniformLow, &p), 2.0);
        assert_eq!(high_pair_surplus(Plan::HighThenFlip, &p), 1.0);
        assert_eq!(high_pair_surplus(Plan::HighThenMatch, &p), 0.0);
    }

    #[test]
    fn mixture_support() {
        let m = PlanMix::mix(Plan::UniformLow, 0.25, Plan::HighThenMatch);
        assert_eq!(m.support().count(), 2);
        assert_eq!(m.dominant(), Plan::HighThenMatch);
        assert!((m.expect(|_| 2.0) - 2.0).abs() < 1e-15);
    }
}
