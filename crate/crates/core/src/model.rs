//! Primitive types of the two-stage game: preferences, market parameters,
//! social interaction utility and purchase outcomes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A buyer's private valuation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preference {
    Low,
    High,
}

impl Preference {
    pub fn is_high(self) -> bool {
        self == Preference::High
    }
}

/// Exogenous parameters of the market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    v_h: f64,
    v_l: f64,
    l: f64,
    c: f64,
    r: f64,
    alpha: f64,
}

impl MarketParams {
    pub const DEFAULT_C: f64 = 1.0;
    pub const DEFAULT_R: f64 = 0.5;

    /// Base model with uniform prior and default dissimilar-pair costs.
    pub fn new(v_h: f64, v_l: f64, l: f64) -> Result<Self> {
        Self::with_all(v_h, v_l, l, Self::DEFAULT_C, Self::DEFAULT_R, 0.5)
    }

    pub fn with_all(v_h: f64, v_l: f64, l: f64, c: f64, r: f64, alpha: f64) -> Result<Self> {
        let p = MarketParams { v_h, v_l, l, c, r, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn with_social(self, c: f64, r: f64) -> Result<Self> {
        Self::with_all(self.v_h, self.v_l, self.l, c, r, self.alpha)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::with_all(self.v_h, self.v_l, self.l, self.c, self.r, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.v_h, self.v_l, self.l, self.c, self.r, self.alpha];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        if !(self.v_l > 0.0) {
            return Err(invalid("v_l", "must be positive"));
        }
        if !(self.v_l < self.v_h) {
            return Err(invalid("v_h", "must exceed v_l"));
        }
        if !(self.l > 0.0 && self.l < 1.0) {
            return Err(invalid("l", "must lie in (0, 1)"));
        }
        if !(self.r > 0.0 && self.r < self.c) {
            return Err(invalid("r", "must satisfy 0 < r < c"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(invalid("alpha", "must lie in (0, 1/2]"));
        }
        Ok(())
    }

    pub fn v_h(&self) -> f64 {
        self.v_h
    }
    pub fn v_l(&self) -> f64 {
        self.v_l
    }
    pub fn l(&self) -> f64 {
        self.l
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// v_L / v_H.
    pub fn ratio(&self) -> f64 {
        self.v_l / self.v_h
    }

    /// v_H − v_L.
    pub fn spread(&self) -> f64 {
        self.v_h - self.v_l
    }

    pub fn value(&self, pref: Preference) -> f64 {
        match pref {
            Preference::High => self.v_h,
            Preference::Low => self.v_l,
        }
    }
}

/// Directed interaction choices of a buyer pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InteractionPair {
    pub x_ij: u8,
    pub x_ji: u8,
}

impl InteractionPair {
    pub fn new(x_ij: u8, x_ji: u8) -> Result<Self> {
        check_binary(x_ij)?;
        check_binary(x_ji)?;
        Ok(InteractionPair { x_ij, x_ji })
    }

    pub fn common(&self) -> u8 {
        common_frequency(self.x_ij, self.x_ji)
    }
}

/// A single buyer's Stage-II transaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurchaseRecord {
    pub price: f64,
    pub bought: bool,
}

fn check_binary(x: u8) -> Result<()> {
    if x > 1 {
        return Err(Error::InvalidInput(format!("interaction frequency {x} is not binary")));
    }
    Ok(())
}

/// Social utilities `(u_i, u_j)` of a pair given directed choices.
pub fn social_utility(
    pref_i: Preference,
    pref_j: Preference,
    x_ij: u8,
    x_ji: u8,
    params: &MarketParams,
) -> Result<(f64, f64)> {
    check_binary(x_ij)?;
    check_binary(x_ji)?;
    Ok(social_utility_unchecked(pref_i == pref_j, x_ij, x_ji, params))
}

pub(crate) fn social_utility_unchecked(same: bool, x_ij: u8, x_ji: u8, p: &MarketParams) -> (f64, f64) {
    match (same, x_ij, x_ji) {
        (_, 0, 0) => (0.0, 0.0),
        (true, 1, 1) => (1.0, 1.0),
        (true, 1, 0) => (1.0 - p.l, p.l),
        (true, _, _) => (p.l, 1.0 - p.l),
        (false, 1, 1) => (-p.c, -p.c),
        (false, 1, 0) => (-p.c + p.r, -p.r),
        (false, _, _) => (-p.r, -p.c + p.r),
    }
}

/// The frequency the seller observes: the smaller of the two directed choices.
pub fn common_frequency(x_ij: u8, x_ji: u8) -> u8 {
    x_ij.min(x_ji)
}

pub fn purchase_decision(value: f64, price: f64) -> bool {
    value >= price
}

/// Purchase surplus (if any) plus social utility.
pub fn buyer_final_payoff(value: f64, price: f64, social: f64) -> f64 {
    (value - price).max(0.0) + social
}

#[cfg(test)]
mod tests {
    use super::*;
    use Preference::*;

    fn p() -> MarketParams {
        MarketParams::new(2.0, 1.0, 0.4).unwrap().with_social(0.6, 0.2).unwrap()
    }

    #[test]
    fn same_preference_table() {
        let p = p();
        assert_eq!(social_utility(High, High, 1, 1, &p).unwrap(), (1.0, 1.0));
        assert_eq!(social_utility(High, High, 0, 1, &p).unwrap().0, 0.4);
        assert_eq!(social_utility(Low, Low, 1, 0, &p).unwrap(), (0.6, 0.4));
        assert_eq!(social_utility(Low, Low, 0, 0, &p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn different_preference_table() {
        let p = p();
        let (ui, uj) = social_utility(High, Low, 1, 0, &p).unwrap();
        assert!((ui + 0.4).abs() < 1e-12 && (uj + 0.2).abs() < 1e-12);
        assert_eq!(social_utility(Low, High, 1, 1, &p).unwrap(), (-0.6, -0.6));
        assert_eq!(social_utility(Low, High, 0, 0, &p).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn non_binary_rejected() {
        assert!(social_utility(High, High, 2, 0, &p()).is_err());
        assert!(InteractionPair::new(0, 3).is_err());
    }

    #[test]
    fn purchase_and_payoff() {
        assert!(purchase_decision(2.0, 2.0));
        assert!(!purchase_decision(1.0, 2.0));
        assert_eq!(buyer_final_payoff(1.0, 2.0, 0.5), 0.5);
        assert_eq!(buyer_final_payoff(3.0, 2.0, 0.5), 1.5);
        assert_eq!(common_frequency(1, 0), 0);
    }

    #[test]
    fn params_rejected() {
        assert!(MarketParams::new(1.0, 1.0, 0.5).is_err());
        assert!(MarketParams::new(2.0, 1.0, 1.0).is_err());
        assert!(MarketParams::new(2.0, 1.0, 0.5).unwrap().with_social(0.5, 0.5).is_err());
        assert!(MarketParams::new(2.0, 1.0, 0.5).unwrap().with_alpha(0.6).is_err());
        assert!(MarketParams::new(f64::NAN, 1.0, 0.5).is_err());
    }
}
