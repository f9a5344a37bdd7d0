//! Closed-form revenues, average buyer payoffs and cross-mechanism ratios.

use serde::{Deserialize, Serialize};

use crate::benchmarks::{no_learning_revenue, undisclosed_revenue};
use crate::error::{invalid, Result};
use crate::model::MarketParams;
use crate::pbe::{classify_region, Region};

const WORSE_OFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayoffMechanism {
    UndisclosedLearning,
    StrategicLearning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub region: Region,
    pub revenue_no_learning: f64,
    pub revenue_undisclosed: f64,
    pub revenue_strategic: f64,
    pub payoff_undisclosed: f64,
    pub payoff_strategic: f64,
    pub gain_strategic_vs_no: f64,
    pub loss_awareness: f64,
    pub known_low_gain: f64,
    pub buyer_worse_off: bool,
}

fn uniform_region(params: &MarketParams) -> Result<Region> {
    if params.alpha() != 0.5 {
        return Err(invalid("alpha", "closed-form welfare requires alpha = 1/2"));
    }
    classify_region(params.v_h(), params.v_l(), params.l())
}

/// Expected equilibrium revenue of the strategic-learning seller.
pub fn strategic_revenue(params: &MarketParams) -> Result<f64> {
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let d = v_h - v_l;
    Ok(match uniform_region(params)? {
        Region::I => 2.0 * v_l,
        Region::II => v_h + v_l / 2.0,
        Region::III => 0.75 * v_h + 0.75 * v_l + (1.0 - l) * (1.0 - l) / d,
        Region::IV => 0.75 * v_h + 0.875 * v_l,
        Region::V | Region::Skewed => v_h + v_l / 4.0,
    })
}

/// Average final payoff of a buyer (purchase surplus plus social utility).
pub fn average_buyer_payoff(params: &MarketParams, mechanism: PayoffMechanism) -> Result<f64> {
    let region = uniform_region(params)?;
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let d = v_h - v_l;
    Ok(match mechanism {
        PayoffMechanism::UndisclosedLearning => {
            if params.ratio() < 2.0 / 3.0 {
                0.5
            } else {
                (d + 1.0) / 2.0
            }
        }
        PayoffMechanism::StrategicLearning => match region {
            Region::I => (d + 1.0) / 2.0,
            Region::II => 0.5,
            Region::III => l * (1.0 - l) / (2.0 * d) + d / 8.0 + 0.25,
            Region::IV => l / 4.0 * (v_l / (2.0 * d)).sqrt() + d / 8.0 + 0.25,
            Region::V | Region::Skewed => {
                let z = ((v_h - 2.0 * v_l) / d).sqrt();
                (1.0 - l) / 4.0 / z + l / 4.0 * z + 0.25
            }
        },
    })
}

/// Whether buyers are strictly worse off once they know the seller learns.
pub fn buyer_worse_off(params: &MarketParams) -> Result<bool> {
    let st = average_buyer_payoff(params, PayoffMechanism::StrategicLearning)?;
    let un = average_buyer_payoff(params, PayoffMechanism::UndisclosedLearning)?;
    Ok(st < un - WORSE_OFF_TOL)
}

/// Relative revenue loss of the learning seller once buyers are aware.
pub fn loss_from_awareness(params: &MarketParams) -> Result<f64> {
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let d = v_h - v_l;
    Ok(match uniform_region(params)? {
        Region::I | Region::II => 0.0,
        Region::III => (d * d - 4.0 * (1.0 - l) * (1.0 - l)) / (d * (4.0 * v_h + 2.0 * v_l)),
        Region::IV => (2.0 * v_h - 3.0 * v_l) / (8.0 * v_h + 4.0 * v_l),
        Region::V | Region::Skewed => v_l / (4.0 * v_h + 2.0 * v_l),
    })
}

/// Relative revenue gain from knowing one Low buyer's preference.
pub fn known_low_buyer_gain(params: &MarketParams) -> Result<f64> {
    let (v_h, v_l, l) = (params.v_h(), params.v_l(), params.l());
    let k = 4.0 * (1.0 - l) * (1.0 - l);
    Ok(match uniform_region(params)? {
        Region::I => (v_h - v_l) / (2.0 * v_l),
        Region::II => v_l / (2.0 * v_h + v_l),
        Region::III => (v_h * v_h - v_l * v_l - k) / (3.0 * (v_h * v_h - v_l * v_l) + k),
        Region::IV => (2.0 * v_h + v_l) / (6.0 * v_h + 7.0 * v_l),
        Region::V | Region::Skewed => 3.0 * v_l / (4.0 * v_h + v_l),
    })
}

/// Relative revenue gain of the strategic-learning seller over no learning.
pub fn strategic_gain_over_no_learning(params: &MarketParams) -> Result<f64> {
    let base = no_learning_revenue(params, 2);
    Ok((strategic_revenue(params)? - base) / base)
}

pub fn welfare_report(params: &MarketParams) -> Result<WelfareReport> {
    Ok(WelfareReport {
        region: uniform_region(params)?,
        revenue_no_learning: no_learning_revenue(params, 2),
        revenue_undisclosed: undisclosed_revenue(params, 2),
        revenue_strategic: strategic_revenue(params)?,
        payoff_undisclosed: average_buyer_payoff(params, PayoffMechanism::UndisclosedLearning)?,
        payoff_strategic: average_buyer_payoff(params, PayoffMechanism::StrategicLearning)?,
        gain_strategic_vs_no: strategic_gain_over_no_learning(params)?,
        loss_awareness: loss_from_awareness(params)?,
        known_low_gain: known_low_buyer_gain(params)?,
        buyer_worse_off: buyer_worse_off(params)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mp(h: f64, lo: f64, l: f64) -> MarketParams {
        MarketParams::new(h, lo, l).unwrap()
    }

    #[test]
    fn revenue_examples() {
        assert_eq!(strategic_revenue(&mp(4.0, 3.0, 0.5)).unwrap(), 6.0);
        assert_abs_diff_eq!(strategic_revenue(&mp(3.0, 1.5, 0.5)).unwrap(), 3.5625, epsilon = 1e-12);
        assert_abs_diff_eq!(strategic_revenue(&mp(4.0, 1.0, 0.5)).unwrap(), 4.25, epsilon = 1e-12);
    }

    #[test]
    fn payoff_examples() {
        let st = PayoffMechanism::StrategicLearning;
        assert_abs_diff_eq!(average_buyer_payoff(&mp(2.6, 1.4, 0.5), st).unwrap(), 0.504167, epsilon = 1e-6);
        assert_eq!(average_buyer_payoff(&mp(4.0, 2.0, 0.5), PayoffMechanism::UndisclosedLearning).unwrap(), 0.5);
        assert_abs_diff_eq!(average_buyer_payoff(&mp(4.0, 3.0, 0.5), st).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn worse_off_examples() {
        assert!(buyer_worse_off(&mp(1.0, 0.5, 0.8)).unwrap());
        assert!(!buyer_worse_off(&mp(2.6, 1.4, 0.5)).unwrap());
        assert!(!buyer_worse_off(&mp(4.0, 3.0, 0.5)).unwrap());
    }

    #[test]
    fn ratio_table_examples() {
        assert_abs_diff_eq!(loss_from_awareness(&mp(10.0, 4.0, 0.5)).unwrap(), 1.0 / 12.0, epsilon = 1e-12);
        assert_eq!(loss_from_awareness(&mp(2.0, 1.2, 0.5)).unwrap(), 0.0);
        let one_l = 0.5f64;
        let p = mp(10.0 * one_l / 3f64.sqrt(), 4.0 * one_l / 3f64.sqrt(), 0.5);
        assert_abs_diff_eq!(loss_from_awareness(&p).unwrap(), 1.0 / 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(known_low_buyer_gain(&mp(10.0, 4.0, 0.5)).unwrap(), 3.0 / 11.0, epsilon = 1e-12);
        assert_abs_diff_eq!(known_low_buyer_gain(&mp(4.0, 3.0, 0.5)).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(known_low_buyer_gain(&mp(2.0, 1.2, 0.5)).unwrap(), 1.2 / 5.2, epsilon = 1e-12);
    }

    #[test]
    fn spot_points_locked() {
        // Regression fixtures across the worse-off map.
        assert!(buyer_worse_off(&mp(1.0, 0.5, 0.8)).unwrap());
        assert!(!buyer_worse_off(&mp(2.6, 1.4, 0.5)).unwrap());
        assert!(buyer_worse_off(&mp(3.0, 0.5, 0.9)).unwrap());
    }
}
