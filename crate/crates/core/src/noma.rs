//! Fixed-order two-user uplink NOMA, the comparison baseline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::rsma::{RateTargets, Slot};
use crate::system_model::ChannelDraw;

/// Which user the SIC receiver decodes first (and so sees the other's
/// interference).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SicOrder {
    /// `x_a -> x_b`.
    #[default]
    PuFirst,
    /// `x_b -> x_a`.
    SuFirst,
}

impl fmt::Display for SicOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SicOrder::PuFirst => "PU_first",
            SicOrder::SuFirst => "SU_first",
        })
    }
}

impl FromStr for SicOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pu_first" => Ok(SicOrder::PuFirst),
            "su_first" => Ok(SicOrder::SuFirst),
            other => Err(format!("unknown SIC order '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaRates {
    pub sinr_a: f64,
    pub sinr_b: f64,
    pub rate_a: f64,
    pub rate_b: f64,
}

pub fn noma_rates(order: SicOrder, rho_a_ga: f64, rho_b_gb: f64, slot: Slot) -> NomaRates {
    let (sinr_a, sinr_b) = match order {
        SicOrder::PuFirst => (rho_a_ga / (rho_b_gb + 1.0), rho_b_gb),
        SicOrder::SuFirst => (rho_a_ga, rho_b_gb / (rho_a_ga + 1.0)),
    };
    NomaRates {
        sinr_a,
        sinr_b,
        rate_a: slot.bits(sinr_a),
        rate_b: slot.bits(sinr_b),
    }
}

pub fn noma_rates_for(order: SicOrder, draw: &ChannelDraw, slot: Slot) -> NomaRates {
    noma_rates(order, draw.rho_a_ga(), draw.rho_b_gb(), slot)
}

/// Both users meet their targets (compared as SINR thresholds) and the
/// plan meets its deadlines.
pub fn noma_outcome(rates: &NomaRates, targets: &RateTargets, times_ok: bool) -> bool {
    rates.sinr_a >= targets.eps_a && rates.sinr_b >= targets.eps_b && times_ok
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishing_interference() {
        let slot = Slot::new(1e-3, 1e6);
        let r = noma_rates(SicOrder::PuFirst, 9.0, 0.0, slot);
        assert_eq!(r.rate_a, slot.bits(9.0));
        let r = noma_rates(SicOrder::SuFirst, 0.0, 9.0, slot);
        assert_eq!(r.rate_b, slot.bits(9.0));
    }

    #[test]
    fn orders_are_mirror_images() {
        let slot = Slot::new(2e-3, 1e6);
        let pu = noma_rates(SicOrder::PuFirst, 3.0, 5.0, slot);
        let su = noma_rates(SicOrder::SuFirst, 5.0, 3.0, slot);
        assert_eq!((pu.rate_a, pu.rate_b), (su.rate_b, su.rate_a));
    }

    #[test]
    fn outcome_rules() {
        let slot = Slot::new(1e-3, 1e6);
        let zero = RateTargets::new(0.0, 0.0, slot.t2, slot.bandwidth).unwrap();
        let r = noma_rates(SicOrder::PuFirst, 0.0, 0.0, slot);
        assert!(noma_outcome(&r, &zero, true));
        assert!(!noma_outcome(&r, &zero, false));

        let targets = RateTargets::new(2000.0, 10.0, slot.t2, slot.bandwidth).unwrap();
        // eps_a = 3; PU SINR 2 is short
        let r = noma_rates(SicOrder::SuFirst, 2.0, 100.0, slot);
        assert!(!noma_outcome(&r, &targets, true));
    }

    #[test]
    fn parse_orders() {
        assert_eq!("PU_first".parse::<SicOrder>().unwrap(), SicOrder::PuFirst);
        assert_eq!("su-first".parse::<SicOrder>().unwrap(), SicOrder::SuFirst);
        assert!("sideways".parse::<SicOrder>().is_err());
        assert_eq!(SicOrder::default(), SicOrder::PuFirst);
    }
}
