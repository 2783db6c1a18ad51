//! Per-draw rate-splitting decision for the SU under PU protection.
//!
//! The receiver decodes `x_b1 -> x_a -> x_b2`. The SU learns the
//! interference threshold `tau` and picks its power split `alpha` and rate
//! split `beta` so that the PU does exactly as well as if it were alone.
//!
//! Success is decided by comparing SINRs against `eps = 2^(bits/(t2 B)) - 1`
//! rather than comparing rates in bits. The two are equivalent since
//! `log2` is monotone, but the SINR form keeps the Case II identity
//! `gamma_a = eps_a` exact in floating point.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system_model::ChannelDraw;

/// The offloading slot: `t2` seconds over `bandwidth` Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub t2: f64,
    pub bandwidth: f64,
}

impl Slot {
    pub fn new(t2: f64, bandwidth: f64) -> Self {
        Slot { t2, bandwidth }
    }

    /// Bits deliverable at `sinr`: `t2 B log2(1 + sinr)`.
    #[inline]
    pub fn bits(&self, sinr: f64) -> f64 {
        self.t2 * self.bandwidth * sinr.ln_1p() / LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `0 < rho_b g_b <= tau`: SU sends only `x_b2`.
    I,
    /// `0 < tau < rho_b g_b`: SU splits its power and rate.
    II,
    /// `tau = 0`: the PU cannot make it, SU sends only `x_b1`.
    III,
}

impl Case {
    pub fn index(self) -> usize {
        match self {
            Case::I => 0,
            Case::II => 1,
            Case::III => 2,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        })
    }
}

/// `2^(target_bits / (t2 B)) - 1`.
pub fn epsilon(target_bits: f64, t2: f64, bandwidth: f64) -> Result<f64> {
    if !(t2 > 0.0) || !(bandwidth > 0.0) {
        return Err(Error::domain(
            "epsilon",
            format!("need t2 > 0 and B > 0, got t2={t2}, B={bandwidth}"),
        ));
    }
    if !(target_bits >= 0.0) {
        return Err(Error::domain(
            "epsilon",
            format!("target must be >= 0, got {target_bits}"),
        ));
    }
    Ok((target_bits / (t2 * bandwidth) * LN_2).exp_m1())
}

/// Per-stream targets for one offloading plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTargets {
    /// `eta_a M_a` bits.
    pub target_a: f64,
    /// `eta_b M_b` bits.
    pub target_b: f64,
    /// `beta eta_b M_b`, carried by `x_b1`.
    pub target_b1: f64,
    /// `(1 - beta) eta_b M_b`, carried by `x_b2`.
    pub target_b2: f64,
    pub eps_a: f64,
    pub eps_b: f64,
}

impl RateTargets {
    /// Targets with `beta = 0`. A zero target needs no airtime, so it maps
    /// to `eps = 0` even when `t2 = 0` (local-only plans).
    pub fn new(target_a: f64, target_b: f64, t2: f64, bandwidth: f64) -> Result<Self> {
        let eps = |bits: f64| {
            if bits == 0.0 {
                Ok(0.0)
            } else {
                epsilon(bits, t2, bandwidth)
            }
        };
        Ok(RateTargets {
            target_a,
            target_b,
            target_b1: 0.0,
            target_b2: target_b,
            eps_a: eps(target_a)?,
            eps_b: eps(target_b)?,
        })
    }

    pub fn with_beta(self, beta: f64) -> Self {
        let target_b1 = beta * self.target_b;
        RateTargets {
            target_b1,
            target_b2: self.target_b - target_b1,
            ..self
        }
    }
}

/// `max(0, rho_a g_a / eps_a - 1)`.
pub fn interference_threshold(rho_a_ga: f64, eps_a: f64) -> Result<f64> {
    if !(eps_a > 0.0) {
        return Err(Error::domain(
            "interference_threshold",
            format!("eps_a must be > 0 (a zero PU target leaves nothing to protect), got {eps_a}"),
        ));
    }
    Ok((rho_a_ga / eps_a - 1.0).max(0.0))
}

pub fn classify_case(rho_b_gb: f64, tau: f64) -> Case {
    if tau <= 0.0 {
        Case::III
    } else if rho_b_gb <= tau {
        Case::I
    } else {
        Case::II
    }
}

/// SINRs `(gamma_b1, gamma_a, gamma_b2)` of the three SIC stages for a
/// general power split `alpha`.
pub fn sic_sinrs(alpha: f64, rho_a_ga: f64, rho_b_gb: f64) -> (f64, f64, f64) {
    let residual = (1.0 - alpha) * rho_b_gb;
    let gamma_b1 = alpha * rho_b_gb / (rho_a_ga + residual + 1.0);
    let gamma_a = rho_a_ga / (residual + 1.0);
    (gamma_b1, gamma_a, residual)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub alpha: f64,
    pub beta: f64,
    pub su_silent: bool,
}

/// SINR of the SU's whole message, `(1 + g1)(1 + g2) - 1`, written so that
/// a zero stream leaves the other bit-for-bit untouched.
#[inline]
fn joint_sinr(g1: f64, g2: f64) -> f64 {
    g1 + g2 + g1 * g2
}

/// Case II `x_b1` SINR at `alpha*`: `(rho_b g_b - tau) / (rho_a g_a + tau + 1)`.
#[inline]
fn case2_gamma_b1(rho_a_ga: f64, rho_b_gb: f64, tau: f64) -> f64 {
    (rho_b_gb - tau) / (rho_a_ga + tau + 1.0)
}

/// Optimal `(alpha, beta)` and whether the SU stays silent.
///
/// Case II puts exactly `tau` of residual interference on the PU and gives
/// the rest of the power to `x_b1`; `beta` is whatever share of the SU
/// target `x_b2` cannot carry, clamped at 0 when `x_b2` carries it all.
pub fn optimal_split(case: Case, rho_a_ga: f64, rho_b_gb: f64, targets: &RateTargets, slot: Slot) -> Result<Split> {
    match case {
        Case::I => Ok(Split {
            alpha: 0.0,
            beta: 0.0,
            su_silent: false,
        }),
        Case::III => Ok(Split {
            alpha: 1.0,
            beta: 1.0,
            su_silent: false,
        }),
        Case::II => {
            let tau = interference_threshold(rho_a_ga, targets.eps_a)?;
            if !(tau > 0.0 && rho_b_gb > tau) {
                return Err(Error::domain(
                    "optimal_split",
                    format!("Case II needs 0 < tau < rho_b g_b, got tau={tau}, rho_b g_b={rho_b_gb}"),
                ));
            }
            let alpha = 1.0 - tau / rho_b_gb;
            let beta = if targets.target_b > 0.0 {
                (1.0 - slot.bits(tau) / targets.target_b).clamp(0.0, 1.0)
            } else {
                0.0
            };
            // R_b1 < target_b - R_b2  <=>  joint SINR below eps_b
            let gamma_b1 = case2_gamma_b1(rho_a_ga, rho_b_gb, tau);
            let su_silent = joint_sinr(gamma_b1, tau) < targets.eps_b;
            Ok(Split { alpha, beta, su_silent })
        }
    }
}

/// SINRs and rates of the three streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamRates {
    pub sinr_a: f64,
    pub sinr_b1: f64,
    pub sinr_b2: f64,
    pub rate_a: f64,
    pub rate_b1: f64,
    pub rate_b2: f64,
}

impl StreamRates {
    fn from_sinrs(sinr_a: f64, sinr_b1: f64, sinr_b2: f64, slot: Slot) -> Self {
        StreamRates {
            sinr_a,
            sinr_b1,
            sinr_b2,
            rate_a: slot.bits(sinr_a),
            rate_b1: slot.bits(sinr_b1),
            rate_b2: slot.bits(sinr_b2),
        }
    }
}

/// Achievable rates for a decided case and split.
///
/// In Case II with the SU transmitting, `gamma_a` equals `eps_a` by
/// construction of `alpha*` and is returned as exactly that.
pub fn achievable_rates(
    case: Case,
    split: &Split,
    rho_a_ga: f64,
    rho_b_gb: f64,
    tau: f64,
    eps_a: f64,
    slot: Slot,
) -> StreamRates {
    match case {
        Case::I => StreamRates::from_sinrs(rho_a_ga / (rho_b_gb + 1.0), 0.0, rho_b_gb, slot),
        Case::II if split.su_silent => StreamRates::from_sinrs(rho_a_ga, 0.0, 0.0, slot),
        Case::II => StreamRates::from_sinrs(eps_a, case2_gamma_b1(rho_a_ga, rho_b_gb, tau), tau, slot),
        Case::III => StreamRates::from_sinrs(rho_a_ga, rho_b_gb / (rho_a_ga + 1.0), 0.0, slot),
    }
}

/// Everything the receiver decides for one channel draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsmaDecision {
    pub case: Case,
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    pub su_silent: bool,
    pub sinr_a: f64,
    pub sinr_b1: f64,
    pub sinr_b2: f64,
    pub rate_a: f64,
    pub rate_b1: f64,
    pub rate_b2: f64,
    pub rate_b: f64,
}

/// Runs threshold, classification, split and rates for one draw.
pub fn decide(draw: &ChannelDraw, targets: &RateTargets, slot: Slot) -> RsmaDecision {
    let rho_a_ga = draw.rho_a_ga();
    let rho_b_gb = draw.rho_b_gb();
    // A zero PU target leaves the SU unconstrained.
    let tau = if targets.eps_a > 0.0 {
        (rho_a_ga / targets.eps_a - 1.0).max(0.0)
    } else {
        f64::INFINITY
    };
    let case = classify_case(rho_b_gb, tau);
    let split =
        optimal_split(case, rho_a_ga, rho_b_gb, targets, slot).expect("case was classified from the same inputs");
    let r = achievable_rates(case, &split, rho_a_ga, rho_b_gb, tau, targets.eps_a, slot);
    let (rate_b1, rate_b2) = if split.su_silent {
        (0.0, 0.0)
    } else {
        (r.rate_b1, r.rate_b2)
    };
    RsmaDecision {
        case,
        tau,
        alpha: split.alpha,
        beta: split.beta,
        su_silent: split.su_silent,
        sinr_a: r.sinr_a,
        sinr_b1: r.sinr_b1,
        sinr_b2: r.sinr_b2,
        rate_a: r.rate_a,
        rate_b1,
        rate_b2,
        rate_b: rate_b1 + rate_b2,
    }
}

/// `(pu_ok, su_ok)` for a decision.
pub fn offload_outcome(decision: &RsmaDecision, targets: &RateTargets) -> (bool, bool) {
    let pu_ok = decision.case != Case::III && decision.sinr_a >= targets.eps_a;
    let su_ok = !decision.su_silent && joint_sinr(decision.sinr_b1, decision.sinr_b2) >= targets.eps_b;
    (pu_ok, su_ok)
}

/// Whether the PU would meet its target with the band to itself.
pub fn pu_alone_ok(rho_a_ga: f64, targets: &RateTargets) -> bool {
    rho_a_ga >= targets.eps_a
}
