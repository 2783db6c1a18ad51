//! Closed-form successful computation probability of the rate-splitting
//! scheme under Rayleigh fading, its per-case components and high-SNR
//! asymptotes.
//!
//! All functions take the equivalent transmit SNRs `rho_a`, `rho_b` and the
//! SINR thresholds `eps_a`, `eps_b` of an offloading plan. The deadline
//! event is assumed to hold; plans that miss it have probability 0.
//!
//! The expressions divide by `rho_a - rho_b`. The singularity at
//! `rho_a = rho_b` is removable: writing `u_a`, `u_b` for the two exponents,
//! `u_a = u_b - c (rho_a - rho_b)` with `c = eps_a eps_b / (rho_a rho_b)`,
//! so every difference quotient becomes `expm1(c Δ) / Δ`, which tends to `c`.

pub mod quadrature;

use serde::Serialize;

use crate::error::{Error, Result};

pub use quadrature::ps_quadrature_oracle;

/// Relative SNR gap below which the removable-singularity form is used.
pub const SINGULAR_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsBreakdown {
    pub ps_case1: f64,
    pub ps_case2: f64,
    /// Always 0: with `tau = 0` the PU cannot succeed.
    pub ps_case3: f64,
    pub ps_total: f64,
}

fn check_domain(op: &'static str, rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<()> {
    if !(rho_a > 0.0 && rho_b > 0.0) {
        return Err(Error::domain(
            op,
            format!("SNRs must be > 0, got rho_a={rho_a}, rho_b={rho_b}"),
        ));
    }
    if !(eps_a >= 0.0 && eps_b >= 0.0) {
        return Err(Error::domain(
            op,
            format!("thresholds must be >= 0, got eps_a={eps_a}, eps_b={eps_b}"),
        ));
    }
    Ok(())
}

struct Exponents {
    /// `eps_b/rho_b + eps_a(1+eps_b)/rho_a`
    u_a: f64,
    /// `eps_a/rho_a + eps_b(1+eps_a)/rho_b`
    u_b: f64,
    /// `eps_a eps_b / (rho_a rho_b)`
    c: f64,
}

impl Exponents {
    fn new(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Self {
        Exponents {
            u_a: eps_b / rho_b + eps_a * (1.0 + eps_b) / rho_a,
            u_b: eps_a / rho_a + eps_b * (1.0 + eps_a) / rho_b,
            c: eps_a / rho_a * (eps_b / rho_b),
        }
    }
}

fn near_singular(rho_a: f64, rho_b: f64) -> bool {
    (rho_a - rho_b).abs() < SINGULAR_GAP * rho_a
}

/// `expm1(c Δ) / Δ`, equal to `c` at `Δ = 0`.
fn expm1_quotient(c: f64, delta: f64) -> f64 {
    let x = c * delta;
    if x == 0.0 {
        c
    } else {
        c * (x.exp_m1() / x)
    }
}

/// Case I component: `rho_a e^{-u_a} / (rho_b eps_a + rho_a)`.
pub fn ps_case1_closed(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<f64> {
    check_domain("ps_case1_closed", rho_a, rho_b, eps_a, eps_b)?;
    let e = Exponents::new(rho_a, rho_b, eps_a, eps_b);
    Ok((rho_a / (rho_b * eps_a + rho_a) * (-e.u_a).exp()).clamp(0.0, 1.0))
}

/// Case II component:
/// `rho_b (e^{-u_a} - e^{-u_b}) / (rho_a - rho_b) + rho_b eps_a e^{-u_a} / (rho_b eps_a + rho_a)`.
pub fn ps_case2_closed(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<f64> {
    check_domain("ps_case2_closed", rho_a, rho_b, eps_a, eps_b)?;
    let e = Exponents::new(rho_a, rho_b, eps_a, eps_b);
    let delta = rho_a - rho_b;
    let first = if near_singular(rho_a, rho_b) {
        rho_b * (-e.u_b).exp() * expm1_quotient(e.c, delta)
    } else {
        rho_b * ((-e.u_a).exp() - (-e.u_b).exp()) / delta
    };
    let second = rho_b * eps_a / (rho_b * eps_a + rho_a) * (-e.u_a).exp();
    Ok((first + second).clamp(0.0, 1.0))
}

/// Total success probability
/// `[rho_a e^{-u_a} - rho_b e^{-u_b}] / (rho_a - rho_b)`.
///
/// Within a relative gap of [`SINGULAR_GAP`] the factored form
/// `e^{-u_b} (1 + rho_a expm1(c Δ)/Δ)` is used, whose `Δ = 0` value is
/// `e^{-u} (1 + eps_a eps_b / rho)`.
pub fn ps_total_closed(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<f64> {
    check_domain("ps_total_closed", rho_a, rho_b, eps_a, eps_b)?;
    let e = Exponents::new(rho_a, rho_b, eps_a, eps_b);
    let delta = rho_a - rho_b;
    let p = if near_singular(rho_a, rho_b) {
        (-e.u_b).exp() * (1.0 + rho_a * expm1_quotient(e.c, delta))
    } else {
        // scale by the larger exponential so huge thresholds degrade to 0
        // instead of 0/0
        let u_min = e.u_a.min(e.u_b);
        let bracket = rho_a * (u_min - e.u_a).exp() - rho_b * (u_min - e.u_b).exp();
        let q = bracket / delta;
        if q > 0.0 {
            (q.ln() - u_min).exp()
        } else {
            0.0
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

pub fn ps_breakdown(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<PsBreakdown> {
    Ok(PsBreakdown {
        ps_case1: ps_case1_closed(rho_a, rho_b, eps_a, eps_b)?,
        ps_case2: ps_case2_closed(rho_a, rho_b, eps_a, eps_b)?,
        ps_case3: 0.0,
        ps_total: ps_total_closed(rho_a, rho_b, eps_a, eps_b)?,
    })
}

/// High-SNR limits of the Case I and Case II components when both powers
/// grow with a fixed ratio; they sum to one.
pub fn ps_high_snr(ell_a: f64, ell_b: f64, eps_a: f64) -> Result<(f64, f64)> {
    if !(ell_a > 0.0 && ell_b > 0.0) || !(eps_a >= 0.0) {
        return Err(Error::domain("ps_high_snr", "need ell_a, ell_b > 0 and eps_a >= 0"));
    }
    let den = ell_b * eps_a + ell_a;
    Ok((ell_a / den, ell_b * eps_a / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_thresholds() {
        assert_eq!(ps_case1_closed(10.0, 5.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(ps_case2_closed(10.0, 5.0, 0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(ps_total_closed(10.0, 5.0, 0.0, 0.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn hand_evaluated_points() {
        let p1 = ps_case1_closed(10.0, 5.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(p1, 2.0 / 3.0 * (-0.4f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(p1, 0.446_880, max_relative = 1e-5);

        let pt = ps_total_closed(10.0, 5.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            pt,
            (10.0 * (-0.4f64).exp() - 5.0 * (-0.5f64).exp()) / 5.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(pt, 0.734_110, max_relative = 1e-5);

        let p2 = ps_case2_closed(10.0, 5.0, 1.0, 1.0).unwrap();
        assert!((p1 + p2 - pt).abs() < 1e-15);
    }

    #[test]
    fn equal_snr_limit() {
        let limit = ps_total_closed(10.0, 10.0, 1.0, 1.0).unwrap();
        // e^{-(eps_a + eps_b + eps_a eps_b)/rho} (1 + eps_a eps_b / rho)
        assert_relative_eq!(limit, (-0.3f64).exp() * 1.1, max_relative = 1e-15);
        let hi = ps_total_closed(10.0 * (1.0 + 1e-6), 10.0, 1.0, 1.0).unwrap();
        let lo = ps_total_closed(10.0 * (1.0 - 1e-6), 10.0, 1.0, 1.0).unwrap();
        assert!((0.5 * (hi + lo) - limit).abs() < 1e-8);
        assert!(lo < limit && limit < hi);
        // the switch-over is seamless
        let inside = ps_total_closed(10.0 * (1.0 + 0.9e-9), 10.0, 1.0, 1.0).unwrap();
        let outside = ps_total_closed(10.0 * (1.0 + 1.1e-9), 10.0, 1.0, 1.0).unwrap();
        assert!((inside - outside).abs() < 1e-7);
        let p1 = ps_case1_closed(10.0, 10.0, 1.0, 1.0).unwrap();
        let p2 = ps_case2_closed(10.0, 10.0, 1.0, 1.0).unwrap();
        assert!((p1 + p2 - limit).abs() < 1e-14);
    }

    #[test]
    fn huge_thresholds_underflow_to_zero() {
        let p = ps_total_closed(1e-6, 2e-6, 1e6, 1e6).unwrap();
        assert_eq!(p, 0.0);
        let p = ps_total_closed(1e3, 2e3, 1e6, 1e6).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn domain_errors() {
        assert!(ps_total_closed(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ps_case1_closed(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ps_case2_closed(1.0, 2.0, -1.0, 1.0).is_err());
        assert!(ps_high_snr(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn high_snr_asymptotes() {
        assert_eq!(ps_high_snr(0.3, 0.7, 0.0).unwrap(), (1.0, 0.0));
        assert_eq!(ps_high_snr(0.2, 0.2, 1.0).unwrap(), (0.5, 0.5));
        let (a, b) = ps_high_snr(1.0 / 626.0, 1.0 / 390626.0, 80.0).unwrap();
        assert!((a + b - 1.0).abs() <= f64::EPSILON);
    }
}
