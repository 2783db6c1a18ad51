//! Adaptive Gauss-Kronrod (7/15) quadrature and a brute-force evaluation
//! of the success-region integrals. Only the test suites lean on this; it
//! never touches the closed forms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

use super::PsBreakdown;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_pieces: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-14,
            rel: 1e-12,
            max_pieces: 2000,
        }
    }
}

/// Globally adaptive integral over `[a, b]`: always bisect the piece with
/// the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, err });
    let (mut total, mut total_err) = (value, err);
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_pieces {
            return Err(Error::Quadrature(format!(
                "[{a}, {b}]: error estimate {total_err:e} after {} pieces",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.err;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
        // re-sum occasionally to shed accumulated cancellation
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// `∫_a^∞ f` through `x = a + t/(1-t)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let v = f(a + t / s) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// `∫_lo^∞ e^{-y} dy` done numerically, as `e^{-lo} ∫_0^∞ e^{-s} ds` so the
/// tolerance stays relative for deep tails.
fn exp_tail(lo: f64, tol: Tolerance) -> Result<f64> {
    let lo = lo.max(0.0);
    Ok((-lo).exp() * integrate_to_inf(|s| (-s).exp(), 0.0, tol)?)
}

/// Success probability split by case, by direct 2-D integration of the
/// success events against the product exponential density of
/// `(x, y) = (|h_a|², |h_b|²)`.
///
/// * Case I success: `rho_b y <= tau(x)` and `rho_b y >= eps_b`, i.e.
///   `x >= eps_a (1 + rho_b y) / rho_a`, `y >= eps_b / rho_b`.
/// * Case II success: `tau(x) > 0`, `rho_b y > tau(x)` and the SU's joint
///   SINR clears `eps_b`, i.e. `rho_a x + rho_b y + 1 >= (1+eps_a)(1+eps_b)`.
/// * Case III never succeeds because the PU fails.
pub fn ps_quadrature_oracle(rho_a: f64, rho_b: f64, eps_a: f64, eps_b: f64) -> Result<PsBreakdown> {
    if !(rho_a > 0.0 && rho_b > 0.0) {
        return Err(Error::domain("ps_quadrature_oracle", "SNRs must be positive"));
    }
    // probabilities can be tiny, so only the relative tolerance binds
    let tol = Tolerance {
        abs: f64::MIN_POSITIVE,
        ..Tolerance::default()
    };
    let inner_tol = Tolerance { rel: 1e-13, ..tol };

    // outer over y, inner over x
    let case1_outer = |y: f64| -> f64 {
        let x_lo = eps_a * (1.0 + rho_b * y) / rho_a;
        (-y).exp() * exp_tail(x_lo, inner_tol).unwrap_or(f64::NAN)
    };
    let ps_case1 = integrate_to_inf(case1_outer, eps_b / rho_b, tol)?;

    let ps_case2 = if eps_a > 0.0 {
        let joint = (1.0 + eps_a) * (1.0 + eps_b) - 1.0;
        // outer over x, inner over y
        let case2_outer = |x: f64| -> f64 {
            let tau = rho_a * x / eps_a - 1.0;
            let y_lo = tau.max(joint - rho_a * x) / rho_b;
            (-x).exp() * exp_tail(y_lo, inner_tol).unwrap_or(f64::NAN)
        };
        // the two lower bounds cross where tau = joint - rho_a x
        let x0 = eps_a / rho_a;
        let kink = eps_a * (1.0 + eps_b) / rho_a;
        integrate(case2_outer, x0, kink, tol)? + integrate_to_inf(case2_outer, kink, tol)?
    } else {
        0.0
    };
    if !(ps_case1.is_finite() && ps_case2.is_finite()) {
        return Err(Error::Quadrature("inner integral failed".into()));
    }
    Ok(PsBreakdown {
        ps_case1,
        ps_case2,
        ps_case3: 0.0,
        ps_total: ps_case1 + ps_case2,
    })
}
