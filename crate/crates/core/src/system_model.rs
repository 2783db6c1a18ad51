//! Scenario constants, path loss, equivalent transmit SNRs and the fading
//! random stream.
//!
//! Everything is linear scale. Powers only ever appear in dBm at the
//! configuration boundary (see [`crate::experiment`]).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Static scenario parameters for the two-user uplink (PU `a`, SU `b`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Shared bandwidth `B` in Hz.
    pub bandwidth_hz: f64,
    /// CPU cycles needed per task bit, `C`.
    pub cycles_per_bit: f64,
    /// Ratio `N = f_mec / f_user`, must exceed 1.
    pub mec_cpu_ratio: f64,
    /// Latency budget `T` in seconds.
    pub latency_budget_s: f64,
    pub distance_a_m: f64,
    pub distance_b_m: f64,
    pub pathloss_exponent: f64,
    /// User CPU frequency in Hz (both users).
    pub f_user_hz: f64,
    pub power_a_w: f64,
    pub power_b_w: f64,
    /// Receiver noise power in W.
    pub noise_power_w: f64,
    pub task_a_bits: f64,
    pub task_b_bits: f64,
}

impl Default for SystemParams {
    /// Reference scenario: 1 MHz, 1000 cycles/bit, N = 5, T = 10 ms,
    /// d = (5, 25) m, exponent 4, 0.5 GHz users, noise 1e-9 W, 20 dBm
    /// transmit power and a 10 kbit / 8 kbit task pair.
    fn default() -> Self {
        SystemParams {
            bandwidth_hz: 1e6,
            cycles_per_bit: 1000.0,
            mec_cpu_ratio: 5.0,
            latency_budget_s: 10e-3,
            distance_a_m: 5.0,
            distance_b_m: 25.0,
            pathloss_exponent: 4.0,
            f_user_hz: 0.5e9,
            power_a_w: 0.1,
            power_b_w: 0.1,
            noise_power_w: 1e-9,
            task_a_bits: 10e3,
            task_b_bits: 8e3,
        }
    }
}

/// A violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation(pub String);

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl SystemParams {
    pub fn f_mec_hz(&self) -> f64 {
        self.mec_cpu_ratio * self.f_user_hz
    }

    pub fn loss_a(&self) -> f64 {
        path_loss_unchecked(self.distance_a_m, self.pathloss_exponent)
    }

    pub fn loss_b(&self) -> f64 {
        path_loss_unchecked(self.distance_b_m, self.pathloss_exponent)
    }

    /// Equivalent transmit SNR of the PU, `P_a ℓ_a / σ²`.
    pub fn rho_a(&self) -> f64 {
        self.power_a_w * self.loss_a() / self.noise_power_w
    }

    pub fn rho_b(&self) -> f64 {
        self.power_b_w * self.loss_b() / self.noise_power_w
    }

    /// Checks every invariant and returns the parameters untouched, or the
    /// full list of violations.
    pub fn validate(self) -> std::result::Result<SystemParams, Vec<Violation>> {
        let mut v = Vec::new();
        let mut need = |ok: bool, what: &str| {
            // NaN fails every comparison, so it lands here too.
            if !ok {
                v.push(Violation(format!("{what} required")));
            }
        };
        need(self.bandwidth_hz > 0.0, "B > 0");
        need(self.cycles_per_bit > 0.0, "C > 0");
        need(self.mec_cpu_ratio > 1.0, "N > 1");
        need(self.latency_budget_s > 0.0, "T > 0");
        need(self.distance_a_m >= 0.0, "d_a >= 0");
        need(self.distance_b_m >= 0.0, "d_b >= 0");
        need(self.pathloss_exponent >= 2.0, "upsilon >= 2");
        need(self.f_user_hz > 0.0, "f_user > 0");
        need(self.power_a_w > 0.0, "P_a > 0");
        need(self.power_b_w > 0.0, "P_b > 0");
        need(self.noise_power_w > 0.0, "sigma2 > 0");
        need(self.task_a_bits > 0.0, "M_a > 0");
        need(self.task_b_bits > 0.0, "M_b > 0");
        if v.is_empty() {
            Ok(self)
        } else {
            Err(v)
        }
    }

    /// [`validate`](Self::validate) folded into the crate error type.
    pub fn validated(self) -> Result<SystemParams> {
        self.validate()
            .map_err(|v| Error::InvalidParams(v.into_iter().map(|x| x.0).collect()))
    }
}

pub fn validate_params(p: SystemParams) -> std::result::Result<SystemParams, Vec<Violation>> {
    p.validate()
}

fn path_loss_unchecked(d: f64, upsilon: f64) -> f64 {
    1.0 / (1.0 + d.powf(upsilon))
}

/// Large-scale loss `(1 + d^υ)^-1`.
pub fn path_loss(d: f64, upsilon: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::domain("path_loss", format!("distance must be >= 0, got {d}")));
    }
    if !(upsilon > 0.0) {
        return Err(Error::domain(
            "path_loss",
            format!("exponent must be > 0, got {upsilon}"),
        ));
    }
    Ok(path_loss_unchecked(d, upsilon))
}

/// Equivalent transmit SNR `P · loss / σ²`.
pub fn transmit_snr(power_w: f64, loss: f64, noise_w: f64) -> Result<f64> {
    if !(power_w > 0.0) {
        return Err(Error::domain(
            "transmit_snr",
            format!("power must be > 0, got {power_w}"),
        ));
    }
    if !(loss > 0.0 && loss <= 1.0) {
        return Err(Error::domain(
            "transmit_snr",
            format!("loss must lie in (0, 1], got {loss}"),
        ));
    }
    if !(noise_w > 0.0) {
        return Err(Error::domain(
            "transmit_snr",
            format!("noise must be > 0, got {noise_w}"),
        ));
    }
    Ok(power_w * loss / noise_w)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// One block-fading realization: squared channel magnitudes plus the
/// equivalent transmit SNRs they scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g_a: f64,
    pub g_b: f64,
    pub rho_a: f64,
    pub rho_b: f64,
}

impl ChannelDraw {
    pub fn new(g_a: f64, g_b: f64, rho_a: f64, rho_b: f64) -> Self {
        debug_assert!(g_a >= 0.0 && g_b >= 0.0 && rho_a > 0.0 && rho_b > 0.0);
        ChannelDraw { g_a, g_b, rho_a, rho_b }
    }

    /// Draws `g_a` then `g_b` from `rng`.
    pub fn sample<R: Rng + ?Sized>(rho_a: f64, rho_b: f64, rng: &mut R) -> Self {
        let g_a = draw_fading(rng);
        let g_b = draw_fading(rng);
        ChannelDraw { g_a, g_b, rho_a, rho_b }
    }

    /// Received PU power term `ρ_a |h_a|²`.
    pub fn rho_a_ga(&self) -> f64 {
        self.rho_a * self.g_a
    }

    pub fn rho_b_gb(&self) -> f64 {
        self.rho_b * self.g_b
    }
}

/// `|h|²` for a unit-variance circular Gaussian `h`: a unit-mean exponential,
/// drawn by inversion so that every call consumes exactly one `u64`.
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln()
}

/// Trials that share one ChaCha stream; trial `i` lives in stream
/// `i / TRIALS_PER_STREAM` at a fixed word offset.
pub const TRIALS_PER_STREAM: u64 = 4096;

/// 32-bit ChaCha words consumed per trial (two `u64` draws).
pub const WORDS_PER_TRIAL: u64 = 4;

/// Counter-based random stream keyed by a 64-bit master seed.
///
/// The draws of trial `i` depend only on `(seed, i)`, so any partition of
/// the trial range across workers reproduces the same sequence.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Positioned at the first draw of `trial`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial / TRIALS_PER_STREAM);
        rng.set_word_pos(u128::from((trial % TRIALS_PER_STREAM) * WORDS_PER_TRIAL));
        RandomStream { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl rand::RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
