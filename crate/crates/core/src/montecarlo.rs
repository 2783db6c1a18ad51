//! Monte Carlo estimation of the successful computation probability.
//!
//! Trial `i` draws `(g_a, g_b)` from [`RandomStream::for_trial`]`(seed, i)`.
//! Workers take whole streams of [`TRIALS_PER_STREAM`] trials and return
//! integer counts, so the estimate is identical for any thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noma::{self, SicOrder};
use crate::optimizer::{execution_times, OffloadPlan};
use crate::rsma::{self, Case, RateTargets, Slot};
use crate::system_model::{ChannelDraw, RandomStream, SystemParams, TRIALS_PER_STREAM};

pub const MIN_TRIALS: u64 = 10_000;

/// Multiple-access scheme under simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Rsma,
    Noma(SicOrder),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Rsma => f.write_str("RSMA"),
            Scheme::Noma(order) => write!(f, "NOMA_{order}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "rsma" => Ok(Scheme::Rsma),
            "noma" => Ok(Scheme::Noma(SicOrder::default())),
            _ => match norm.strip_prefix("noma_") {
                Some(order) => order.parse().map(Scheme::Noma),
                None => Err(format!("unknown scheme '{s}'")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Regime of the draw; only set for RSMA.
    pub case: Option<Case>,
    pub pu_ok: bool,
    pub su_ok: bool,
    pub times_ok: bool,
    pub success: bool,
}

/// Per-plan quantities shared by every trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext {
    pub rho_a: f64,
    pub rho_b: f64,
    pub targets: RateTargets,
    pub slot: Slot,
    pub times_ok: bool,
}

impl TrialContext {
    pub fn new(p: &SystemParams, plan: &OffloadPlan) -> Result<Self> {
        let p = p.validated()?;
        plan.check(&p)?;
        Ok(TrialContext {
            rho_a: p.rho_a(),
            rho_b: p.rho_b(),
            targets: plan.targets(&p)?,
            slot: Slot::new(plan.t2, p.bandwidth_hz),
            times_ok: execution_times(plan, &p).within(plan.t3),
        })
    }

    #[inline]
    pub fn trial(&self, scheme: Scheme, draw: &ChannelDraw) -> TrialOutcome {
        let (case, pu_ok, su_ok) = match scheme {
            Scheme::Rsma => {
                let d = rsma::decide(draw, &self.targets, self.slot);
                let (pu, su) = rsma::offload_outcome(&d, &self.targets);
                (Some(d.case), pu, su)
            }
            Scheme::Noma(order) => {
                let r = noma::noma_rates_for(order, draw, self.slot);
                (None, r.sinr_a >= self.targets.eps_a, r.sinr_b >= self.targets.eps_b)
            }
        };
        TrialOutcome {
            case,
            pu_ok,
            su_ok,
            times_ok: self.times_ok,
            success: pu_ok && su_ok && self.times_ok,
        }
    }

    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ChannelDraw {
        ChannelDraw::sample(self.rho_a, self.rho_b, rng)
    }
}

/// One RSMA trial on the given stream.
pub fn run_trial(p: &SystemParams, plan: &OffloadPlan, stream: &mut RandomStream) -> Result<TrialOutcome> {
    let ctx = TrialContext::new(p, plan)?;
    let draw = ctx.draw(stream.rng());
    Ok(ctx.trial(Scheme::Rsma, &draw))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    successes: u64,
    cases: [u64; 3],
    case_successes: [u64; 3],
}

impl Counts {
    fn add(&mut self, o: &TrialOutcome) {
        self.successes += u64::from(o.success);
        if let Some(c) = o.case {
            self.cases[c.index()] += 1;
            self.case_successes[c.index()] += u64::from(o.success);
        }
    }

    fn merge(mut self, other: Counts) -> Counts {
        self.successes += other.successes;
        for i in 0..3 {
            self.cases[i] += other.cases[i];
            self.case_successes[i] += other.case_successes[i];
        }
        self
    }
}

/// Aggregated estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    /// Trials per RSMA case (all zero for NOMA).
    pub case_counts: [u64; 3],
    /// Successful trials per RSMA case.
    pub case_successes: [u64; 3],
    /// 95% Wilson interval, reported when the mean is within 0.01 of 0 or 1.
    pub wilson: Option<(f64, f64)>,
}

impl PsEstimate {
    fn from_counts(c: Counts, trials: u64, seed: u64) -> Self {
        let n = trials as f64;
        let mean = c.successes as f64 / n;
        let std_err = (mean * (1.0 - mean) / n).sqrt();
        let wilson = (!(0.01..=0.99).contains(&mean)).then(|| wilson_interval(c.successes, trials, 1.96));
        PsEstimate {
            mean,
            std_err,
            trials,
            seed,
            successes: c.successes,
            case_counts: c.cases,
            case_successes: c.case_successes,
            wilson,
        }
    }

    pub fn case_fraction(&self, case: Case) -> f64 {
        self.case_counts[case.index()] as f64 / self.trials as f64
    }

    /// Empirical `P(success and case)`, with its standard error.
    pub fn case_success(&self, case: Case) -> (f64, f64) {
        let n = self.trials as f64;
        let m = self.case_successes[case.index()] as f64 / n;
        (m, (m * (1.0 - m) / n).sqrt())
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Estimates the success probability of `plan` under `scheme` from `trials`
/// independent draws. Runs on the current rayon pool.
pub fn estimate_psucc(
    p: &SystemParams,
    plan: &OffloadPlan,
    scheme: Scheme,
    trials: u64,
    seed: u64,
) -> Result<PsEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let ctx = TrialContext::new(p, plan)?;
    let streams = trials.div_ceil(TRIALS_PER_STREAM);
    let counts = (0..streams)
        .into_par_iter()
        .map(|s| {
            let first = s * TRIALS_PER_STREAM;
            let last = (first + TRIALS_PER_STREAM).min(trials);
            let mut stream = RandomStream::for_trial(seed, first);
            let mut c = Counts::default();
            for _ in first..last {
                let draw = ctx.draw(stream.rng());
                c.add(&ctx.trial(scheme, &draw));
            }
            c
        })
        .reduce(Counts::default, Counts::merge);
    Ok(PsEstimate::from_counts(counts, trials, seed))
}
