//! Rate-splitting uplink offloading for a cognitive-radio pair.
//!
//! A primary user (PU) and a secondary user (SU) each offload part of a
//! computation task to a shared edge server over the same band. The SU
//! splits its message in two and adapts the split per channel draw so the
//! PU sees no degradation. This crate models the channel, the per-draw
//! rate-splitting decision, the NOMA baselines, the closed-form success
//! probability, the latency-optimal offloading plan, and a Monte Carlo
//! engine plus sweep harness to cross-check all of it.
//!
//! ```
//! use rsma_mec::optimizer::{optimal_offload_plan, plan_ps};
//! use rsma_mec::system_model::SystemParams;
//!
//! let p = SystemParams { task_a_bits: 20e3, task_b_bits: 6e3, ..Default::default() };
//! let plan = optimal_offload_plan(&p).unwrap();
//! let ps = plan_ps(&p, &plan).unwrap().ps_total;
//! assert!(ps > 0.0 && ps < 1.0);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod noma;
pub mod optimizer;
pub mod rsma;
pub mod system_model;

pub use error::{Error, Result};
pub use montecarlo::{estimate_psucc, PsEstimate, Scheme};
pub use optimizer::{optimal_offload_plan, OffloadPlan};
pub use system_model::SystemParams;
