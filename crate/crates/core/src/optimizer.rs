//! Offloading plans: execution-time model, the closed-form optimal plan and
//! a brute-force grid search to check it against.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{self, PsBreakdown};
use crate::error::{Error, Result};
use crate::montecarlo::{self, Scheme};
use crate::rsma::RateTargets;
use crate::system_model::SystemParams;

/// Relative slack on deadline checks. The optimal plan equalizes three
/// execution times analytically, which only holds to rounding in `f64`.
pub const TIME_RTOL: f64 = 1e-12;

/// Offloading split and phase durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffloadPlan {
    pub eta_a: f64,
    pub eta_b: f64,
    /// Offloading phase, seconds.
    pub t2: f64,
    /// Computing phase, seconds.
    pub t3: f64,
}

impl OffloadPlan {
    pub fn is_local_only(&self) -> bool {
        self.eta_a == 0.0 && self.eta_b == 0.0 && self.t2 == 0.0
    }

    pub fn check(&self, p: &SystemParams) -> Result<()> {
        let mut v = Vec::new();
        if !(0.0..=1.0).contains(&self.eta_a) {
            v.push(format!("eta_a = {} outside [0, 1]", self.eta_a));
        }
        if !(0.0..=1.0).contains(&self.eta_b) {
            v.push(format!("eta_b = {} outside [0, 1]", self.eta_b));
        }
        if !(self.t2 >= 0.0) {
            v.push(format!("t2 = {} is negative", self.t2));
        }
        if !(self.t3 > 0.0) {
            v.push(format!("t3 = {} must be positive", self.t3));
        }
        if !(self.t2 + self.t3 <= p.latency_budget_s * (1.0 + TIME_RTOL)) {
            v.push(format!(
                "t2 + t3 = {} exceeds T = {}",
                self.t2 + self.t3,
                p.latency_budget_s
            ));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid plan: {}", v.join("; "))))
        }
    }

    /// Bits each user must push through the offloading phase.
    pub fn targets(&self, p: &SystemParams) -> Result<RateTargets> {
        RateTargets::new(
            self.eta_a * p.task_a_bits,
            self.eta_b * p.task_b_bits,
            self.t2,
            p.bandwidth_hz,
        )
    }
}

/// Execution times of the computing phase, seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExecutionTimes {
    pub t_mec: f64,
    pub t_ua: f64,
    pub t_ub: f64,
}

impl ExecutionTimes {
    pub fn max(&self) -> f64 {
        self.t_mec.max(self.t_ua).max(self.t_ub)
    }

    /// All three finish within `t3`, up to [`TIME_RTOL`].
    pub fn within(&self, t3: f64) -> bool {
        self.max() <= t3 * (1.0 + TIME_RTOL)
    }
}

pub fn execution_times(plan: &OffloadPlan, p: &SystemParams) -> ExecutionTimes {
    let offloaded = plan.eta_a * p.task_a_bits + plan.eta_b * p.task_b_bits;
    ExecutionTimes {
        t_mec: offloaded * p.cycles_per_bit / p.f_mec_hz(),
        t_ua: (1.0 - plan.eta_a) * p.task_a_bits * p.cycles_per_bit / p.f_user_hz,
        t_ub: (1.0 - plan.eta_b) * p.task_b_bits * p.cycles_per_bit / p.f_user_hz,
    }
}

/// Closed-form optimal plan.
///
/// When both users can finish locally within `T` (the larger task decides)
/// nothing is offloaded. Otherwise the plan fills `T` and makes the MEC
/// server and both users finish at the same instant:
///
/// ```text
/// eta_a = ((N+1) M_a - M_b) / ((N+2) M_a)
/// eta_b = ((N+1) M_b - M_a) / ((N+2) M_b)
/// t3    = (M_a + M_b) C / ((N+2) f_user),   t2 = T - t3
/// ```
///
/// This needs `1/N < M_a/M_b < N+1` and `M_a + M_b < (N+2) f_user T / C`;
/// boundary cases are rejected too since they leave no interior plan.
///
/// The plan is optimal when each task alone overruns `T` locally. If one
/// of them fits, keeping that user local with a shorter `t2` can do better.
pub fn optimal_offload_plan(p: &SystemParams) -> Result<OffloadPlan> {
    let p = p.validated()?;
    let local_rate = p.f_user_hz / p.cycles_per_bit;
    let largest_local = p.task_a_bits.max(p.task_b_bits) / local_rate;
    if largest_local <= p.latency_budget_s {
        return Ok(OffloadPlan {
            eta_a: 0.0,
            eta_b: 0.0,
            t2: 0.0,
            t3: largest_local,
        });
    }
    equal_finish_plan(&p)
}

/// The equal-finishing-time plan on its own, without the all-local shortcut.
pub fn equal_finish_plan(p: &SystemParams) -> Result<OffloadPlan> {
    let p = p.validated()?;
    let (ma, mb) = (p.task_a_bits, p.task_b_bits);
    let n = p.mec_cpu_ratio;
    let local_rate = p.f_user_hz / p.cycles_per_bit;

    let eta_a = ((n + 1.0) * ma - mb) / ((n + 2.0) * ma);
    let eta_b = ((n + 1.0) * mb - ma) / ((n + 2.0) * mb);
    let t3 = (ma + mb) / ((n + 2.0) * local_rate);
    let t2 = p.latency_budget_s - t3;

    let mut why = Vec::new();
    let ratio = ma / mb;
    let sign = |x: f64| if x < 0.0 { "negative" } else { "zero" };
    if !(ratio > 1.0 / n) {
        why.push(format!(
            "1/N < M_a/M_b violated (M_a/M_b = {ratio}, 1/N = {}): eta_a* = {eta_a} would be {}",
            1.0 / n,
            sign(eta_a)
        ));
    }
    if !(ratio < n + 1.0) {
        why.push(format!(
            "M_a/M_b < N+1 violated (M_a/M_b = {ratio}, N+1 = {}): eta_b* = {eta_b} would be {}",
            n + 1.0,
            sign(eta_b)
        ));
    }
    let capacity = (n + 2.0) * local_rate * p.latency_budget_s;
    if !(ma + mb < capacity) {
        why.push(format!(
            "M_a + M_b < (N+2) f_user T / C violated ({} >= {capacity}): t2* = {t2} would be {}",
            ma + mb,
            sign(t2)
        ));
    }
    if !why.is_empty() {
        return Err(Error::Infeasible(why));
    }
    Ok(OffloadPlan { eta_a, eta_b, t2, t3 })
}

/// Closed-form success probability of an arbitrary plan; zero if it misses
/// a deadline.
pub fn plan_ps(p: &SystemParams, plan: &OffloadPlan) -> Result<PsBreakdown> {
    if !execution_times(plan, p).within(plan.t3) {
        return Ok(PsBreakdown {
            ps_case1: 0.0,
            ps_case2: 0.0,
            ps_case3: 0.0,
            ps_total: 0.0,
        });
    }
    let t = plan.targets(p)?;
    analytics::ps_breakdown(p.rho_a(), p.rho_b(), t.eps_a, t.eps_b)
}

/// What the grid search maximizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridObjective {
    ClosedForm,
    /// End-to-end check through the simulator; slow.
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum {
    pub plan: OffloadPlan,
    pub ps: f64,
    pub evaluated: usize,
    pub feasible: usize,
}

fn better(a: &(f64, OffloadPlan), b: &(f64, OffloadPlan)) -> bool {
    let key = |x: &(f64, OffloadPlan)| (x.1.eta_a, x.1.eta_b, x.1.t2);
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            let (ka, kb) = (key(a), key(b));
            (ka.0, ka.1, ka.2).partial_cmp(&(kb.0, kb.1, kb.2)) == Some(std::cmp::Ordering::Less)
        }
    }
}

/// Exhaustive search over `eta_a, eta_b ∈ {0, 1/(n-1), .., 1}` and
/// `t2 = T j/(n+1)`, `j = 1..=n`, with `t3 = T - t2`. Points that miss a
/// deadline are skipped. Ties go to the lexicographically smallest
/// `(eta_a, eta_b, t2)`, so the answer does not depend on thread count.
pub fn grid_search_oracle(p: &SystemParams, resolution: usize, objective: GridObjective) -> Result<GridOptimum> {
    let p = p.validated()?;
    if resolution < 20 {
        return Err(Error::Config(format!(
            "grid resolution must be >= 20, got {resolution}"
        )));
    }
    let n = resolution;
    let eta = |i: usize| i as f64 / (n - 1) as f64;
    let t_budget = p.latency_budget_s;

    type RowBest = (Option<(f64, OffloadPlan)>, usize);
    let per_row: Vec<Result<RowBest>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, OffloadPlan)> = None;
            let mut feasible = 0;
            for j in 0..n {
                for k in 1..=n {
                    let t2 = t_budget * k as f64 / (n + 1) as f64;
                    let plan = OffloadPlan {
                        eta_a: eta(i),
                        eta_b: eta(j),
                        t2,
                        t3: t_budget - t2,
                    };
                    if !execution_times(&plan, &p).within(plan.t3) {
                        continue;
                    }
                    feasible += 1;
                    let ps = match objective {
                        GridObjective::ClosedForm => plan_ps(&p, &plan)?.ps_total,
                        GridObjective::MonteCarlo { trials, seed } => {
                            montecarlo::estimate_psucc(&p, &plan, Scheme::Rsma, trials, seed)?.mean
                        }
                    };
                    let cand = (ps, plan);
                    if best.as_ref().is_none_or(|b| better(&cand, b)) {
                        best = Some(cand);
                    }
                }
            }
            Ok((best, feasible))
        })
        .collect();

    let mut best: Option<(f64, OffloadPlan)> = None;
    let mut feasible = 0;
    for row in per_row {
        let (b, f) = row?;
        feasible += f;
        if let Some(c) = b {
            if best.as_ref().is_none_or(|x| better(&c, x)) {
                best = Some(c);
            }
        }
    }
    match best {
        Some((ps, plan)) => Ok(GridOptimum {
            plan,
            ps,
            evaluated: n * n * n,
            feasible,
        }),
        None => Err(Error::Infeasible(vec![format!(
            "no grid point meets the deadlines ({n}^3 points searched)"
        )])),
    }
}
