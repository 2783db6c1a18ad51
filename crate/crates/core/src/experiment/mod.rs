//! Parameter sweeps over the offloading scenario and their result tables.

mod config;
mod output;

pub use config::{parse_scheme_list, ExperimentConfig, OutputFormat, SchemeSpec, SweepAxis};
pub use output::{emit_results, write_csv, write_json};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::estimate_psucc;
use crate::optimizer::{equal_finish_plan, optimal_offload_plan, plan_ps, OffloadPlan};
use crate::rsma::Case;
use crate::system_model::{dbm_to_watts, SystemParams};

/// One `(sweep point, scheme)` result.
///
/// Fields that do not apply are `None` (an empty CSV cell). Points without
/// a feasible plan carry `NaN` in every numeric field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub scheme: String,
    pub ps_mean: Option<f64>,
    pub ps_stderr: Option<f64>,
    pub ps_analytic: Option<f64>,
    pub eta_a: Option<f64>,
    pub eta_b: Option<f64>,
    pub t2: Option<f64>,
    pub t3: Option<f64>,
    pub case1_frac: Option<f64>,
    pub case2_frac: Option<f64>,
    pub case3_frac: Option<f64>,
    pub seed: u64,
    pub trials: u64,
}

impl ResultRow {
    pub fn is_infeasible(&self) -> bool {
        self.eta_a.is_some_and(f64::is_nan)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfeasiblePoint {
    pub sweep_axis: String,
    pub sweep_value: f64,
    pub reason: String,
}

/// Reproducibility record written ahead of the rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultHeader {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub infeasible: Vec<InfeasiblePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub header: ResultHeader,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn all_infeasible(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(ResultRow::is_infeasible)
    }
}

struct SweepPoint {
    axis: &'static str,
    value: f64,
    params: SystemParams,
    plan: Result<OffloadPlan>,
}

fn sweep_points(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    let base = cfg.system_params();
    let planned = |axis, value, params: SystemParams| SweepPoint {
        axis,
        value,
        plan: optimal_offload_plan(&params),
        params,
    };
    Ok(match cfg.sweep {
        SweepAxis::Point => vec![planned("point", 0.0, base)],
        SweepAxis::TaskLength => cfg
            .sweep_values
            .iter()
            .map(|&v| planned("task_b_bits", v, SystemParams { task_b_bits: v, ..base }))
            .collect(),
        SweepAxis::Power => cfg
            .sweep_values
            .iter()
            .map(|&v| {
                let w = dbm_to_watts(v);
                planned(
                    "power_dbm",
                    v,
                    SystemParams {
                        power_a_w: w,
                        power_b_w: w,
                        ..base
                    },
                )
            })
            .collect(),
        SweepAxis::LatencyStudy => {
            // t2 is pinned at the reference scenario's optimum
            let reference = optimal_offload_plan(&base)
                .map_err(|e| Error::Config(format!("latency_study needs an offloading reference plan: {e}")))?;
            if reference.is_local_only() {
                return Err(Error::Config(
                    "latency_study reference scenario computes everything locally".into(),
                ));
            }
            let t2 = reference.t2;
            let mut pts = Vec::new();
            let mut push = |axis, value, params: SystemParams| {
                let t3 = (params.task_a_bits + params.task_b_bits) * params.cycles_per_bit
                    / ((params.mec_cpu_ratio + 2.0) * params.f_user_hz);
                let params = SystemParams {
                    latency_budget_s: t2 + t3,
                    ..params
                };
                let plan = equal_finish_plan(&params).map(|pl| OffloadPlan { t2, ..pl });
                pts.push(SweepPoint {
                    axis,
                    value,
                    params,
                    plan,
                });
            };
            for &f in &cfg.sweep_values {
                push("f_user_hz", f, SystemParams { f_user_hz: f, ..base });
            }
            for &n in &cfg.latency_n_values {
                push(
                    "mec_cpu_ratio",
                    n,
                    SystemParams {
                        mec_cpu_ratio: n,
                        ..base
                    },
                );
            }
            pts
        }
    })
}

/// Runs every requested scheme at every sweep point, in sweep order.
pub fn run_experiment(cfg: ExperimentConfig) -> Result<ResultTable> {
    let cfg = cfg.resolve()?;
    let points = sweep_points(&cfg)?;
    let mut rows = Vec::with_capacity(points.len() * cfg.schemes.len());
    let mut infeasible = Vec::new();

    for pt in &points {
        let plan = match &pt.plan {
            Ok(plan) => plan,
            Err(e @ Error::Infeasible(_)) | Err(e @ Error::InvalidParams(_)) => {
                infeasible.push(InfeasiblePoint {
                    sweep_axis: pt.axis.to_string(),
                    sweep_value: pt.value,
                    reason: e.to_string(),
                });
                for s in &cfg.schemes {
                    let nan = Some(f64::NAN);
                    rows.push(ResultRow {
                        sweep_axis: pt.axis.to_string(),
                        sweep_value: pt.value,
                        scheme: s.to_string(),
                        ps_mean: nan,
                        ps_stderr: nan,
                        ps_analytic: nan,
                        eta_a: nan,
                        eta_b: nan,
                        t2: nan,
                        t3: nan,
                        case1_frac: nan,
                        case2_frac: nan,
                        case3_frac: nan,
                        seed: cfg.seed,
                        trials: 0,
                    });
                }
                continue;
            }
            Err(e) => return Err(Error::Config(e.to_string())),
        };
        let analytic = plan_ps(&pt.params, plan)?.ps_total;
        for s in &cfg.schemes {
            let mut row = ResultRow {
                sweep_axis: pt.axis.to_string(),
                sweep_value: pt.value,
                scheme: s.to_string(),
                ps_mean: None,
                ps_stderr: None,
                ps_analytic: None,
                eta_a: Some(plan.eta_a),
                eta_b: Some(plan.eta_b),
                t2: Some(plan.t2),
                t3: Some(plan.t3),
                case1_frac: None,
                case2_frac: None,
                case3_frac: None,
                seed: cfg.seed,
                trials: 0,
            };
            match s {
                SchemeSpec::Analytic => row.ps_analytic = Some(analytic),
                SchemeSpec::Simulated(scheme) => {
                    let est = estimate_psucc(&pt.params, plan, *scheme, cfg.trials, cfg.seed)?;
                    row.ps_mean = Some(est.mean);
                    row.ps_stderr = Some(est.std_err);
                    row.trials = est.trials;
                    if *scheme == crate::montecarlo::Scheme::Rsma {
                        row.ps_analytic = Some(analytic);
                        row.case1_frac = Some(est.case_fraction(Case::I));
                        row.case2_frac = Some(est.case_fraction(Case::II));
                        row.case3_frac = Some(est.case_fraction(Case::III));
                    }
                }
            }
            rows.push(row);
        }
    }

    Ok(ResultTable {
        header: ResultHeader {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg,
            infeasible,
        },
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic_only(sweep: SweepAxis) -> ExperimentConfig {
        ExperimentConfig {
            sweep,
            task_a_bits: 20e3,
            schemes: vec![SchemeSpec::Analytic],
            ..Default::default()
        }
    }

    #[test]
    fn task_length_sweep_has_a_row_per_point() {
        let t = run_experiment(analytic_only(SweepAxis::TaskLength)).unwrap();
        assert_eq!(t.rows.len(), 11);
        // M_b = 1 and 3 kbit break the task-ratio condition at N = 5
        let bad: Vec<f64> = t
            .rows
            .iter()
            .filter(|r| r.is_infeasible())
            .map(|r| r.sweep_value)
            .collect();
        assert_eq!(bad, vec![1e3, 2e3, 3e3]);
        assert_eq!(t.header.infeasible.len(), 3);
        assert!(!t.all_infeasible());
        // fewer SU bits help
        let ps: Vec<f64> = t
            .rows
            .iter()
            .filter(|r| !r.is_infeasible())
            .map(|r| r.ps_analytic.unwrap())
            .collect();
        assert!(ps.windows(2).all(|w| w[0] >= w[1]), "{ps:?}");
    }

    #[test]
    fn power_sweep_is_increasing() {
        let t = run_experiment(ExperimentConfig {
            task_b_bits: 6e3,
            ..analytic_only(SweepAxis::Power)
        })
        .unwrap();
        let ps: Vec<f64> = t.rows.iter().map(|r| r.ps_analytic.unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[0] <= w[1]), "{ps:?}");
    }

    #[test]
    fn latency_study_trades_cpu_for_budget() {
        let cfg = ExperimentConfig {
            sweep: SweepAxis::LatencyStudy,
            schemes: vec![SchemeSpec::Analytic],
            ..Default::default()
        };
        let t = run_experiment(cfg).unwrap();
        let f_rows: Vec<&ResultRow> = t.rows.iter().filter(|r| r.sweep_axis == "f_user_hz").collect();
        assert_eq!(f_rows.len(), 8);
        let budget = |r: &ResultRow| r.t2.unwrap() + r.t3.unwrap();
        assert!(f_rows.windows(2).all(|w| budget(w[1]) < budget(w[0])));
        assert!(f_rows.iter().all(|r| r.ps_analytic == f_rows[0].ps_analytic));
        assert!(f_rows.iter().all(|r| r.t2 == f_rows[0].t2));
        let n_rows: Vec<&ResultRow> = t.rows.iter().filter(|r| r.sweep_axis == "mec_cpu_ratio").collect();
        assert_eq!(n_rows.len(), 9);
        assert!(n_rows.windows(2).all(|w| w[1].eta_a.unwrap() > w[0].eta_a.unwrap()));
    }

    #[test]
    fn analytic_only_is_fast() {
        let start = std::time::Instant::now();
        let mut cfg = analytic_only(SweepAxis::Power);
        cfg.sweep_values = (0..=40).map(f64::from).collect();
        run_experiment(cfg).unwrap();
        assert!(start.elapsed().as_secs_f64() < 1.0);
    }

    #[test]
    fn all_infeasible_is_detected() {
        let cfg = ExperimentConfig {
            sweep_values: vec![1e3, 2e3],
            ..analytic_only(SweepAxis::TaskLength)
        };
        assert!(run_experiment(cfg).unwrap().all_infeasible());
    }
}
