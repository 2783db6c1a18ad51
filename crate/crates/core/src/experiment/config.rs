use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{Scheme, MIN_TRIALS};
use crate::system_model::{dbm_to_watts, watts_to_dbm, SystemParams};

/// Sweep axis of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// SU task size `M_b` in bits, PU task fixed.
    TaskLength,
    /// Common transmit power `P_a = P_b` in dBm.
    Power,
    /// Fixed offloading phase; user CPU frequency (Hz) and then MEC/user
    /// CPU ratio are varied and the resulting budget `T = t2 + t3` reported.
    LatencyStudy,
    /// The configured scenario only.
    Point,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "task_length" => Ok(SweepAxis::TaskLength),
            "power" => Ok(SweepAxis::Power),
            "latency_study" => Ok(SweepAxis::LatencyStudy),
            "point" => Ok(SweepAxis::Point),
            other => Err(format!(
                "unknown sweep '{other}' (task_length, power, latency_study, point)"
            )),
        }
    }
}

/// A row source: a simulated scheme or the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeSpec {
    Simulated(Scheme),
    Analytic,
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Simulated(s) => s.fmt(f),
            SchemeSpec::Analytic => f.write_str("analytic"),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("analytic") {
            Ok(SchemeSpec::Analytic)
        } else {
            s.parse().map(SchemeSpec::Simulated)
        }
    }
}

impl TryFrom<String> for SchemeSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SchemeSpec> for String {
    fn from(s: SchemeSpec) -> String {
        s.to_string()
    }
}

pub fn parse_scheme_list(list: &str) -> Result<Vec<SchemeSpec>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse().map_err(Error::Config))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Flat experiment configuration. Key names carry their units. Every key
/// is optional; missing ones take the reference-scenario defaults.
///
/// ```toml
/// task_a_bits = 20000
/// power_a_dbm = 20
/// power_b_dbm = 20
/// sweep = "task_length"
/// sweep_values = [5000, 7000, 9000, 11000]
/// schemes = ["RSMA", "NOMA_PU_first", "analytic"]
/// trials = 1000000
/// seed = 7
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub bandwidth_hz: f64,
    pub cycles_per_bit: f64,
    pub mec_cpu_ratio: f64,
    pub latency_budget_s: f64,
    pub distance_a_m: f64,
    pub distance_b_m: f64,
    pub pathloss_exponent: f64,
    pub f_user_hz: f64,
    pub power_a_dbm: f64,
    pub power_b_dbm: f64,
    pub noise_power_w: f64,
    pub task_a_bits: f64,
    pub task_b_bits: f64,

    pub sweep: SweepAxis,
    /// Axis values; for `latency_study` these are user CPU frequencies in Hz.
    pub sweep_values: Vec<f64>,
    /// MEC/user CPU ratios for the second half of `latency_study`.
    pub latency_n_values: Vec<f64>,
    pub schemes: Vec<SchemeSpec>,
    pub trials: u64,
    pub seed: u64,

    /// Where to write results; not echoed into the output header.
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub format: Option<OutputFormat>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        ExperimentConfig {
            bandwidth_hz: p.bandwidth_hz,
            cycles_per_bit: p.cycles_per_bit,
            mec_cpu_ratio: p.mec_cpu_ratio,
            latency_budget_s: p.latency_budget_s,
            distance_a_m: p.distance_a_m,
            distance_b_m: p.distance_b_m,
            pathloss_exponent: p.pathloss_exponent,
            f_user_hz: p.f_user_hz,
            power_a_dbm: watts_to_dbm(p.power_a_w).round(),
            power_b_dbm: watts_to_dbm(p.power_b_w).round(),
            noise_power_w: p.noise_power_w,
            task_a_bits: p.task_a_bits,
            task_b_bits: p.task_b_bits,
            sweep: SweepAxis::TaskLength,
            sweep_values: Vec::new(),
            latency_n_values: Vec::new(),
            schemes: vec![
                SchemeSpec::Simulated(Scheme::Rsma),
                SchemeSpec::Simulated(Scheme::Noma(crate::noma::SicOrder::PuFirst)),
                SchemeSpec::Simulated(Scheme::Noma(crate::noma::SicOrder::SuFirst)),
                SchemeSpec::Analytic,
            ],
            trials: 100_000,
            seed: 1,
            output: None,
            format: None,
        }
    }
}

fn default_values(axis: SweepAxis) -> Vec<f64> {
    match axis {
        // M_b = 1..=11 kbit
        SweepAxis::TaskLength => (1..=11).map(|k| k as f64 * 1e3).collect(),
        // 0..=40 dBm
        SweepAxis::Power => (0..=8).map(|k| k as f64 * 5.0).collect(),
        // 0.25..=2 GHz
        SweepAxis::LatencyStudy => (1..=8).map(|k| k as f64 * 0.25e9).collect(),
        SweepAxis::Point => Vec::new(),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            bandwidth_hz: self.bandwidth_hz,
            cycles_per_bit: self.cycles_per_bit,
            mec_cpu_ratio: self.mec_cpu_ratio,
            latency_budget_s: self.latency_budget_s,
            distance_a_m: self.distance_a_m,
            distance_b_m: self.distance_b_m,
            pathloss_exponent: self.pathloss_exponent,
            f_user_hz: self.f_user_hz,
            power_a_w: dbm_to_watts(self.power_a_dbm),
            power_b_w: dbm_to_watts(self.power_b_dbm),
            noise_power_w: self.noise_power_w,
            task_a_bits: self.task_a_bits,
            task_b_bits: self.task_b_bits,
        }
    }

    pub fn needs_simulation(&self) -> bool {
        self.schemes.iter().any(|s| matches!(s, SchemeSpec::Simulated(_)))
    }

    /// Fills default sweep values and checks everything, returning the
    /// fully resolved configuration echoed into outputs.
    pub fn resolve(mut self) -> Result<Self> {
        if self.sweep_values.is_empty() {
            self.sweep_values = default_values(self.sweep);
        }
        if self.sweep == SweepAxis::LatencyStudy && self.latency_n_values.is_empty() {
            self.latency_n_values = (2..=10).map(f64::from).collect();
        }
        if self.sweep != SweepAxis::LatencyStudy {
            self.latency_n_values.clear();
        }
        if self.sweep == SweepAxis::Point {
            self.sweep_values.clear();
        }

        let mut why = Vec::new();
        if self.schemes.is_empty() {
            why.push("schemes list is empty".to_string());
        }
        let mut seen = Vec::new();
        for s in &self.schemes {
            if seen.contains(s) {
                why.push(format!("scheme {s} listed twice"));
            }
            seen.push(*s);
        }
        for (name, vals) in [
            ("sweep_values", &self.sweep_values),
            ("latency_n_values", &self.latency_n_values),
        ] {
            if vals.windows(2).any(|w| !(w[0] < w[1])) || vals.iter().any(|v| !v.is_finite()) {
                why.push(format!("{name} must be finite and strictly increasing"));
            }
        }
        if self.needs_simulation() && self.trials < MIN_TRIALS {
            why.push(format!(
                "trials must be >= {MIN_TRIALS} for simulated schemes, got {}",
                self.trials
            ));
        }
        if let Err(v) = self.system_params().validate() {
            why.extend(v.into_iter().map(|x| x.0));
        }
        if why.is_empty() {
            Ok(self)
        } else {
            Err(Error::Config(why.join("; ")))
        }
    }
}
