//! Monte Carlo fading simulator: independent sum-of-sinusoids Nakagami
//! envelopes, desired-power selection per sample, and empirical crossing
//! statistics of the selected SINR envelope ratio.

mod export;
mod measure;
mod process;
mod validate;

pub use export::{read_binary, write_binary, write_csv, TRACE_MAGIC, TRACE_VERSION};
pub use measure::{measure_series, measure_trace, tally, CrossingTally, EmpiricalStats, BATCHES};
pub use process::{gen_gaussian_process, gen_nakagami_envelope};
pub use validate::{compare, validation_thresholds, Comparison, ThresholdRow, ValidationReport, Verdict, MIN_UPCROSSINGS, OUTAGE_WINDOW};

use crate::analytic::AnalyticError;
use crate::model::{ModelError, SystemConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Longest trace, in samples, that `simulate` will allocate.
pub const MAX_SAMPLES: f64 = 1e8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error("{0}")]
    Empty(String),
    #[error("trace format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Hz.
    pub sample_rate: f64,
    /// Seconds measured after the warmup.
    pub duration: f64,
    /// Sinusoids per Gaussian process.
    pub num_sinusoids: usize,
    pub seed: u64,
    /// Seconds generated and discarded before measuring.
    pub warmup: f64,
}

impl SimulationConfig {
    /// 64·f_m0 sampling, 64 sinusoids and 5/f_m0 of warmup.
    pub fn for_link(cfg: &SystemConfig, duration: f64, seed: u64) -> Self {
        SimulationConfig { sample_rate: 64.0 * cfg.f_m0, duration, num_sinusoids: 64, seed, warmup: 5.0 / cfg.f_m0 }
    }

    pub fn violations(&self, cfg: &SystemConfig) -> Vec<String> {
        let mut v = Vec::new();
        let fmax = cfg.f_m0.max(cfg.f_mi);
        if !(self.sample_rate.is_finite() && self.sample_rate >= 32.0 * fmax) {
            v.push(format!("sample_rate {} must be at least 32·max(f_m0, f_mi) = {}", self.sample_rate, 32.0 * fmax));
        }
        if self.num_sinusoids < 32 {
            v.push(format!("num_sinusoids {} must be at least 32", self.num_sinusoids));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            v.push(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.warmup >= 0.0 && self.warmup.is_finite()) {
            v.push(format!("warmup must be nonnegative, got {}", self.warmup));
        }
        if v.is_empty() && (self.duration + self.warmup) * self.sample_rate > MAX_SAMPLES {
            v.push(format!(
                "{:.3e} samples exceed the limit of {MAX_SAMPLES:e}",
                (self.duration + self.warmup) * self.sample_rate
            ));
        }
        v
    }

    pub fn validate(&self, cfg: &SystemConfig) -> Result<(), SimError> {
        cfg.validate()?;
        let v = self.violations(cfg);
        if v.is_empty() {
            Ok(())
        } else {
            Err(SimError::Invalid(v))
        }
    }

    fn warmup_samples(&self) -> usize {
        (self.warmup * self.sample_rate).round() as usize
    }

    /// Samples kept after the warmup.
    pub fn kept_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize + 1
    }
}

/// Sampled envelopes of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingTrace {
    /// Seconds between samples.
    pub time_step: f64,
    /// x₀₁(t), x₀₂(t).
    pub desired: [Vec<f64>; 2],
    /// w_ik(t) for interferer i on branches k = 1, 2; empty without interference.
    pub interferers: Vec<[Vec<f64>; 2]>,
    /// g(t) = x₀(t)/y(t) on the selected branch.
    pub selected_ratio: Vec<f64>,
    /// 1 or 2.
    pub selected_branch: Vec<u8>,
}

impl FadingTrace {
    pub fn len(&self) -> usize {
        self.selected_ratio.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected_ratio.is_empty()
    }
}

/// Random-number stream of one envelope process.
fn envelope_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates the 2 desired and 2n interferer envelopes and applies
/// desired-power selection.
pub fn simulate(cfg: &SystemConfig, sim: &SimulationConfig) -> Result<FadingTrace, SimError> {
    simulate_streams(cfg, sim, [0, 1])
}

/// [`simulate`] with an explicit stream index for each branch; `[1, 0]`
/// relabels the branches.
pub fn simulate_streams(cfg: &SystemConfig, sim: &SimulationConfig, branch_streams: [u64; 2]) -> Result<FadingTrace, SimError> {
    sim.validate(cfg)?;
    let skip = sim.warmup_samples();
    let keep = sim.kept_samples();
    let length = skip + keep;
    let gen = |m: u32, omega: f64, f_m: f64, stream: u64| {
        let mut rng = envelope_stream(sim.seed, stream);
        let mut v = gen_nakagami_envelope(m, omega, f_m, length, sim.sample_rate, sim.num_sinusoids, &mut rng);
        v.drain(..skip);
        v
    };
    let mut jobs: Vec<(u32, f64, f64, u64)> =
        branch_streams.iter().map(|&s| (cfg.m_s, cfg.omega_s, cfg.f_m0, s)).collect();
    let n = if cfg.omega_i > 0.0 { cfg.n as u64 } else { 0 };
    for i in 0..n {
        for &s in &branch_streams {
            jobs.push((cfg.m_i, cfg.omega_i, cfg.f_mi, 2 + 2 * i + s));
        }
    }
    let mut series: Vec<Vec<f64>> = jobs.par_iter().map(|&(m, o, f, s)| gen(m, o, f, s)).collect();

    let mut interferers = Vec::with_capacity(n as usize);
    let rest = series.split_off(2);
    let mut it = rest.into_iter();
    while let (Some(a), Some(b)) = (it.next(), it.next()) {
        interferers.push([a, b]);
    }
    let x2 = series.pop().expect("two branches");
    let x1 = series.pop().expect("two branches");

    let mut selected_ratio = Vec::with_capacity(keep);
    let mut selected_branch = Vec::with_capacity(keep);
    for t in 0..keep {
        let k = if x2[t] > x1[t] { 1 } else { 0 };
        let x0 = if k == 0 { x1[t] } else { x2[t] };
        let y2 = cfg.sigma2 + interferers.iter().map(|w: &[Vec<f64>; 2]| w[k][t] * w[k][t]).sum::<f64>();
        selected_ratio.push(x0 / y2.sqrt());
        selected_branch.push(k as u8 + 1);
    }
    Ok(FadingTrace { time_step: 1.0 / sim.sample_rate, desired: [x1, x2], interferers, selected_ratio, selected_branch })
}
