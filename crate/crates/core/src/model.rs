//! Physical link parameters and the quantities derived from them.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Largest supported m_I·n (and m_S); bounds the length of every finite sum.
pub const MAX_SERIES_ORDER: u32 = 64;

/// σ² below this fraction of Ω_I is treated as exactly zero.
pub const DEGENERACY_RATIO: f64 = 1e-12;

/// All physical parameters of the link. Powers share one arbitrary unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// Nakagami severity of the desired signal.
    #[serde(rename = "m_S", alias = "m_s")]
    pub m_s: u32,
    /// Nakagami severity of each interferer.
    #[serde(rename = "m_I", alias = "m_i")]
    pub m_i: u32,
    /// Average desired fading power per branch.
    #[serde(rename = "omega_S", alias = "omega_s")]
    pub omega_s: f64,
    /// Average fading power per interferer per branch.
    #[serde(rename = "omega_I", alias = "omega_i")]
    pub omega_i: f64,
    pub sigma2: f64,
    /// Number of cochannel interferers.
    pub n: u32,
    /// Maximum Doppler spread of the desired signals, Hz.
    pub f_m0: f64,
    /// Maximum Doppler spread of the interferers, Hz.
    pub f_mi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    General,
    InterferenceLimited,
    NoiseLimited,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::General => "general",
            Regime::InterferenceLimited => "interference-limited",
            Regime::NoiseLimited => "noise-limited",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Ω_S m_I / (Ω_I m_S); infinite without interference.
    pub mu: f64,
    /// σ² m_I / Ω_I; infinite without interference.
    pub c: f64,
    /// Variance of the desired envelope derivative, (π f_m0)² Ω_S/m_S.
    pub var_dx0: f64,
    /// Variance of each interferer envelope derivative, (π f_mi)² Ω_I/m_I.
    pub var_dwi: f64,
    pub regime: Regime,
}

impl DerivedParams {
    /// Natural unit for SINR thresholds: μ with interference, Ω_S/σ² without.
    pub fn threshold_scale(&self, cfg: &SystemConfig) -> f64 {
        match self.regime {
            Regime::NoiseLimited => cfg.omega_s / cfg.sigma2,
            _ => self.mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{0}")]
    Domain(String),
}

impl SystemConfig {
    /// Every violated invariant, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.m_s < 1 {
            v.push("m_S must be at least 1".to_string());
        }
        if self.m_i < 1 {
            v.push("m_I must be at least 1".to_string());
        }
        if self.n < 1 {
            v.push("n must be at least 1".to_string());
        }
        if self.m_s > MAX_SERIES_ORDER {
            v.push(format!("m_S = {} exceeds {MAX_SERIES_ORDER}", self.m_s));
        }
        if (self.m_i as u64) * (self.n as u64) > MAX_SERIES_ORDER as u64 {
            v.push(format!("m_I·n = {} exceeds {MAX_SERIES_ORDER}", self.m_i as u64 * self.n as u64));
        }
        if !(self.omega_s > 0.0 && self.omega_s.is_finite()) {
            v.push(format!("omega_S must be positive and finite, got {}", self.omega_s));
        }
        if !(self.omega_i >= 0.0 && self.omega_i.is_finite()) {
            v.push(format!("omega_I must be nonnegative and finite, got {}", self.omega_i));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            v.push(format!("sigma2 must be nonnegative and finite, got {}", self.sigma2));
        }
        if self.omega_i == 0.0 && self.sigma2 == 0.0 {
            v.push("omega_I and sigma2 cannot both be zero".to_string());
        }
        if !(self.f_m0 > 0.0 && self.f_m0.is_finite()) {
            v.push(format!("f_m0 must be positive and finite, got {}", self.f_m0));
        }
        if !(self.f_mi > 0.0 && self.f_mi.is_finite()) {
            v.push(format!("f_mi must be positive and finite, got {}", self.f_mi));
        }
        v
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(v))
        }
    }

    pub fn regime(&self) -> Regime {
        if self.omega_i == 0.0 {
            Regime::NoiseLimited
        } else if self.sigma2 < DEGENERACY_RATIO * self.omega_i {
            Regime::InterferenceLimited
        } else {
            Regime::General
        }
    }

    /// m_I·n, the effective severity of the aggregate interference.
    pub fn interference_order(&self) -> u32 {
        self.m_i * self.n
    }

    /// Same link with every power multiplied by `k`.
    pub fn scaled(&self, k: f64) -> SystemConfig {
        SystemConfig { omega_s: self.omega_s * k, omega_i: self.omega_i * k, sigma2: self.sigma2 * k, ..*self }
    }
}

pub fn derive(cfg: &SystemConfig) -> Result<DerivedParams, ModelError> {
    cfg.validate()?;
    let regime = cfg.regime();
    let ms = cfg.m_s as f64;
    let mi = cfg.m_i as f64;
    let (mu, c) = if regime == Regime::NoiseLimited {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (cfg.omega_s * mi / (cfg.omega_i * ms), cfg.sigma2 * mi / cfg.omega_i)
    };
    Ok(DerivedParams {
        mu,
        c,
        var_dx0: (PI * cfg.f_m0).powi(2) * cfg.omega_s / ms,
        var_dwi: (PI * cfg.f_mi).powi(2) * cfg.omega_i / mi,
        regime,
    })
}

/// Rescale all powers so that σ² = 1 (Ω_S → γ_S, Ω_I → γ_I).
pub fn normalize_to_unit_noise(cfg: &SystemConfig) -> Result<SystemConfig, ModelError> {
    if !(cfg.sigma2 > 0.0) {
        return Err(ModelError::Domain(format!(
            "normalization needs a positive noise power, got sigma2 = {}",
            cfg.sigma2
        )));
    }
    if cfg.sigma2 == 1.0 {
        return Ok(*cfg);
    }
    Ok(SystemConfig {
        omega_s: cfg.omega_s / cfg.sigma2,
        omega_i: cfg.omega_i / cfg.sigma2,
        sigma2: 1.0,
        ..*cfg
    })
}

/// Linear power ratio from decibels.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
