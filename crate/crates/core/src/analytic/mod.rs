//! Closed-form statistics of the selection-combined SINR: densities, outage
//! probability, level crossing rate and average fade duration.
//!
//! Thresholds named `z` are SINR (power) thresholds; `g` is the envelope
//! ratio, g = √z. Every entry point dispatches on the regime of the link:
//! general (noise and interference), interference-limited (σ² negligible
//! against Ω_I) or noise-limited (no interference).

mod curve;
mod envelope;
mod finite_sum;
mod lcr;
mod moments;
mod ratio;

pub use curve::{default_grid, log_grid, sweep, sweep_interferers, Axis, CurveGap, Normalization, StatCurve, Statistic};
pub use envelope::{
    interference_envelope_pdf, interference_plus_noise_pdf, nakagami_cdf, nakagami_pdf, nakagami_sf,
    selected_envelope_cdf, selected_envelope_pdf,
};
pub use lcr::{
    lcr_awgn_only, lcr_general, lcr_general_quadrature, lcr_sinr, lcr_sinr_routed, lcr_sir, lcr_sir_equal_doppler,
    lcr_sir_series, YDensity,
};
pub use ratio::{
    envelope_ratio_pdf, envelope_ratio_pdf_quadrature, envelope_ratio_pdf_routed, series_integral_identity, series_integral_identity_routed, sinr_pdf,
    sir_cdf, sir_envelope_ratio_pdf, sir_envelope_ratio_pdf_series, CdfRoute, SirCdf,
};

use crate::model::{derive, DerivedParams, ModelError, Regime, SystemConfig};
use crate::specfun::{QuadError, QuadratureSpec, SpecialError};
use thiserror::Error;

/// Largest accepted rounding-error estimate of the finite sums before the
/// moment expansion takes over.
pub(crate) const FINITE_SUM_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("quadrature: {0}")]
    Quadrature(#[from] QuadError),
    #[error("{operation} applies to {expected} links, this one is {actual}")]
    Regime { operation: &'static str, expected: Regime, actual: Regime },
    #[error("{0}")]
    Domain(String),
}

/// Which evaluation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalRoute {
    /// The finite incomplete-gamma double sum.
    FiniteSum,
    /// The positive moment expansion used when the finite sum cancels.
    ShiftedMoments,
    /// A regime-specific closed form (no cancellation issues).
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub route: EvalRoute,
}

impl Evaluated {
    pub(crate) fn closed(value: f64) -> Self {
        Evaluated { value, route: EvalRoute::ClosedForm }
    }
}

pub(crate) fn require_regime(
    cfg: &SystemConfig,
    expected: Regime,
    operation: &'static str,
) -> Result<DerivedParams, AnalyticError> {
    let d = derive(cfg)?;
    if d.regime != expected {
        return Err(AnalyticError::Regime { operation, expected, actual: d.regime });
    }
    Ok(d)
}

/// Outage probability F_z(z) = P(SINR < z).
///
/// With noise and interference the ratio density is integrated over
/// [0, √z], or over [√z, ∞) and complemented once the lower integral
/// passes one half, so values near 1 keep their ordering. The limiting
/// regimes use their closed forms.
pub fn outage_probability(z: f64, cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    if !(z >= 0.0) {
        return Err(AnalyticError::Domain(format!("outage_probability: threshold must be nonnegative, got {z}")));
    }
    let d = derive(cfg)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    match d.regime {
        Regime::InterferenceLimited => Ok(sir_cdf(z, cfg)?.value),
        Regime::NoiseLimited => {
            let p = nakagami_cdf(cfg.sigma2.sqrt() * z.sqrt(), cfg.m_s, cfg.omega_s);
            Ok(p * p)
        }
        Regime::General => {
            let pdf = |g| envelope_ratio_pdf(g, cfg);
            let lower = ratio::integrate_ratio_pdf(0.0, z.sqrt(), d.mu, spec, pdf)?;
            if lower <= 0.5 {
                return Ok(lower.max(0.0));
            }
            let upper = ratio::integrate_ratio_pdf(z.sqrt(), f64::INFINITY, d.mu, spec, pdf)?;
            Ok((1.0 - upper).clamp(0.0, 1.0))
        }
    }
}

/// Average level crossing rate N_z(z) of the SINR, in crossings per second.
pub fn level_crossing_rate(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    match derive(cfg)?.regime {
        Regime::General => lcr_sinr(z, cfg),
        Regime::InterferenceLimited => lcr_sir(z, cfg),
        Regime::NoiseLimited => {
            if !(z >= 0.0) {
                return Err(AnalyticError::Domain(format!("level_crossing_rate: threshold must be nonnegative, got {z}")));
            }
            lcr_awgn_only(z.sqrt(), cfg)
        }
    }
}

/// How an average fade duration was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfdFlag {
    Regular,
    /// z = 0: the 0/0 quotient replaced by its limit, 0.
    ZeroThreshold,
    /// The crossing rate is zero or so small that F/N overflows, while the
    /// outage probability is positive; the value is +inf.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadeDuration {
    /// Seconds.
    pub value: f64,
    pub flag: AfdFlag,
    pub outage: f64,
    pub lcr: f64,
}

/// Average fade duration T_z(z) = F_z(z)/N_z(z), in seconds.
pub fn afd(z: f64, cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<FadeDuration, AnalyticError> {
    let outage = outage_probability(z, cfg, spec)?;
    if z == 0.0 {
        return Ok(FadeDuration { value: 0.0, flag: AfdFlag::ZeroThreshold, outage, lcr: 0.0 });
    }
    let lcr = level_crossing_rate(z, cfg)?;
    if lcr > 0.0 && (outage / lcr).is_finite() {
        Ok(FadeDuration { value: outage / lcr, flag: AfdFlag::Regular, outage, lcr })
    } else if outage > 0.0 {
        Ok(FadeDuration { value: f64::INFINITY, flag: AfdFlag::Unbounded, outage, lcr })
    } else {
        Ok(FadeDuration { value: 0.0, flag: AfdFlag::ZeroThreshold, outage, lcr })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rayleigh_il(n: u32) -> SystemConfig {
        SystemConfig { m_s: 1, m_i: 1, omega_s: 1.0, omega_i: 1.0, sigma2: 0.0, n, f_m0: 10.0, f_mi: 10.0 }
    }

    #[test]
    fn rayleigh_spot_values() {
        let cfg = rayleigh_il(1);
        let spec = QuadratureSpec::default();
        assert!((outage_probability(1.0, &cfg, &spec).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let want = 2f64.sqrt() * std::f64::consts::PI * 0.5 * (1.0 - (2.0f64 / 3.0).powf(1.5)) * 10.0;
        assert!((level_crossing_rate(1.0, &cfg).unwrap() - want).abs() < 1e-12 * want);
        let t = afd(1.0, &cfg, &spec).unwrap();
        assert_eq!(t.flag, AfdFlag::Regular);
        assert!((t.value * 10.0 - 0.329_302_052_862_849_8).abs() < 1e-12, "{}", t.value * 10.0);
    }

    #[test]
    fn afd_boundaries() {
        let cfg = rayleigh_il(2);
        let spec = QuadratureSpec::default();
        let t = afd(0.0, &cfg, &spec).unwrap();
        assert_eq!((t.value, t.flag), (0.0, AfdFlag::ZeroThreshold));
        assert!(outage_probability(-1.0, &cfg, &spec).is_err());
    }

    #[test]
    fn regime_errors_name_the_operation() {
        let cfg = SystemConfig { sigma2: 1.0, ..rayleigh_il(1) };
        match sir_cdf(1.0, &cfg) {
            Err(AnalyticError::Regime { operation, actual, .. }) => {
                assert_eq!(operation, "sir_cdf");
                assert_eq!(actual, Regime::General);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn noise_limited_outage_is_squared_branch_cdf() {
        let cfg = SystemConfig { m_s: 2, omega_s: 3.0, omega_i: 0.0, sigma2: 0.5, ..rayleigh_il(1) };
        let z: f64 = 4.0;
        let x = 2.0 * 0.5 * z / 3.0;
        let p = 1.0 - (-x).exp() * (1.0 + x);
        let got = outage_probability(z, &cfg, &QuadratureSpec::default()).unwrap();
        assert!((got - p * p).abs() < 1e-14);
    }
}
