//! Marginal densities of the individual envelopes.

use super::AnalyticError;
use crate::model::SystemConfig;
use crate::specfun::{ln_gamma_unchecked, regularized_lower_gamma_int, regularized_upper_gamma_int};

/// Nakagami-m density (m/Ω)^m · 2x^{2m-1}/Γ(m) · e^{-m x²/Ω}.
pub fn nakagami_pdf(x: f64, m: u32, omega: f64) -> f64 {
    if x <= 0.0 || m == 0 {
        return 0.0;
    }
    let mf = m as f64;
    let a = mf / omega;
    let ln = mf * a.ln() + std::f64::consts::LN_2 + (2.0 * mf - 1.0) * x.ln()
        - ln_gamma_unchecked(mf)
        - a * x * x;
    ln.exp()
}

/// 1 - Γ(m, m x²/Ω)/Γ(m).
pub fn nakagami_cdf(x: f64, m: u32, omega: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    regularized_lower_gamma_int(m, m as f64 * x * x / omega)
}

/// Survival function Γ(m, m x²/Ω)/Γ(m).
pub fn nakagami_sf(x: f64, m: u32, omega: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_upper_gamma_int(m, m as f64 * x * x / omega)
}

/// Density of the larger of two IID Nakagami desired-signal envelopes.
pub fn selected_envelope_pdf(x: f64, cfg: &SystemConfig) -> f64 {
    2.0 * nakagami_cdf(x, cfg.m_s, cfg.omega_s) * nakagami_pdf(x, cfg.m_s, cfg.omega_s)
}

/// Distribution function of the selected desired envelope, F_branch(x)².
pub fn selected_envelope_cdf(x: f64, cfg: &SystemConfig) -> f64 {
    nakagami_cdf(x, cfg.m_s, cfg.omega_s).powi(2)
}

fn require_interference(cfg: &SystemConfig, function: &'static str) -> Result<(), AnalyticError> {
    if cfg.omega_i > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::Domain(format!(
            "{function}: needs omega_I > 0 (without interference y is the constant σ)"
        )))
    }
}

/// Envelope of the summed interference, Nakagami with severity m_I·n and power nΩ_I.
pub fn interference_envelope_pdf(w: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    require_interference(cfg, "interference_envelope_pdf")?;
    let order = cfg.interference_order();
    Ok(nakagami_pdf(w, order, cfg.n as f64 * cfg.omega_i))
}

/// Envelope of interference plus noise, y = √(w² + σ²), supported on y ≥ σ.
pub fn interference_plus_noise_pdf(y: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    require_interference(cfg, "interference_plus_noise_pdf")?;
    let d = y * y - cfg.sigma2;
    if y <= 0.0 || d <= 0.0 {
        return Ok(0.0);
    }
    let big_n = cfg.interference_order() as f64;
    let b = cfg.m_i as f64 / cfg.omega_i;
    let ln = big_n * b.ln() + std::f64::consts::LN_2 + y.ln() + (big_n - 1.0) * d.ln()
        - ln_gamma_unchecked(big_n)
        - b * d;
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_adaptive, QuadratureSpec};

    fn cfg() -> SystemConfig {
        SystemConfig { m_s: 1, m_i: 1, omega_s: 1.0, omega_i: 1.0, sigma2: 1.0, n: 1, f_m0: 1.0, f_mi: 1.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn nakagami_examples() {
        let e1 = (-1.0f64).exp();
        assert!(rel(nakagami_pdf(1.0, 1, 1.0), 2.0 * e1) < 1e-15);
        assert_eq!(nakagami_pdf(0.0, 3, 1.0), 0.0);
        assert!(rel(nakagami_pdf(1.0, 2, 2.0), 2.0 * e1) < 1e-15);
        assert_eq!(nakagami_cdf(0.0, 2, 1.0), 0.0);
        assert!(rel(nakagami_cdf(1.0, 1, 1.0), 1.0 - e1) < 1e-15);
        let spec = QuadratureSpec::new(1e-15, 1e-13, 200).unwrap();
        let q = integrate_adaptive(|x| nakagami_pdf(x, 3, 2.0), 0.0, 1.1, &spec).unwrap();
        assert!(rel(nakagami_cdf(1.1, 3, 2.0), q) < 1e-12);
        assert!((nakagami_cdf(1.1, 3, 2.0) + nakagami_sf(1.1, 3, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn selected_envelope() {
        let e1 = (-1.0f64).exp();
        assert!(rel(selected_envelope_pdf(1.0, &cfg()), 4.0 * e1 * (1.0 - e1)) < 1e-15);
        assert_eq!(selected_envelope_pdf(0.0, &cfg()), 0.0);
        let c2 = SystemConfig { m_s: 2, ..cfg() };
        let spec = QuadratureSpec::default();
        let total = integrate_adaptive(|x| selected_envelope_pdf(x, &c2), 0.0, f64::INFINITY, &spec).unwrap();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn interference_densities() {
        let c = cfg();
        assert!(rel(interference_envelope_pdf(0.7, &c).unwrap(), nakagami_pdf(0.7, 1, 1.0)) < 1e-15);
        let c2 = SystemConfig { n: 2, ..cfg() };
        assert!(rel(interference_envelope_pdf(1.0, &c2).unwrap(), 2.0 * (-1.0f64).exp()) < 1e-15);
        assert_eq!(interference_envelope_pdf(0.0, &c).unwrap(), 0.0);

        let y = 2f64.sqrt();
        assert!(rel(interference_plus_noise_pdf(y, &c).unwrap(), 2.0 * y * (-1.0f64).exp()) < 1e-15);
        assert_eq!(interference_plus_noise_pdf(0.9, &c).unwrap(), 0.0);
        let spec = QuadratureSpec::default();
        let c3 = SystemConfig { m_i: 2, n: 3, omega_i: 0.4, sigma2: 2.0, ..cfg() };
        let total = integrate_adaptive(
            |y| interference_plus_noise_pdf(y, &c3).unwrap(),
            2f64.sqrt(),
            f64::INFINITY,
            &spec,
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-9);

        let c0 = SystemConfig { sigma2: 0.0, m_i: 2, n: 2, ..cfg() };
        for &w in &[0.1, 0.8, 2.5] {
            assert!(rel(interference_plus_noise_pdf(w, &c0).unwrap(), interference_envelope_pdf(w, &c0).unwrap()) < 1e-13);
        }
        assert!(interference_plus_noise_pdf(1.0, &SystemConfig { omega_i: 0.0, ..cfg() }).is_err());
    }
}
