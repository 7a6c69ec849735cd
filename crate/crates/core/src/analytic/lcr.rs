//! Average level crossing rates.
//!
//! All of them rest on one identity: for the envelope ratio g = x₀/y with
//! Gaussian, mutually independent envelope derivatives,
//!
//! ```text
//! N_g(g) = √((σ²_ẋ0 + g²σ²_ẇ)/(2π)) · ∫ f_x0(g y) f_y(y) dy
//! ```
//!
//! and N_z(z) = N_g(√z) for the SINR z = g².

use super::envelope::{interference_plus_noise_pdf, selected_envelope_pdf};
use super::finite_sum::outer_sum;
use super::moments::RatioKernel;
use super::ratio::{ln_gamma_bracket, y_breakpoints, y_scales};
use super::{require_regime, AnalyticError, EvalRoute, Evaluated, FINITE_SUM_TOL};
use crate::model::{derive, Regime, SystemConfig};
use crate::specfun::{integrate_with_breakpoints, ln_gamma_unchecked, regularized_beta, QuadratureSpec};
use std::f64::consts::PI;

/// Distribution of the interference-plus-noise envelope y.
pub enum YDensity<'a> {
    /// y ≡ σ (no interference).
    PointMass(f64),
    /// A density supported on [lower, ∞); `scales` are characteristic
    /// widths used to place quadrature breakpoints.
    Continuous { pdf: &'a dyn Fn(f64) -> f64, lower: f64, scales: Vec<f64> },
}

/// N_g(g) by quadrature of the crossing-rate integral, for arbitrary
/// densities of x₀ and y.
pub fn lcr_general(
    g: f64,
    fx0: &dyn Fn(f64) -> f64,
    fy: &YDensity<'_>,
    var_dx0: f64,
    var_dwi: f64,
    spec: &QuadratureSpec,
) -> Result<f64, AnalyticError> {
    if !(g >= 0.0) {
        return Err(AnalyticError::Domain(format!("lcr_general: threshold must be nonnegative, got {g}")));
    }
    let rms = ((var_dx0 + g * g * var_dwi) / (2.0 * PI)).sqrt();
    let integral = match fy {
        YDensity::PointMass(s) => fx0(g * s),
        YDensity::Continuous { pdf, lower, scales } => {
            if g == 0.0 {
                fx0(0.0)
            } else {
                let pts = y_breakpoints(*lower, scales);
                integrate_with_breakpoints(|y| fx0(g * y) * pdf(y), &pts, spec)?
            }
        }
    };
    Ok(rms * integral)
}

/// N_g(g) of the link by quadrature; the reference for the closed forms.
pub fn lcr_general_quadrature(g: f64, cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    let d = derive(cfg)?;
    let fx0 = |x: f64| selected_envelope_pdf(x, cfg);
    let sigma = cfg.sigma2.sqrt();
    if d.regime == Regime::NoiseLimited {
        return lcr_general(g, &fx0, &YDensity::PointMass(sigma), d.var_dx0, d.var_dwi, spec);
    }
    let fy = |y: f64| interference_plus_noise_pdf(y, cfg).unwrap_or(f64::NAN);
    let density = YDensity::Continuous { pdf: &fy, lower: sigma, scales: y_scales(cfg, g.max(f64::MIN_POSITIVE)) };
    lcr_general(g, &fx0, &density, d.var_dx0, d.var_dwi, spec)
}

/// N_g(g) without interference: σ_ẋ0/√(2π) · f_x0(σg).
pub fn lcr_awgn_only(g: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    let d = require_regime(cfg, Regime::NoiseLimited, "lcr_awgn_only")?;
    if !(g >= 0.0) {
        return Err(AnalyticError::Domain(format!("lcr_awgn_only: threshold must be nonnegative, got {g}")));
    }
    Ok((d.var_dx0 / (2.0 * PI)).sqrt() * selected_envelope_pdf(cfg.sigma2.sqrt() * g, cfg))
}

/// N_z(z) with both noise and interference.
pub fn lcr_sinr(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    lcr_sinr_routed(z, cfg).map(|e| e.value)
}

/// As [`lcr_sinr`], reporting the evaluation route (finite sum, or the
/// moment expansion when the sum's rounding-error estimate is too large).
pub fn lcr_sinr_routed(z: f64, cfg: &SystemConfig) -> Result<Evaluated, AnalyticError> {
    let d = require_regime(cfg, Regime::General, "lcr_sinr")?;
    check(z, "lcr_sinr")?;
    let t = z / d.mu;
    if t == 0.0 {
        return Ok(Evaluated { value: 0.0, route: EvalRoute::FiniteSum });
    }
    let m = cfg.m_s;
    let big_n = cfg.interference_order();
    let sum = outer_sum(t, m, big_n, d.c, true)?;
    if sum.value > 0.0 && sum.rel_error <= FINITE_SUM_TOL {
        let doppler = cfg.f_m0 * cfg.f_m0 + cfg.f_mi * cfg.f_mi * t;
        let ln = 0.5 * (8.0 * PI).ln() + 0.5 * doppler.ln() + (m as f64 - 0.5) * t.ln()
            - ln_gamma_unchecked(m as f64)
            - ln_gamma_unchecked(big_n as f64)
            + sum.ln_abs();
        return Ok(Evaluated { value: ln.exp(), route: EvalRoute::FiniteSum });
    }
    let rms = ((d.var_dx0 + z * d.var_dwi) / (2.0 * PI)).sqrt();
    let ln = rms.ln() + RatioKernel::new(cfg).ln_value(z.sqrt(), 0);
    Ok(Evaluated { value: ln.exp(), route: EvalRoute::ShiftedMoments })
}

/// N_z(z) of an interference-limited link, via the regularized beta
/// function.
pub fn lcr_sir(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    let d = require_regime(cfg, Regime::InterferenceLimited, "lcr_sir")?;
    check(z, "lcr_sir")?;
    let t = z / d.mu;
    if t == 0.0 {
        return Ok(0.0);
    }
    let doppler = cfg.f_m0 * cfg.f_m0 + cfg.f_mi * cfg.f_mi * t;
    Ok((0.5 * doppler.ln() + sir_shape(t, cfg, 0.5)?).exp())
}

/// [`lcr_sir`] specialised to f_mi = f_m0.
pub fn lcr_sir_equal_doppler(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    let d = require_regime(cfg, Regime::InterferenceLimited, "lcr_sir_equal_doppler")?;
    check(z, "lcr_sir_equal_doppler")?;
    if cfg.f_mi != cfg.f_m0 {
        return Err(AnalyticError::Domain(format!(
            "lcr_sir_equal_doppler: needs f_mi = f_m0, got {} and {}",
            cfg.f_mi, cfg.f_m0
        )));
    }
    let t = z / d.mu;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((cfg.f_m0.ln() + sir_shape(t, cfg, 1.0)?).exp())
}

/// ln of √(8π)Γ(a)/(Γ(m)Γ(N)) · t^{m-1/2}/(1+t)^{m+N-p} · I(t/(1+2t); m, a)
/// with a = m + N - 1/2.
fn sir_shape(t: f64, cfg: &SystemConfig, p: f64) -> Result<f64, AnalyticError> {
    let m = cfg.m_s as f64;
    let big_n = cfg.interference_order() as f64;
    let a = m + big_n - 0.5;
    let u = t / (1.0 + 2.0 * t);
    Ok(0.5 * (8.0 * PI).ln() + ln_gamma_unchecked(a) - ln_gamma_unchecked(m) - ln_gamma_unchecked(big_n)
        + (m - 0.5) * t.ln()
        - (m + big_n - p) * t.ln_1p()
        + regularized_beta(u, m, a)?.ln())
}

/// The interference-limited LCR as a gamma-weighted finite sum in the
/// derivative variances; numerically independent of [`lcr_sir`].
pub fn lcr_sir_series(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    let d = require_regime(cfg, Regime::InterferenceLimited, "lcr_sir_series")?;
    check(z, "lcr_sir_series")?;
    let t = z / d.mu;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = cfg.m_s;
    let big_n = cfg.interference_order() as f64;
    let lead = 8.0 * (d.var_dx0 + z * d.var_dwi) * m as f64 / (PI * cfg.omega_s);
    let ln = 0.5 * lead.ln() + (m as f64 - 0.5) * t.ln()
        - ln_gamma_unchecked(m as f64)
        - ln_gamma_unchecked(big_n)
        + ln_gamma_bracket(t, m as f64 + big_n - 0.5, m);
    Ok(ln.exp())
}

fn check(z: f64, function: &'static str) -> Result<(), AnalyticError> {
    if z >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::Domain(format!("{function}: threshold must be nonnegative, got {z}")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::finite_sum::single_bracket;
    use super::*;
    use crate::specfun::integrate_with_breakpoints;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::new(1e-300, 1e-12, 4000).unwrap()
    }

    fn cfg(m_s: u32, m_i: u32, n: u32, sigma2: f64) -> SystemConfig {
        SystemConfig { m_s, m_i, omega_s: 2.0, omega_i: 0.5, sigma2, n, f_m0: 50.0, f_mi: 20.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sinr_matches_quadrature() {
        for c in [cfg(1, 1, 1, 0.5), cfg(2, 3, 2, 0.05), cfg(3, 1, 3, 5.0)] {
            let mu = derive(&c).unwrap().mu;
            for k in [-2.0, -0.5, 0.0, 1.0, 2.5] {
                let z = mu * 10f64.powf(k);
                let got = lcr_sinr(z, &c).unwrap();
                let want = lcr_general_quadrature(z.sqrt(), &c, &tight()).unwrap();
                if want < 1e-300 {
                    assert!(got < 1e-290);
                    continue;
                }
                assert!(rel(got, want) < 1e-9, "{c:?} z={z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn sir_forms_agree() {
        for (m_s, m_i, n) in [(1, 1, 1), (2, 1, 3), (3, 2, 2), (1, 4, 8)] {
            let c = SystemConfig { sigma2: 0.0, f_mi: 50.0, ..cfg(m_s, m_i, n, 0.0) };
            let mu = derive(&c).unwrap().mu;
            for k in [-3.0, -1.0, 0.0, 0.7, 3.0] {
                let z = mu * 10f64.powf(k);
                let a = lcr_sir(z, &c).unwrap();
                assert!(rel(lcr_sir_equal_doppler(z, &c).unwrap(), a) < 1e-13);
                assert!(rel(lcr_sir_series(z, &c).unwrap(), a) < 1e-12);
                let q = lcr_general_quadrature(z.sqrt(), &c, &tight()).unwrap();
                assert!(rel(q, a) < 1e-9, "{q} vs {a}");
            }
        }
        let unequal = cfg(1, 1, 1, 0.0);
        assert!(lcr_sir_equal_doppler(1.0, &unequal).is_err());
        assert!(lcr_sir(1.0, &unequal).is_ok());
    }

    #[test]
    fn awgn_only() {
        let c = SystemConfig { m_s: 1, m_i: 1, omega_s: 1.0, omega_i: 0.0, sigma2: 1.0, n: 1, f_m0: 1.0, f_mi: 1.0 };
        assert!((lcr_awgn_only(1.0, &c).unwrap() - 1.165_803_522_759_401_8).abs() < 1e-14);
        assert_eq!(lcr_awgn_only(0.0, &c).unwrap(), 0.0);
        assert!(lcr_awgn_only(30.0, &c).unwrap() < 1e-300);
        let q = lcr_general_quadrature(1.3, &c, &tight()).unwrap();
        assert!(rel(q, lcr_awgn_only(1.3, &c).unwrap()) < 1e-15);
    }

    fn term_quadrature(g: f64, c: &SystemConfig, power: i32) -> f64 {
        let b = c.m_i as f64 / c.omega_i;
        let big_n = c.interference_order();
        let sigma = c.sigma2.sqrt();
        let pts = y_breakpoints(sigma, &y_scales(c, g));
        integrate_with_breakpoints(
            |y: f64| {
                let ln = big_n as f64 * b.ln() + std::f64::consts::LN_2 + power as f64 * y.ln()
                    - b * y * y
                    - ln_gamma_unchecked(big_n as f64);
                ln.exp() * selected_envelope_pdf(g * y, c)
            },
            &pts,
            &tight(),
        )
        .unwrap()
    }

    #[test]
    fn per_term_integrals() {
        // Ψ_i and Φ_i: the individual y^{2i+1} and y^{2i+2} moments
        let c = cfg(2, 1, 3, 0.4);
        let d = derive(&c).unwrap();
        let b = c.m_i as f64 / c.omega_i;
        let big_n = c.interference_order();
        let m = c.m_s;
        for g in [0.3, 1.0, 4.0] {
            let t = g * g / d.mu;
            for i in 0..big_n {
                let common = 4.0 * t.powf(m as f64 - 0.5) * b.powi((big_n - i - 1) as i32)
                    / (ln_gamma_unchecked(m as f64) + ln_gamma_unchecked(big_n as f64)).exp();
                let s = single_bracket(i + 1, t, m, d.c, true).unwrap();
                let psi = (m as f64 / c.omega_s).sqrt() * common * s.value * s.scale.exp();
                let want = term_quadrature(g, &c, 2 * i as i32 + 1);
                assert!(rel(psi, want) < 1e-9, "Ψ_{i}({g}): {psi} vs {want}");
                let s = single_bracket(i + 1, t, m, d.c, false).unwrap();
                let phi = common / d.mu.sqrt() * s.value * s.scale.exp();
                let want = term_quadrature(g, &c, 2 * i as i32 + 2);
                assert!(rel(phi, want) < 1e-9, "Φ_{i}({g}): {phi} vs {want}");
            }
        }
    }

    #[test]
    fn moment_route_agrees_with_finite_sum() {
        let c = cfg(2, 2, 2, 0.3);
        let d = derive(&c).unwrap();
        let z = 1.7 * d.mu;
        let fs = lcr_sinr_routed(z, &c).unwrap();
        assert_eq!(fs.route, EvalRoute::FiniteSum);
        let rms = ((d.var_dx0 + z * d.var_dwi) / (2.0 * PI)).sqrt();
        let mom = rms * RatioKernel::new(&c).ln_value(z.sqrt(), 0).exp();
        assert!(rel(mom, fs.value) < 1e-12, "{mom} vs {}", fs.value);
    }

    #[test]
    fn zero_and_regime() {
        let c = cfg(1, 1, 2, 1.0);
        assert_eq!(lcr_sinr(0.0, &c).unwrap(), 0.0);
        assert!(lcr_sir(1.0, &c).is_err());
        assert!(lcr_sinr(-1.0, &c).is_err());
    }
}
