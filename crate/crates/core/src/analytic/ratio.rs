//! Densities and distribution functions of the envelope ratio g = x₀/y and
//! of the SINR z = g².

use super::envelope::{interference_plus_noise_pdf, selected_envelope_pdf};
use super::finite_sum::outer_sum;
use super::moments::RatioKernel;
use super::{require_regime, AnalyticError, EvalRoute, Evaluated, FINITE_SUM_TOL};
use crate::model::{derive, Regime, SystemConfig};
use crate::specfun::{
    binomial, incomplete_beta_neg, integrate_adaptive, integrate_with_breakpoints, ln_beta, ln_gamma_unchecked, regularized_beta,
    upper_incomplete_gamma_int_order, QuadratureSpec,
};
use std::f64::consts::LN_2;

/// PDF of the envelope ratio, f_g(g).
pub fn envelope_ratio_pdf(g: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    envelope_ratio_pdf_routed(g, cfg).map(|e| e.value)
}

/// As [`envelope_ratio_pdf`], reporting which evaluation was used.
///
/// With noise and interference the finite double sum is tried first; when
/// its rounding-error estimate exceeds 1e-11 the moment expansion is used.
pub fn envelope_ratio_pdf_routed(g: f64, cfg: &SystemConfig) -> Result<Evaluated, AnalyticError> {
    check_threshold(g, "envelope_ratio_pdf")?;
    let d = derive(cfg)?;
    match d.regime {
        Regime::InterferenceLimited => Ok(Evaluated::closed(sir_envelope_ratio_pdf(g, cfg)?)),
        Regime::NoiseLimited => {
            let s = cfg.sigma2.sqrt();
            Ok(Evaluated::closed(s * selected_envelope_pdf(s * g, cfg)))
        }
        Regime::General => {
            let t = g * g / d.mu;
            if t == 0.0 {
                return Ok(Evaluated::closed(0.0));
            }
            let m = cfg.m_s;
            let big_n = cfg.interference_order();
            let sum = outer_sum(t, m, big_n, d.c, false)?;
            if sum.value > 0.0 && sum.rel_error <= FINITE_SUM_TOL {
                let ln = 2.0 * LN_2 - 0.5 * d.mu.ln() + (m as f64 - 0.5) * t.ln()
                    - ln_gamma_unchecked(m as f64)
                    - ln_gamma_unchecked(big_n as f64)
                    + sum.ln_abs();
                return Ok(Evaluated { value: ln.exp(), route: EvalRoute::FiniteSum });
            }
            let ln = RatioKernel::new(cfg).ln_value(g, 1);
            Ok(Evaluated { value: ln.exp(), route: EvalRoute::ShiftedMoments })
        }
    }
}

/// f_g(g) = ∫_σ^∞ y f_{x0}(gy) f_y(y) dy by adaptive quadrature.
///
/// Independent of the closed forms; used to check them.
pub fn envelope_ratio_pdf_quadrature(g: f64, cfg: &SystemConfig, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    check_threshold(g, "envelope_ratio_pdf_quadrature")?;
    let d = derive(cfg)?;
    if d.regime == Regime::NoiseLimited {
        return Err(AnalyticError::Domain("envelope_ratio_pdf_quadrature: needs interference".into()));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    let sigma = cfg.sigma2.sqrt();
    let pts = y_breakpoints(sigma, &y_scales(cfg, g));
    let v = integrate_with_breakpoints(
        |y| y * selected_envelope_pdf(g * y, cfg) * interference_plus_noise_pdf(y, cfg).unwrap_or(f64::NAN),
        &pts,
        spec,
    )?;
    Ok(v)
}

/// Characteristic widths of the integrand in y.
pub(crate) fn y_scales(cfg: &SystemConfig, g: f64) -> Vec<f64> {
    let spread = (cfg.n as f64 * cfg.omega_i).sqrt();
    let mut s = vec![spread, cfg.omega_s.sqrt() / g];
    if cfg.sigma2 > 0.0 {
        s.push(cfg.n as f64 * cfg.omega_i / cfg.sigma2.sqrt());
    }
    s
}

/// lower + s·10^{k/2} for each scale s, k = -6..=6, then +∞.
pub(crate) fn y_breakpoints(lower: f64, scales: &[f64]) -> Vec<f64> {
    let mut pts = vec![lower];
    for &s in scales {
        if !(s > 0.0 && s.is_finite()) {
            continue;
        }
        for k in -6..=6 {
            let p = lower + s * 10f64.powf(k as f64 / 2.0);
            if p > lower && p.is_finite() {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts.push(f64::INFINITY);
    pts
}

/// PDF of the SINR, f_z(z) = f_g(√z)/(2√z). Vanishes at z = 0.
pub fn sinr_pdf(z: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    check_threshold(z, "sinr_pdf")?;
    if z == 0.0 {
        derive(cfg)?;
        return Ok(0.0);
    }
    let g = z.sqrt();
    Ok(envelope_ratio_pdf(g, cfg)? / (2.0 * g))
}

/// PDF of the signal-to-interference envelope ratio (no noise), via the
/// regularized incomplete beta function.
pub fn sir_envelope_ratio_pdf(g: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    check_threshold(g, "sir_envelope_ratio_pdf")?;
    let d = require_regime(cfg, Regime::InterferenceLimited, "sir_envelope_ratio_pdf")?;
    let t = g * g / d.mu;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = cfg.m_s as f64;
    let big_n = cfg.interference_order() as f64;
    let u = t / (1.0 + 2.0 * t);
    let ln = 2.0 * LN_2 - 0.5 * d.mu.ln() - ln_beta(m, big_n) + (m - 0.5) * t.ln() - (m + big_n) * t.ln_1p()
        + regularized_beta(u, m, m + big_n)?.ln();
    Ok(ln.exp())
}

/// The same density written as a gamma-weighted finite sum.
///
/// Numerically independent of [`sir_envelope_ratio_pdf`]; kept as a
/// cross-check.
pub fn sir_envelope_ratio_pdf_series(g: f64, cfg: &SystemConfig) -> Result<f64, AnalyticError> {
    check_threshold(g, "sir_envelope_ratio_pdf_series")?;
    let d = require_regime(cfg, Regime::InterferenceLimited, "sir_envelope_ratio_pdf_series")?;
    let t = g * g / d.mu;
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = cfg.m_s;
    let big_n = cfg.interference_order() as f64;
    let ln = 2.0 * LN_2 - 0.5 * d.mu.ln() + (m as f64 - 0.5) * t.ln()
        - ln_gamma_unchecked(m as f64)
        - ln_gamma_unchecked(big_n)
        + ln_gamma_bracket(t, m as f64 + big_n, m);
    Ok(ln.exp())
}

/// ln[Γ(a)(1+t)^{-a} - (1+2t)^{-a} Σ_{j<m} Γ(a+j)/j! · u^j], u = t/(1+2t).
///
/// Since (1+t)^{-a} = (1+2t)^{-a}(1-u)^{-a} = (1+2t)^{-a} Σ_j (a)_j u^j/j!,
/// the difference is also the tail Σ_{j≥m}; that form is used once the
/// direct difference starts to cancel.
pub(crate) fn ln_gamma_bracket(t: f64, a: f64, m: u32) -> f64 {
    let u = t / (1.0 + 2.0 * t);
    let whole = (-a * (-u).ln_1p()).exp();
    let mut term = 1.0;
    let mut head = 0.0;
    for j in 0..m {
        head += term;
        term *= (a + j as f64) * u / (j as f64 + 1.0);
    }
    let base = ln_gamma_unchecked(a) - a * (2.0 * t).ln_1p();
    if head < 0.5 * whole {
        return base + (whole - head).ln();
    }
    // term now holds (a)_m u^m/m!
    let mut tail = 0.0;
    let mut j = m as f64;
    loop {
        tail += term;
        let next = term * (a + j) * u / (j + 1.0);
        j += 1.0;
        if next <= 1e-17 * tail {
            break;
        }
        term = next;
    }
    base + tail.ln()
}

/// How [`sir_cdf`] obtained its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfRoute {
    /// Incomplete-beta closed form.
    ClosedForm,
    /// Closed form cancelled too much; quadrature of the density instead.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirCdf {
    pub value: f64,
    pub route: CdfRoute,
}

/// CDF of the SIR at threshold z (interference-limited links).
///
/// Closed form in incomplete beta functions with negative argument. For
/// small z/μ its terms are O((z/μ)^{m_S}) while the result is
/// O((z/μ)^{2m_S}); when the estimated rounding error exceeds 1e-13 the
/// density is integrated instead and the route says so.
pub fn sir_cdf(z: f64, cfg: &SystemConfig) -> Result<SirCdf, AnalyticError> {
    check_threshold(z, "sir_cdf")?;
    let d = require_regime(cfg, Regime::InterferenceLimited, "sir_cdf")?;
    if z == 0.0 {
        return Ok(SirCdf { value: 0.0, route: CdfRoute::ClosedForm });
    }
    if z.is_infinite() {
        return Ok(SirCdf { value: 1.0, route: CdfRoute::ClosedForm });
    }
    let m = cfg.m_s;
    let big_n = cfg.interference_order();
    let x = z / d.mu;
    let mf = m as f64;
    let nf = big_n as f64;
    let inv_b = (-ln_beta(mf, nf)).exp();
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    let first = 2.0 * sign_m * inv_b * incomplete_beta_neg(-x, m, 1.0 - mf - nf)?;
    let mut total = first;
    let mut magnitude = first.abs();
    for j in 0..m {
        let jf = j as f64;
        let coef = inv_b * (-0.5f64).powi((m - 1 + j) as i32) * binomial(m + big_n + j - 1, j);
        let term = coef * incomplete_beta_neg(-2.0 * x, m + j, 1.0 - mf - nf - jf)?;
        total += term;
        magnitude += term.abs();
    }
    let err = 1e-15 * (mf + 1.0) * magnitude;
    if total > 0.0 && err <= 1e-13 * total {
        return Ok(SirCdf { value: total.min(1.0), route: CdfRoute::ClosedForm });
    }
    let spec = QuadratureSpec::new(1e-300, 1e-13, 4000).expect("valid spec");
    let v = integrate_ratio_pdf(0.0, z.sqrt(), d.mu, &spec, |g| sir_envelope_ratio_pdf(g, cfg))?;
    Ok(SirCdf { value: v.clamp(0.0, 1.0), route: CdfRoute::Quadrature })
}

/// ∫_{g_lo}^{g_hi} pdf(g) dg with breakpoints at √μ·10^{k/2}.
pub(crate) fn integrate_ratio_pdf<F>(
    g_lo: f64,
    g_hi: f64,
    mu: f64,
    spec: &QuadratureSpec,
    pdf: F,
) -> Result<f64, AnalyticError>
where
    F: Fn(f64) -> Result<f64, AnalyticError>,
{
    if g_hi <= g_lo {
        return Ok(0.0);
    }
    let mut pts = vec![g_lo];
    let root = mu.sqrt();
    for k in -16..=16 {
        let p = root * 10f64.powf(k as f64 / 2.0);
        if p > g_lo && p < g_hi {
            pts.push(p);
        }
    }
    pts.push(g_hi);
    let failure = std::cell::RefCell::new(None);
    let v = integrate_with_breakpoints(
        |g| match pdf(g) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &pts,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(v?)
}

/// ∫_0^{z/μ} t^{a-1}(1+t)^{-b} e^{-ct} dt by its finite incomplete-gamma sum.
///
/// Orders k+1-b may be zero or negative; those incomplete gammas are well
/// defined because c > 0.
pub fn series_integral_identity(a: u32, b: u32, c: f64, zmu: f64) -> Result<f64, AnalyticError> {
    series_integral_identity_routed(a, b, c, zmu).map(|e| e.value)
}

/// As [`series_integral_identity`], with the route taken. For small z/μ the
/// sum's terms are O(z/μ) while the integral is O((z/μ)^a); when the
/// estimated rounding error exceeds 1e-12 the integral is computed by
/// quadrature instead.
pub fn series_integral_identity_routed(a: u32, b: u32, c: f64, zmu: f64) -> Result<Evaluated, AnalyticError> {
    if a < 1 || b < 1 || !(c > 0.0) || !(zmu > 0.0) || !c.is_finite() || !zmu.is_finite() {
        return Err(AnalyticError::Domain(format!(
            "series_integral_identity: need a, b ≥ 1 and c, zmu > 0; got ({a}, {b}, {c}, {zmu})"
        )));
    }
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for k in 0..a {
        let order = k as i32 + 1 - b as i32;
        let hi = upper_incomplete_gamma_int_order(order, c * (1.0 + zmu))?;
        let lo = upper_incomplete_gamma_int_order(order, c)?;
        let w = binomial(a - 1, k) * (-c).powi(-(k as i32));
        sum += w * (hi - lo);
        magnitude += w.abs() * (hi.abs() + lo.abs());
    }
    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
    let value = sign * c.exp() * c.powi(b as i32 - 1) * sum;
    let err = 4e-16 * (a as f64 + 1.0) * magnitude / sum.abs();
    if value > 0.0 && err <= 1e-12 {
        return Ok(Evaluated::closed(value));
    }
    let spec = QuadratureSpec::new(1e-300, 2e-13, 4000).expect("valid spec");
    let f = |t: f64| t.powi(a as i32 - 1) * (1.0 + t).powi(-(b as i32)) * (-c * t).exp();
    let v = integrate_adaptive(f, 0.0, zmu, &spec)?;
    Ok(Evaluated { value: v, route: EvalRoute::Quadrature })
}

fn check_threshold(x: f64, function: &'static str) -> Result<(), AnalyticError> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::Domain(format!("{function}: threshold must be nonnegative, got {x}")))
    }
}

