//! Beta function, regularized incomplete beta, and the incomplete beta
//! integral on the negative real axis.

use super::gamma::{gamma_unchecked, ln_gamma_unchecked};
use super::quad::{integrate_adaptive, QuadratureSpec};
use super::SpecialError;

const MAX_SERIES_TERMS: usize = 10_000;

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> Result<f64, SpecialError> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(SpecialError::Domain {
            function: "beta",
            detail: format!("arguments must be positive, got ({a}, {b})"),
        });
    }
    if a + b < 170.0 {
        Ok(gamma_unchecked(a) * gamma_unchecked(b) / gamma_unchecked(a + b))
    } else {
        Ok(ln_beta(a, b).exp())
    }
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    if a + b < 170.0 {
        (gamma_unchecked(a) * gamma_unchecked(b) / gamma_unchecked(a + b)).ln()
    } else {
        ln_gamma_unchecked(a) + ln_gamma_unchecked(b) - ln_gamma_unchecked(a + b)
    }
}

/// Regularized incomplete beta I(z; a, b) = B(z; a, b)/B(a, b), z ∈ [0, 1].
///
/// Continued fraction (modified Lentz) on whichever of I(z;a,b) and
/// 1 - I(1-z;b,a) converges faster.
pub fn regularized_beta(z: f64, a: f64, b: f64) -> Result<f64, SpecialError> {
    if !(0.0..=1.0).contains(&z) {
        return Err(SpecialError::Domain {
            function: "regularized_beta",
            detail: format!("z must lie in [0, 1], got {z}"),
        });
    }
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(SpecialError::Domain {
            function: "regularized_beta",
            detail: format!("parameters must be positive, got ({a}, {b})"),
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(1.0);
    }
    if z < (a + 1.0) / (a + b + 2.0) {
        Ok(front_factor(z, a, b) * beta_cf(z, a, b)? / a)
    } else {
        Ok(1.0 - front_factor(1.0 - z, b, a) * beta_cf(1.0 - z, b, a)? / b)
    }
}

fn front_factor(z: f64, a: f64, b: f64) -> f64 {
    (a * z.ln() + b * (-z).ln_1p() - ln_beta(a, b)).exp()
}

fn beta_cf(z: f64, a: f64, b: f64) -> Result<f64, SpecialError> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * z / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_SERIES_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(h);
        }
    }
    Err(SpecialError::NoConvergence {
        function: "regularized_beta",
        detail: format!("continued fraction stalled at z = {z}, a = {a}, b = {b}"),
    })
}

/// Finite series I(z; a, b) = z^a Σ_{j<b} (a)_j (1-z)^j / j! for integer b ≥ 1.
pub fn regularized_beta_series(z: f64, a: f64, b: u32) -> Result<f64, SpecialError> {
    if !(0.0..=1.0).contains(&z) || !(a > 0.0) || b == 0 {
        return Err(SpecialError::Domain {
            function: "regularized_beta_series",
            detail: format!("need z in [0,1], a > 0, b ≥ 1; got ({z}, {a}, {b})"),
        });
    }
    let w = 1.0 - z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..b {
        let j = j as f64;
        term *= (a + j - 1.0) * w / j;
        sum += term;
    }
    Ok(z.powf(a) * sum)
}

/// Which evaluation produced an incomplete-beta value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaRoute {
    /// Hypergeometric series in z.
    Series,
    /// Series after the Pfaff transformation z → z/(z-1).
    Transformed,
    /// Regularized beta continued fraction after the same transformation.
    ContinuedFraction,
    /// Adaptive quadrature of the defining integral.
    Quadrature,
}

/// B(z; a, b) = ∫₀^z t^{a-1}(1-t)^{b-1} dt for z ≤ 0, integer a ≥ 1, any real b.
pub fn incomplete_beta_neg(z: f64, a: u32, b: f64) -> Result<f64, SpecialError> {
    incomplete_beta_neg_routed(z, a, b).map(|(v, _)| v)
}

/// As [`incomplete_beta_neg`], also reporting which evaluation was used.
pub fn incomplete_beta_neg_routed(z: f64, a: u32, b: f64) -> Result<(f64, BetaRoute), SpecialError> {
    if !(z <= 0.0) || !z.is_finite() {
        return Err(SpecialError::Domain {
            function: "incomplete_beta_neg",
            detail: format!("z must be finite and nonpositive, got {z}"),
        });
    }
    if a == 0 || !b.is_finite() {
        return Err(SpecialError::Domain {
            function: "incomplete_beta_neg",
            detail: format!("need integer a ≥ 1 and finite b, got ({a}, {b})"),
        });
    }
    if z == 0.0 {
        return Ok((0.0, BetaRoute::Series));
    }
    let af = a as f64;
    let w = z / (z - 1.0);
    let e = 1.0 - af - b;
    if e > 0.0 {
        // With v = t/(t-1) the integral becomes (-1)^a B(w; a, 1-a-b), an
        // ordinary incomplete beta with positive parameters.
        let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
        let ln_full = ln_beta(af, e);
        let reg = regularized_beta(w, af, e)?;
        return Ok((sign * reg * ln_full.exp(), BetaRoute::ContinuedFraction));
    }
    if z > -0.5 {
        // z^a Σ_k (1-b)_k z^k / (k! (a+k))
        if let Some(s) = hyper_sum(|k| (1.0 - b + k) * z / (k + 1.0), af) {
            return Ok((z.powi(a as i32) * s, BetaRoute::Series));
        }
    } else {
        // (-w)^a Σ_k (a+b)_k w^k / (k! (a+k)), all terms positive here
        if let Some(s) = hyper_sum(|k| (af + b + k) * w / (k + 1.0), af) {
            return Ok(((-w).powi(a as i32) * s, BetaRoute::Transformed));
        }
    }
    let spec = QuadratureSpec::new(1e-300, 1e-13, 4000).expect("valid spec");
    let integrand = |t: f64| t.powi(a as i32 - 1) * (1.0 - t).powf(b - 1.0);
    let v = integrate_adaptive(integrand, z, 0.0, &spec)
        .or_else(|e| e.best_estimate().ok_or(e))
        .map_err(|e| SpecialError::NoConvergence {
            function: "incomplete_beta_neg",
            detail: e.to_string(),
        })?;
    Ok((-v, BetaRoute::Quadrature))
}

/// Σ_k c_k/(a+k) with c_0 = 1, c_{k+1} = c_k·ratio(k). Terminating series
/// (ratio hits exactly zero) are summed exactly. `None` if no convergence.
fn hyper_sum(ratio: impl Fn(f64) -> f64, a: f64) -> Option<f64> {
    let mut c = 1.0;
    let mut sum = 1.0 / a;
    let mut small = 0;
    for k in 0..MAX_SERIES_TERMS {
        let k = k as f64;
        c *= ratio(k);
        if c == 0.0 {
            return Some(sum);
        }
        let term = c / (a + k + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            small += 1;
            if small >= 3 {
                return Some(sum);
            }
        } else {
            small = 0;
        }
        if !sum.is_finite() {
            return None;
        }
    }
    None
}

/// Rising factorial (a)_j = a(a+1)…(a+j-1), (a)_0 = 1.
pub fn pochhammer(a: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |p, i| p * (a + i as f64))
}

/// Binomial coefficient C(n, k); exact in integer arithmetic while it fits.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => {
                let mut f = acc as f64;
                for j in i..k {
                    f *= (n - j) as f64 / (j + 1) as f64;
                }
                return f;
            }
        }
    }
    acc as f64
}
