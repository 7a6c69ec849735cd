//! Gamma function and its logarithm.

use super::SpecialError;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest integer argument whose factorial fits in an f64.
const MAX_EXACT: f64 = 171.0;

pub(crate) fn is_integer(a: f64) -> bool {
    a.fract() == 0.0
}

pub(crate) fn is_half_integer(a: f64) -> bool {
    (a - 0.5).fract() == 0.0
}

/// Γ(a) for a > 0.
///
/// Integer and half-integer arguments are evaluated by exact products
/// (`(a-1)!` and `√π·(1/2)(3/2)…`), everything else by a Lanczos sum.
pub fn gamma(a: f64) -> Result<f64, SpecialError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(SpecialError::Domain {
            function: "gamma",
            detail: format!("argument must be positive and finite, got {a}"),
        });
    }
    Ok(gamma_unchecked(a))
}

pub(crate) fn gamma_unchecked(a: f64) -> f64 {
    if a < MAX_EXACT && is_integer(a) {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < a {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    if a < MAX_EXACT && is_half_integer(a) {
        let mut p = PI.sqrt();
        let mut k = 0.5;
        while k < a {
            p *= k;
            k += 1.0;
        }
        return p;
    }
    if a >= MAX_EXACT {
        return ln_gamma_unchecked(a).exp();
    }
    if a < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return PI / ((PI * a).sin() * gamma_unchecked(1.0 - a));
    }
    let x = a - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * sum
}

/// ln Γ(a) for a > 0.
pub fn ln_gamma(a: f64) -> Result<f64, SpecialError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(SpecialError::Domain {
            function: "ln_gamma",
            detail: format!("argument must be positive and finite, got {a}"),
        });
    }
    Ok(ln_gamma_unchecked(a))
}

pub(crate) fn ln_gamma_unchecked(a: f64) -> f64 {
    if a < 100.0 {
        return gamma_unchecked(a).ln();
    }
    let x = a - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// ln(k!) for nonnegative integer k.
pub(crate) fn ln_factorial(k: u32) -> f64 {
    ln_gamma_unchecked(k as f64 + 1.0)
}
