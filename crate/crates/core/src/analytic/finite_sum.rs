//! The finite double sums for the envelope-ratio density and its LCR, with
//! an estimate of the rounding error they incur.
//!
//! For t = g²/μ and c = σ²m_I/Ω_I both statistics share the bracket
//!
//! ```text
//! e^c Σ_{i=1}^{N} C(N-1,i-1)(-c)^{N-i} [ Γ(m+i-h, c(1+t)) / (1+t)^{m+i-h}
//!     - (1+2t)^{-(m+i-h)} Σ_{j<m} (t/(1+2t))^j/j! · Γ(m+i+j-h, c(1+2t)) ]
//! ```
//!
//! with h = 0 for the density and h = 1/2 for the LCR. The alternating outer
//! sum and the bracket difference both cancel, badly so for small t or
//! large c·t; callers consult `rel_error` and switch to the moment form when
//! it is too large.

use crate::specfun::{ln_factorial, ln_upper_incomplete_gamma, SpecialError};

/// A signed value stored as value·e^{scale}.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledSum {
    pub value: f64,
    pub scale: f64,
    /// Estimated relative rounding error of `value`.
    pub rel_error: f64,
}

impl ScaledSum {
    pub(crate) fn ln_abs(&self) -> f64 {
        self.value.abs().ln() + self.scale
    }
}

/// Per-term relative accuracy of the incomplete-gamma logarithms.
fn term_accuracy(ln_mag: f64) -> f64 {
    2e-16 * (4.0 + ln_mag.abs())
}

fn ln_binom_u(n: u32, k: u32) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Signed log-magnitude terms of bracket `i` (1-based).
fn bracket_terms(i: u32, t: f64, m: u32, c: f64, h: f64, out: &mut Vec<(f64, f64)>) -> Result<(), SpecialError> {
    let order = m as f64 + i as f64 - h;
    let u1 = c * (1.0 + t);
    let u2 = c * (1.0 + 2.0 * t);
    out.push((1.0, ln_upper_incomplete_gamma(order, u1)? - order * t.ln_1p()));
    let ln_ratio = (t / (1.0 + 2.0 * t)).ln();
    let ln_den = order * (2.0 * t).ln_1p();
    for j in 0..m {
        let lt = ln_upper_incomplete_gamma(order + j as f64, u2)? - ln_den + j as f64 * ln_ratio
            - ln_factorial(j);
        out.push((-1.0, lt));
    }
    Ok(())
}

fn combine(terms: &[(f64, f64)]) -> ScaledSum {
    let scale = terms.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    let mut value = 0.0;
    let mut err = 0.0;
    for &(s, l) in terms {
        let v = (l - scale).exp();
        value += s * v;
        err += v * (term_accuracy(l) + 4.0 * f64::EPSILON);
    }
    let rel_error = if value == 0.0 { f64::INFINITY } else { err / value.abs() };
    ScaledSum { value, scale, rel_error }
}

/// The full outer sum over i = 1..=N, e^c included.
pub(crate) fn outer_sum(t: f64, m: u32, big_n: u32, c: f64, half: bool) -> Result<ScaledSum, SpecialError> {
    let h = if half { 0.5 } else { 0.0 };
    let ln_c = c.ln();
    let mut terms = Vec::with_capacity((big_n * (m + 1)) as usize);
    let mut inner = Vec::with_capacity(m as usize + 1);
    for i in 1..=big_n {
        inner.clear();
        bracket_terms(i, t, m, c, h, &mut inner)?;
        let sign = if (big_n - i) % 2 == 0 { 1.0 } else { -1.0 };
        let ln_coef = c + ln_binom_u(big_n - 1, i - 1) + (big_n - i) as f64 * ln_c;
        terms.extend(inner.iter().map(|&(s, l)| (s * sign, l + ln_coef)));
    }
    Ok(combine(&terms))
}

/// Bracket of a single summand, without binomial or (-c)^{N-i} factors.
#[cfg(test)]
pub(crate) fn single_bracket(i: u32, t: f64, m: u32, c: f64, half: bool) -> Result<ScaledSum, SpecialError> {
    let mut terms = Vec::new();
    bracket_terms(i, t, m, c, if half { 0.5 } else { 0.0 }, &mut terms)?;
    Ok(combine(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_single_interferer_closed_form() {
        // m = N = 1: e^c[Γ(2,c(1+t))/(1+t)² - Γ(2,c(1+2t))/(1+2t)²]
        let (t, c) = (0.7f64, 0.3f64);
        let g2 = |x: f64| (1.0 + x) * (-x).exp();
        let want = c.exp() * (g2(c * (1.0 + t)) / (1.0 + t).powi(2) - g2(c * (1.0 + 2.0 * t)) / (1.0 + 2.0 * t).powi(2));
        let s = outer_sum(t, 1, 1, c, false).unwrap();
        let got = s.value * s.scale.exp();
        assert!(((got - want) / want).abs() < 1e-14);
        assert!(s.rel_error < 1e-13);
    }

    #[test]
    fn error_estimate_flags_cancellation() {
        let benign = outer_sum(1.0, 1, 1, 1.0, false).unwrap();
        assert!(benign.rel_error < 1e-13);
        let small_t = outer_sum(1e-4, 3, 2, 1.0, false).unwrap();
        assert!(small_t.rel_error > 1e-6);
        let big_ct = outer_sum(30.0, 1, 9, 10.0, true).unwrap();
        assert!(big_ct.rel_error > 1e-6);
    }
}
