//! Cancellation-free evaluation of the envelope-ratio integrals.
//!
//! Both the ratio density and the LCR integral have the form
//!
//! ```text
//! K·∫_σ^∞ y^p (y²-σ²)^{N-1} e^{-b(y²-σ²)} e^{-r y²} P(m, r y²) dy,   r = a g²
//! ```
//!
//! With y = σ + w, (y²-σ²)^{N-1} = w^{N-1}(w+2σ)^{N-1} and y^p both expand
//! into binomial sums with nonnegative coefficients, leaving only moments
//! I_k(β) = ∫_0^∞ w^k e^{-β(w²+2σw)} dw of a shifted Gaussian. P(m, ·) is
//! taken either as 1 - e^{-u}Σ_{j<m} (when that difference is benign) or as
//! the positive tail e^{-u}Σ_{j≥m}. Every sum is over positive terms and is
//! accumulated in log space.

use crate::model::SystemConfig;
use crate::specfun::{erfcx, ln_gamma_unchecked};
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

const LN_FACT_SIZE: usize = 8192;

fn ln_fact(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| (0..LN_FACT_SIZE).map(|k| ln_gamma_unchecked(k as f64 + 1.0)).collect());
    if k < LN_FACT_SIZE {
        t[k]
    } else {
        ln_gamma_unchecked(k as f64 + 1.0)
    }
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_fact(n) - ln_fact(k) - ln_fact(n - k)
}

/// Running log-sum-exp of positive terms given by their logarithms.
#[derive(Debug, Clone, Copy)]
struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, scaled: 0.0 }
    }

    fn add(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.max {
            self.scaled = self.scaled * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        } else {
            self.scaled += (ln_term - self.max).exp();
        }
    }

    fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// ln I_k(β, σ) for k = 0..=kmax.
///
/// Ratios ρ_k = I_{k+1}/I_k obey ρ_k = k/(2βρ_{k-1}) - σ. Upward this
/// amplifies errors by about exp(2σ√β·√(2k)), so it is used only while that
/// factor stays below 10³; otherwise the ratios come from the stable
/// downward form ρ_{k-1} = k/(2β(ρ_k + σ)), started far enough above kmax
/// that the starting guess has been damped below rounding.
pub(crate) fn ln_shifted_moments(kmax: usize, beta: f64, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let ln_beta = beta.ln();
    if sigma == 0.0 {
        for k in 0..=kmax {
            let h = 0.5 * (k as f64 + 1.0);
            out.push(ln_gamma_unchecked(h) - LN_2 - h * ln_beta);
        }
        return out;
    }
    let sb = beta.sqrt();
    let z = sigma * sb;
    let ln_i0 = 0.5 * PI.ln() - LN_2 - 0.5 * ln_beta + erfcx(z).ln();
    out.push(ln_i0);
    if kmax == 0 {
        return out;
    }
    let growth = 2.0 * z * (2.0 * kmax as f64 + 2.0).sqrt();
    let mut ratios = vec![0.0; kmax];
    if growth < 6.9 {
        let mut rho = 1.0 / (2.0 * beta * ln_i0.exp()) - sigma;
        ratios[0] = rho;
        for (k, slot) in ratios.iter_mut().enumerate().skip(1) {
            rho = k as f64 / (2.0 * beta * rho) - sigma;
            *slot = rho;
        }
    } else {
        let root = (2.0 * kmax as f64 + 2.0).sqrt() + 20.0 / z;
        let start = ((0.5 * root * root).ceil() as usize).max(kmax + 16);
        let mut rho = 0.5 * (-sigma + (sigma * sigma + 2.0 * (start as f64 + 1.0) / beta).sqrt());
        for k in (1..=start).rev() {
            rho = k as f64 / (2.0 * beta * (rho + sigma));
            if k - 1 < kmax {
                ratios[k - 1] = rho;
            }
        }
    }
    let mut acc = ln_i0;
    for rho in ratios {
        acc += rho.ln();
        out.push(acc);
    }
    out
}

/// Parameters of the integrals for one link configuration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RatioKernel {
    m: usize,
    /// N - 1 with N = m_I·n.
    n1: usize,
    a: f64,
    b: f64,
    sigma: f64,
    s: f64,
    ln_norm: f64,
}

impl RatioKernel {
    pub(crate) fn new(cfg: &SystemConfig) -> Self {
        let m = cfg.m_s as usize;
        let big_n = cfg.interference_order() as usize;
        let a = cfg.m_s as f64 / cfg.omega_s;
        let b = cfg.m_i as f64 / cfg.omega_i;
        let ln_norm = 3.0 * LN_2 + m as f64 * a.ln() + big_n as f64 * b.ln()
            - ln_gamma_unchecked(m as f64)
            - ln_gamma_unchecked(big_n as f64);
        RatioKernel { m, n1: big_n - 1, a, b, sigma: cfg.sigma2.sqrt(), s: cfg.sigma2, ln_norm }
    }

    /// ln ∫_σ^∞ y^p (y²-σ²)^{N-1} e^{-β(y²-σ²)} dy from a moment table.
    fn ln_m(&self, p: usize, ln_i: &[f64]) -> f64 {
        let n1 = self.n1;
        if self.sigma == 0.0 {
            return ln_i[p + 2 * n1];
        }
        let ln_s = self.sigma.ln();
        let ln_2s = LN_2 + ln_s;
        let mut acc = LogSum::new();
        for i in 0..=p {
            let ci = ln_binom(p, i) + (p - i) as f64 * ln_s;
            for l in 0..=n1 {
                acc.add(ci + ln_binom(n1, l) + (n1 - l) as f64 * ln_2s + ln_i[n1 + i + l]);
            }
        }
        acc.ln()
    }

    /// ln of 8a^m b^N g^{2m-1}/(Γ(m)Γ(N)) · ∫ y^{2m+extra} … P(m, r y²) dy.
    ///
    /// `extra = 1` gives the envelope-ratio density, `extra = 0` the
    /// integral ∫ f_{x0}(gy) f_y(y) dy of the LCR.
    pub(crate) fn ln_value(&self, g: f64, extra: usize) -> f64 {
        if g <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let m = self.m;
        let n1 = self.n1;
        let p0 = 2 * m + extra;
        let r = self.a * g * g;
        let ln_r = r.ln();
        let ln_pref = self.ln_norm + (2.0 * m as f64 - 1.0) * g.ln();

        let t1 = ln_shifted_moments(p0 + 2 * n1, self.b + r, self.sigma);
        let lh1 = -r * self.s + self.ln_m(p0, &t1);

        let beta2 = self.b + 2.0 * r;
        let head_term = |j: usize, table: &[f64]| {
            j as f64 * ln_r - ln_fact(j) - 2.0 * r * self.s + self.ln_m(p0 + 2 * j, table)
        };
        let t2 = ln_shifted_moments(p0 + 2 * (m - 1) + 2 * n1, beta2, self.sigma);
        let mut head = LogSum::new();
        for j in 0..m {
            head.add(head_term(j, &t2));
        }
        let lh2 = head.ln();
        let ratio = (lh2 - lh1).exp();
        if ratio < 0.5 {
            return ln_pref + lh1 + (-ratio).ln_1p();
        }

        // P(m, ·) is small over the bulk of the integral: sum its tail
        let mut span = m + 64;
        let mut table = ln_shifted_moments(p0 + 2 * span + 2 * n1, beta2, self.sigma);
        let mut tail = LogSum::new();
        let mut prev = f64::INFINITY;
        for j in m..m + 100_000 {
            if j > span {
                span *= 2;
                table = ln_shifted_moments(p0 + 2 * span + 2 * n1, beta2, self.sigma);
            }
            let term = head_term(j, &table);
            tail.add(term);
            if term == f64::NEG_INFINITY || (j > m + 2 && term < prev && term < tail.ln() - 40.0) {
                break;
            }
            prev = term;
        }
        ln_pref + tail.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate_with_breakpoints, QuadratureSpec};

    fn quad_moment(k: usize, beta: f64, sigma: f64) -> f64 {
        let spec = QuadratureSpec::new(1e-300, 1e-13, 2000).unwrap();
        let scale = (k as f64 + 1.0).sqrt() / beta.sqrt();
        let pts = [0.0, 0.25 * scale, scale, 2.0 * scale, 4.0 * scale, f64::INFINITY];
        let ln_peak = {
            // integrand maximum, to keep the quadrature in range
            let w = 0.5 * (-sigma + (sigma * sigma + 2.0 * k as f64 / beta).sqrt());
            if w > 0.0 { k as f64 * w.ln() - beta * (w * w + 2.0 * sigma * w) } else { 0.0 }
        };
        let v = integrate_with_breakpoints(
            |w: f64| {
                if w == 0.0 {
                    return if k == 0 { (-ln_peak).exp() } else { 0.0 };
                }
                (k as f64 * w.ln() - beta * (w * w + 2.0 * sigma * w) - ln_peak).exp()
            },
            &pts,
            &spec,
        )
        .unwrap();
        v.ln() + ln_peak
    }

    #[test]
    fn moments_match_quadrature() {
        for &(beta, sigma) in &[(1.0, 0.0), (2.0, 0.01), (0.3, 0.5), (5.0, 3.0), (1e4, 0.2), (1e-3, 40.0)] {
            let t = ln_shifted_moments(300, beta, sigma);
            for &k in &[0usize, 1, 2, 7, 40, 151, 300] {
                let q = quad_moment(k, beta, sigma);
                assert!((t[k] - q).abs() < 1e-11 * q.abs().max(1.0), "β={beta} σ={sigma} k={k}: {} vs {q}", t[k]);
            }
        }
    }

    #[test]
    fn log_sum() {
        let mut s = LogSum::new();
        for v in [1.0f64, 2.0, 3.0] {
            s.add(v.ln());
        }
        assert!((s.ln() - 6f64.ln()).abs() < 1e-15);
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
    }
}
