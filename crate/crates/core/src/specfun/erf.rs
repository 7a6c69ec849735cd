//! Complementary error function, plain and exponentially scaled.

use std::f64::consts::PI;

/// Below this the Maclaurin series of erf is used, above it the continued
/// fraction for erfc.
const SERIES_LIMIT: f64 = 1.5;

/// erfc(x) = 1 - erf(x).
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < SERIES_LIMIT {
        1.0 - erf_series(x)
    } else if x > 27.3 {
        0.0
    } else {
        (-x * x).exp() * erfcx_cf(x)
    }
}

/// Scaled complementary error function e^{x²}·erfc(x), x ≥ 0.
///
/// Stays finite (≈ 1/(x√π)) where erfc itself underflows.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < SERIES_LIMIT {
        (x * x).exp() * (1.0 - erf_series(x))
    } else {
        erfcx_cf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/√π Σ (-1)^n x^{2n+1} / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

/// e^{x²} erfc(x) = (1/√π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
fn erfcx_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / (f * PI.sqrt())
}
