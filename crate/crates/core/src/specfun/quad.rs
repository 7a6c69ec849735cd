//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Semi-infinite ranges are mapped onto [0, 1) with t = lo + u/(1-u).

use super::SpecialError;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Tolerances and work limit for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, SpecialError> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions == 0 {
            return Err(SpecialError::Domain {
                function: "QuadratureSpec::new",
                detail: format!(
                    "need positive tolerances and at least one subdivision, got ({abs_tol}, {rel_tol}, {max_subdivisions})"
                ),
            });
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions })
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_subdivisions: 2000 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance after {subdivisions} subdivisions (estimate {estimate:e}, error bound {error_bound:e})")]
    NotConverged { estimate: f64, error_bound: f64, subdivisions: usize },
    #[error("integrand returned a non-finite value near t = {at}")]
    NonFinite { at: f64 },
    #[error("invalid integration range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
}

impl QuadError {
    /// The partial estimate, when one exists.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            QuadError::NotConverged { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// A piece of the integration domain; `mapped` pieces live in u-space
/// of the tail substitution anchored at `base`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    mapped: Option<f64>,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64, mapped: Option<f64>) -> Result<f64, QuadError> {
    let (v, at) = match mapped {
        None => (f(x), x),
        Some(base) => {
            let r = 1.0 - x;
            let t = base + x / r;
            if !t.is_finite() {
                return Ok(0.0);
            }
            (f(t) / (r * r), t)
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite { at })
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, mapped: Option<f64>) -> Result<Piece, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center, mapped)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx, mapped)?;
        let f2 = eval(f, center + dx, mapped)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let value = resk * half;
    resabs *= h;
    resasc *= h;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Piece { a, b, mapped, value, error })
}

/// ∫_lo^hi f(t) dt; `hi` may be `f64::INFINITY`.
///
/// Converged when the summed error estimate is at most
/// max(abs_tol, rel_tol·|result|).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    integrate_with_breakpoints(f, &[lo, hi], spec)
}

/// Like [`integrate_adaptive`], seeded with the given ordered breakpoints
/// (first and last are the limits). Useful when the integrand has sharp
/// features at known locations.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, QuadError> {
    if points.len() < 2 {
        return Err(QuadError::InvalidRange { lo: f64::NAN, hi: f64::NAN });
    }
    let lo = points[0];
    let hi = points[points.len() - 1];
    if lo.is_nan() || hi.is_nan() || !lo.is_finite() && lo != hi {
        return Err(QuadError::InvalidRange { lo, hi });
    }
    if lo == hi {
        return Ok(0.0);
    }
    if hi < lo {
        let rev: Vec<f64> = points.iter().rev().copied().collect();
        return integrate_with_breakpoints(f, &rev, spec).map(|v| -v);
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b >= a) {
            return Err(QuadError::InvalidRange { lo: a, hi: b });
        }
        if a == b {
            continue;
        }
        let piece = if b.is_infinite() { gk15(&f, 0.0, 1.0, Some(a))? } else { gk15(&f, a, b, None)? };
        heap.push(piece);
    }
    let total = |heap: &BinaryHeap<Piece>| {
        heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let mut subdivisions = heap.len();
    loop {
        let (value, error) = total(&heap);
        if error <= spec.target(value) {
            return Ok(value);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(QuadError::NotConverged { estimate: value, error_bound: error, subdivisions });
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; the remaining error is what it is
            heap.push(Piece { error: 0.0, ..worst });
            let (value, _) = total(&heap);
            return Err(QuadError::NotConverged { estimate: value, error_bound: error, subdivisions });
        }
        heap.push(gk15(&f, worst.a, mid, worst.mapped)?);
        heap.push(gk15(&f, mid, worst.b, worst.mapped)?);
        subdivisions += 1;
    }
}
