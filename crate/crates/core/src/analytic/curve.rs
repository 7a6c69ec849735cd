//! Sampled statistic curves over threshold or interferer-count grids.

use super::ratio::integrate_ratio_pdf;
use super::{afd, envelope_ratio_pdf, level_crossing_rate, outage_probability, sinr_pdf, AfdFlag, AnalyticError};
use crate::model::{derive, Regime, SystemConfig};
use crate::specfun::QuadratureSpec;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Statistic {
    OutageProb,
    Lcr,
    Afd,
    Pdf,
}

/// `DopplerNormalized` divides LCR by f_m0 and multiplies AFD by f_m0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Normalization {
    Raw,
    DopplerNormalized,
}

/// What the abscissa of a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    /// SINR threshold z.
    Sinr,
    /// Envelope-ratio threshold g = √z.
    EnvelopeRatio,
    /// Number of interferers n at a fixed SINR threshold.
    Interferers,
}

/// A grid point whose evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveGap {
    pub index: usize,
    pub abscissa: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatCurve {
    pub axis: Axis,
    pub abscissae: Vec<f64>,
    /// `None` where evaluation failed; see `gaps`.
    pub values: Vec<Option<f64>>,
    pub statistic: Statistic,
    pub normalization: Normalization,
    pub gaps: Vec<CurveGap>,
}

impl StatCurve {
    /// First grid index attaining the largest value, with its abscissa.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| (i, self.abscissae[i]))
    }

    /// Threshold of the LCR maximum (th₀); `None` for other statistics.
    pub fn th0(&self) -> Option<f64> {
        if self.statistic == Statistic::Lcr {
            self.argmax().map(|(_, x)| x)
        } else {
            None
        }
    }

    pub fn max_value(&self) -> Option<f64> {
        self.argmax().and_then(|(i, _)| self.values[i])
    }

    /// Values as plain numbers, NaN in gaps.
    pub fn dense(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }
}

/// `points` values from `lo` to `hi` equally spaced in log10, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, AnalyticError> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || points < 2 {
        return Err(AnalyticError::Domain(format!(
            "log_grid: need 0 < lo < hi < ∞ and at least 2 points, got {lo}, {hi}, {points}"
        )));
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (points - 1) as f64;
    let mut g: Vec<f64> = (0..points).map(|k| 10f64.powf(a + k as f64 * step)).collect();
    g[0] = lo;
    g[points - 1] = hi;
    Ok(g)
}

/// SINR thresholds from 10⁻³ to 10³ times the link's natural scale (μ, or
/// Ω_S/σ² without interference), 121 points.
pub fn default_grid(cfg: &SystemConfig) -> Result<Vec<f64>, AnalyticError> {
    let scale = derive(cfg)?.threshold_scale(cfg);
    Ok(log_grid(1e-3, 1e3, 121)?.into_iter().map(|x| x * scale).collect())
}

fn normalize(v: f64, statistic: Statistic, normalization: Normalization, f_m0: f64) -> f64 {
    match (normalization, statistic) {
        (Normalization::DopplerNormalized, Statistic::Lcr) => v / f_m0,
        (Normalization::DopplerNormalized, Statistic::Afd) => v * f_m0,
        _ => v,
    }
}

fn point(z: f64, cfg: &SystemConfig, statistic: Statistic, axis: Axis, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    match statistic {
        Statistic::OutageProb => outage_probability(z, cfg, spec),
        Statistic::Lcr => level_crossing_rate(z, cfg),
        Statistic::Pdf => match axis {
            Axis::EnvelopeRatio => envelope_ratio_pdf(z.sqrt(), cfg),
            _ => sinr_pdf(z, cfg),
        },
        Statistic::Afd => {
            let t = afd(z, cfg, spec)?;
            if t.flag == AfdFlag::Unbounded {
                return Err(AnalyticError::Domain(format!(
                    "crossing rate underflows at z = {z} while the outage probability is {}",
                    t.outage
                )));
            }
            Ok(t.value)
        }
    }
}

/// Evaluates `statistic` at each threshold (SINR z, or envelope ratio g
/// when `axis` is [`Axis::EnvelopeRatio`]). Points run in parallel; the
/// result does not depend on scheduling.
///
/// With noise and interference the outage probability (and hence the AFD)
/// is accumulated segment by segment along the grid, which keeps it
/// nondecreasing.
pub fn sweep(
    cfg: &SystemConfig,
    thresholds: &[f64],
    axis: Axis,
    statistic: Statistic,
    normalization: Normalization,
    spec: &QuadratureSpec,
) -> Result<StatCurve, AnalyticError> {
    let d = derive(cfg)?;
    if axis == Axis::Interferers {
        return Err(AnalyticError::Domain("sweep: use sweep_interferers for the interferer axis".into()));
    }
    if thresholds.is_empty() || thresholds.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(AnalyticError::Domain("sweep: thresholds must be finite, nonnegative and nonempty".into()));
    }
    if thresholds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalyticError::Domain("sweep: thresholds must be strictly increasing".into()));
    }
    let zs: Vec<f64> = match axis {
        Axis::EnvelopeRatio => thresholds.iter().map(|g| g * g).collect(),
        _ => thresholds.to_vec(),
    };

    let cumulative = d.regime == Regime::General && matches!(statistic, Statistic::OutageProb | Statistic::Afd);
    let raw: Vec<Result<f64, AnalyticError>> = if cumulative {
        cumulative_outage(cfg, &zs, d.mu, spec, statistic)
    } else {
        zs.par_iter().map(|&z| point(z, cfg, statistic, axis, spec)).collect()
    };

    let mut values = Vec::with_capacity(raw.len());
    let mut gaps = Vec::new();
    for (i, r) in raw.into_iter().enumerate() {
        match r {
            Ok(v) if v.is_finite() => values.push(Some(normalize(v, statistic, normalization, cfg.f_m0))),
            Ok(v) => {
                gaps.push(CurveGap { index: i, abscissa: thresholds[i], message: format!("non-finite value {v}") });
                values.push(None);
            }
            Err(e) => {
                gaps.push(CurveGap { index: i, abscissa: thresholds[i], message: e.to_string() });
                values.push(None);
            }
        }
    }
    Ok(StatCurve { axis, abscissae: thresholds.to_vec(), values, statistic, normalization, gaps })
}

fn cumulative_outage(
    cfg: &SystemConfig,
    zs: &[f64],
    mu: f64,
    spec: &QuadratureSpec,
    statistic: Statistic,
) -> Vec<Result<f64, AnalyticError>> {
    let segments: Vec<Result<f64, AnalyticError>> = (0..zs.len())
        .into_par_iter()
        .map(|k| {
            let lo = if k == 0 { 0.0 } else { zs[k - 1].sqrt() };
            integrate_ratio_pdf(lo, zs[k].sqrt(), mu, spec, |g| envelope_ratio_pdf(g, cfg))
        })
        .collect();
    let mut outage = Vec::with_capacity(zs.len());
    let mut acc = Ok(0.0);
    for s in segments {
        acc = match (acc, s) {
            (Ok(a), Ok(s)) => Ok(a + s),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        outage.push(acc.clone().map(|v: f64| v.min(1.0)));
    }
    if statistic == Statistic::OutageProb {
        return outage;
    }
    zs.par_iter()
        .zip(outage.into_par_iter())
        .map(|(&z, f)| {
            let f = f?;
            if z == 0.0 {
                return Ok(0.0);
            }
            let n = level_crossing_rate(z, cfg)?;
            if n > 0.0 {
                Ok(f / n)
            } else if f > 0.0 {
                Err(AnalyticError::Domain(format!(
                    "crossing rate underflows at z = {z} while the outage probability is {f}"
                )))
            } else {
                Ok(0.0)
            }
        })
        .collect()
}

/// Evaluates `statistic` at a fixed SINR threshold `z` for each interferer
/// count in `ns` (other parameters unchanged).
pub fn sweep_interferers(
    cfg: &SystemConfig,
    ns: &[u32],
    z: f64,
    statistic: Statistic,
    normalization: Normalization,
    spec: &QuadratureSpec,
) -> Result<StatCurve, AnalyticError> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalyticError::Domain("sweep_interferers: counts must be nonempty and strictly increasing".into()));
    }
    let raw: Vec<Result<f64, AnalyticError>> = ns
        .par_iter()
        .map(|&n| {
            let c = SystemConfig { n, ..*cfg };
            derive(&c)?;
            point(z, &c, statistic, Axis::Sinr, spec)
        })
        .collect();
    let mut values = Vec::with_capacity(ns.len());
    let mut gaps = Vec::new();
    for (i, r) in raw.into_iter().enumerate() {
        match r {
            Ok(v) if v.is_finite() => values.push(Some(normalize(v, statistic, normalization, cfg.f_m0))),
            other => {
                let message = match other {
                    Err(e) => e.to_string(),
                    Ok(v) => format!("non-finite value {v}"),
                };
                gaps.push(CurveGap { index: i, abscissa: ns[i] as f64, message });
                values.push(None);
            }
        }
    }
    Ok(StatCurve {
        axis: Axis::Interferers,
        abscissae: ns.iter().map(|&n| n as f64).collect(),
        values,
        statistic,
        normalization,
        gaps,
    })
}
