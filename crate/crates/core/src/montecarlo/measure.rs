//! Empirical crossing rates, outage fractions and fade durations.

use super::{FadingTrace, SimError};
use serde::Serialize;

/// Number of contiguous batches behind the standard errors.
pub const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalStats {
    /// Envelope-ratio threshold g.
    pub threshold: f64,
    pub upcrossings: u64,
    /// Upcrossings inside an interval where the selected branch changed.
    pub switching_upcrossings: u64,
    pub total_time: f64,
    pub below_time: f64,
    /// Upcrossings per second.
    pub lcr_hat: f64,
    pub op_hat: f64,
    /// Seconds; NaN without upcrossings.
    pub afd_hat: f64,
    pub stderr_lcr: f64,
    pub stderr_op: f64,
    pub stderr_afd: f64,
}

/// Counts over one stretch of samples; sums of these are exact aggregates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrossingTally {
    pub upcrossings: u64,
    pub switching_upcrossings: u64,
    pub below_time: f64,
    pub total_time: f64,
}

impl CrossingTally {
    pub fn merge(self, other: CrossingTally) -> CrossingTally {
        CrossingTally {
            upcrossings: self.upcrossings + other.upcrossings,
            switching_upcrossings: self.switching_upcrossings + other.switching_upcrossings,
            below_time: self.below_time + other.below_time,
            total_time: self.total_time + other.total_time,
        }
    }
}

/// Tally over the intervals between consecutive samples of `series`.
///
/// An upcrossing is g_i < th ≤ g_{i+1}; time below th is interpolated
/// linearly inside intervals that straddle it. With `branch` given,
/// upcrossings where branch_i ≠ branch_{i+1} are also counted separately.
pub fn tally(series: &[f64], branch: Option<&[u8]>, dt: f64, threshold: f64) -> CrossingTally {
    let mut t = CrossingTally::default();
    for (i, w) in series.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        t.total_time += dt;
        let (a_below, b_below) = (a < threshold, b < threshold);
        if a_below && !b_below {
            t.upcrossings += 1;
            if branch.is_some_and(|s| s[i] != s[i + 1]) {
                t.switching_upcrossings += 1;
            }
        }
        t.below_time += match (a_below, b_below) {
            (true, true) => dt,
            (false, false) => 0.0,
            (true, false) => dt * (threshold - a) / (b - a),
            (false, true) => dt * (a - threshold) / (a - b),
        };
    }
    t
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Statistics of the selected envelope ratio of a trace at each threshold
/// (g domain; z = g²).
pub fn measure_trace(trace: &FadingTrace, thresholds: &[f64]) -> Result<Vec<EmpiricalStats>, SimError> {
    measure_series(&trace.selected_ratio, Some(&trace.selected_branch), trace.time_step, thresholds)
}

/// Statistics of a sampled series at each threshold; `branch` enables the
/// switching-crossing count.
pub fn measure_series(
    series: &[f64],
    branch: Option<&[u8]>,
    dt: f64,
    thresholds: &[f64],
) -> Result<Vec<EmpiricalStats>, SimError> {
    if branch.is_some_and(|b| b.len() != series.len()) {
        return Err(SimError::Format("branch and ratio series differ in length".into()));
    }
    if series.len() < 2 * BATCHES + 1 {
        return Err(SimError::Empty(format!("{} samples cannot be measured", series.len())));
    }
    let intervals = series.len() - 1;
    let bounds: Vec<(usize, usize)> =
        (0..BATCHES).map(|b| (b * intervals / BATCHES, (b + 1) * intervals / BATCHES)).collect();
    Ok(thresholds
        .iter()
        .map(|&th| {
            let parts: Vec<CrossingTally> =
                bounds.iter().map(|&(lo, hi)| tally(&series[lo..=hi], branch.map(|b| &b[lo..=hi]), dt, th)).collect();
            let whole = parts.iter().fold(CrossingTally::default(), |a, b| a.merge(*b));
            let lcr_hat = whole.upcrossings as f64 / whole.total_time;
            let op_hat = whole.below_time / whole.total_time;
            let afd_hat = if whole.upcrossings > 0 { whole.below_time / whole.upcrossings as f64 } else { f64::NAN };
            let lcrs: Vec<f64> = parts.iter().map(|p| p.upcrossings as f64 / p.total_time).collect();
            let ops: Vec<f64> = parts.iter().map(|p| p.below_time / p.total_time).collect();
            let (_, sd_n) = mean_sd(&lcrs);
            let (_, sd_f) = mean_sd(&ops);
            let b = BATCHES as f64;
            // delta method for the ratio F/N with batch covariance
            let cov = lcrs.iter().zip(&ops).map(|(n, f)| (n - lcr_hat) * (f - op_hat)).sum::<f64>() / (b - 1.0);
            let stderr_afd = if whole.upcrossings > 0 {
                let rel2 = (sd_f / op_hat).powi(2) + (sd_n / lcr_hat).powi(2) - 2.0 * cov / (op_hat * lcr_hat);
                afd_hat * (rel2.max(0.0) / b).sqrt()
            } else {
                f64::NAN
            };
            EmpiricalStats {
                threshold: th,
                upcrossings: whole.upcrossings,
                switching_upcrossings: whole.switching_upcrossings,
                total_time: whole.total_time,
                below_time: whole.below_time,
                lcr_hat,
                op_hat,
                afd_hat,
                stderr_lcr: sd_n / b.sqrt(),
                stderr_op: sd_f / b.sqrt(),
                stderr_afd,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_never_crosses() {
        let s = vec![1.0; 1000];
        let m = measure_series(&s, None, 0.1, &[0.5, 1.0, 2.0]).unwrap();
        assert!(m.iter().all(|e| e.upcrossings == 0));
        assert_eq!(m[0].op_hat, 0.0);
        assert_eq!(m[2].op_hat, 1.0);
        assert!(m[0].afd_hat.is_nan());
    }

    #[test]
    fn triangle_wave() {
        // 0,1,2,3,2,1,0,1,... crosses 1.5 upward once per period of 6 samples
        let s: Vec<f64> = (0..601).map(|i| [0.0, 1.0, 2.0, 3.0, 2.0, 1.0][i % 6]).collect();
        let m = measure_series(&s, None, 1.0, &[1.5, -1.0]).unwrap();
        assert_eq!(m[0].upcrossings, 100);
        assert!((m[0].op_hat - 0.5).abs() < 1e-12);
        assert!((m[0].afd_hat - 3.0).abs() < 1e-12);
        assert_eq!((m[1].op_hat, m[1].upcrossings), (0.0, 0));
    }

    #[test]
    fn tallies_merge_exactly() {
        let s: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin()).collect();
        let whole = tally(&s, None, 0.5, 0.2);
        let split = tally(&s[..=250], None, 0.5, 0.2).merge(tally(&s[250..], None, 0.5, 0.2));
        assert_eq!(whole.upcrossings, split.upcrossings);
        assert!((whole.below_time - split.below_time).abs() < 1e-12);
    }

    #[test]
    fn switching_crossings_are_attributed() {
        let s = [0.0, 2.0, 0.0, 2.0, 0.0, 2.0];
        let b = [1u8, 2, 2, 2, 1, 1];
        let t = tally(&s, Some(&b), 1.0, 1.0);
        assert_eq!((t.upcrossings, t.switching_upcrossings), (3, 1));
    }

    #[test]
    fn too_short() {
        assert!(measure_series(&[1.0, 2.0], None, 1.0, &[1.5]).is_err());
    }
}
