//! Sum-of-sinusoids Gaussian processes with a Clarke Doppler spectrum and
//! the Nakagami envelopes built from them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Unit-variance, zero-mean Gaussian process with autocorrelation close to
/// J₀(2π f_m τ), sampled at `rate` Hz.
///
/// G(t) = √(2/L) Σ_l cos(2π f_m cos θ_l · t + φ_l), l = 1..L, with
/// θ_l = (2πl - π + α)/(4L) on the quarter circle, one random offset α per
/// process and independent uniform phases φ_l. Restricting the angles to a
/// quarter circle keeps all L frequencies distinct; over the full circle
/// they pair up and beat slowly, which biases the sample variance.
pub fn gen_gaussian_process(f_m: f64, length: usize, rate: f64, num_sinusoids: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let l = num_sinusoids as f64;
    let alpha: f64 = rng.gen_range(-PI..PI);
    let mut omega = Vec::with_capacity(num_sinusoids);
    let mut phase = Vec::with_capacity(num_sinusoids);
    for k in 0..num_sinusoids {
        let theta = (2.0 * PI * (k + 1) as f64 - PI + alpha) / (4.0 * l);
        omega.push(2.0 * PI * f_m * theta.cos() / rate);
        phase.push(rng.gen_range(-PI..PI));
    }
    let amp = (2.0 / l).sqrt();
    (0..length)
        .map(|i| {
            let t = i as f64;
            amp * omega.iter().zip(&phase).map(|(w, p)| (w * t + p).cos()).sum::<f64>()
        })
        .collect()
}

/// Nakagami-m envelope √(Ω/(2m) Σ_{p=1}^{2m} G_p²) from 2m independent
/// Gaussian processes.
pub fn gen_nakagami_envelope(
    m: u32,
    omega: f64,
    f_m: f64,
    length: usize,
    rate: f64,
    num_sinusoids: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut power = vec![0.0; length];
    for _ in 0..2 * m {
        let g = gen_gaussian_process(f_m, length, rate, num_sinusoids, rng);
        for (p, x) in power.iter_mut().zip(g) {
            *p += x * x;
        }
    }
    let scale = omega / (2.0 * m as f64);
    power.into_iter().map(|p| (p * scale).sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn gaussian_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = gen_gaussian_process(10.0, 1_000_000, 640.0, 64, &mut rng);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn autocorrelation_follows_bessel() {
        // lag f_m τ = 1/4: J0(π/2) ≈ 0.4720
        let mut acc = 0.0;
        let runs = 40;
        for s in 0..runs {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + s);
            let x = gen_gaussian_process(1.0, 20_000, 64.0, 64, &mut rng);
            let lag = 16;
            let r: f64 = x.iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / (x.len() - lag) as f64;
            acc += r;
        }
        let r = acc / runs as f64;
        assert!((r - 0.472_001_2).abs() < 0.03, "{r}");
    }
}
