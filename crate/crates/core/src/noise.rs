//! Laplace noise and deterministic random-stream derivation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Laplace(0, b) by CDF inversion: u ~ Uniform(-1/2, 1/2),
/// return -b sign(u) ln(1 - 2|u|).
pub fn laplace_noise<R: rand::Rng + ?Sized>(b: f64, rng: &mut R) -> f64 {
    assert!(b > 0.0, "laplace scale must be positive");
    let u: f64 = rng.gen::<f64>() - 0.5;
    laplace_from_uniform(b, u)
}

/// Deterministic part of the sampler, exposed for the CDF unit tests.
pub fn laplace_from_uniform(b: f64, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let t = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    -b * u.signum() * t.ln()
}

/// Independent deterministic stream `stream` of the master seed.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_maps_to_zero() {
        assert_eq!(laplace_from_uniform(3.0, 0.0), 0.0);
    }

    #[test]
    fn cdf_inversion_at_known_quantile() {
        // u = 1/2 - e^{-1}/2 gives exactly +b.
        let b = 2.5;
        let u = 0.5 - (-1.0f64).exp() / 2.0;
        let x = laplace_from_uniform(b, u);
        assert!((x - b).abs() < 1e-12);
        let x_neg = laplace_from_uniform(b, -u);
        assert!((x_neg + b).abs() < 1e-12);
    }

    #[test]
    fn empirical_mean_near_zero() {
        let b = 1.5;
        let trials = 100_000;
        let mut rng = stream_rng(99, 0);
        let mean: f64 = (0..trials).map(|_| laplace_noise(b, &mut rng)).sum::<f64>()
            / trials as f64;
        // CLT band: 3 * (b sqrt(2)) / sqrt(trials).
        let band = 3.0 * b * 2f64.sqrt() / (trials as f64).sqrt();
        assert!(mean.abs() <= band, "mean {mean}, band {band}");
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<f64> = {
            let mut r = stream_rng(7, 1);
            (0..5).map(|_| laplace_noise(1.0, &mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = stream_rng(7, 1);
            (0..5).map(|_| laplace_noise(1.0, &mut r)).collect()
        };
        let c: Vec<f64> = {
            let mut r = stream_rng(7, 2);
            (0..5).map(|_| laplace_noise(1.0, &mut r)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
