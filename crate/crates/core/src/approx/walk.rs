//! Hit-and-run sampling and covariance-based rounding.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

use super::membership::{dot_f64, MembershipOracle};

/// Standard normal via Box-Muller.
pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// One hit-and-run step inside the halfspace body, optionally intersected
/// with a centered ball of radius `ball`: pick a uniform direction, then a
/// uniform point of the chord through the current state.
pub fn hit_and_run_step<R: Rng + ?Sized>(
    oracle: &MembershipOracle,
    x: &mut [f64],
    ball: Option<f64>,
    rng: &mut R,
) {
    let d = x.len();
    let mut dir = vec![0.0; d];
    loop {
        let mut norm = 0.0;
        for v in dir.iter_mut() {
            *v = gaussian(rng);
            norm += *v * *v;
        }
        norm = norm.sqrt();
        if norm > 1e-12 {
            for v in dir.iter_mut() {
                *v /= norm;
            }
            break;
        }
    }
    let Some((mut lo, mut hi)) = oracle.chord(x, &dir) else {
        return; // numerically outside; stay put
    };
    if let Some(r) = ball {
        // Solve |x + t dir| = r: t^2 + 2(x.dir)t + |x|^2 - r^2 = 0.
        let b = dot_f64(x, &dir);
        let c = dot_f64(x, x) - r * r;
        let disc = b * b - c;
        if disc <= 0.0 {
            return;
        }
        let sq = disc.sqrt();
        lo = lo.max(-b - sq);
        hi = hi.min(-b + sq);
        if lo >= hi {
            return;
        }
    }
    let t = lo + (hi - lo) * rng.gen::<f64>();
    for (xi, di) in x.iter_mut().zip(&dir) {
        *xi += t * di;
    }
}

/// Affine change of variables y = A (x - center) with tracked determinant.
#[derive(Debug, Clone)]
pub struct RoundingMap {
    pub center: Vec<f64>,
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// |det(matrix)|: volumes scale by this factor under the map.
    pub det: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl RoundingMap {
    pub fn identity(center: &[f64]) -> Self {
        let d = center.len();
        Self {
            center: center.to_vec(),
            matrix: DMatrix::identity(d, d),
            inverse: DMatrix::identity(d, d),
            det: 1.0,
            sigma_min: 1.0,
            sigma_max: 1.0,
        }
    }

    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        let v = DVector::from_iterator(
            x.len(),
            x.iter().zip(&self.center).map(|(a, c)| a - c),
        );
        (&self.matrix * v).iter().cloned().collect()
    }

    pub fn unmap(&self, y: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(y);
        let x = &self.inverse * v;
        x.iter().zip(&self.center).map(|(a, c)| a + c).collect()
    }
}

/// Rounding parameters; counts scale with dimension.
#[derive(Debug, Clone, Copy)]
pub struct WalkConfig {
    pub rounding_samples: usize,
    pub thin: usize,
    pub burn: usize,
}

impl WalkConfig {
    pub fn for_dim(d: usize) -> Self {
        Self {
            rounding_samples: 3000 + 1000 * d,
            thin: 3 * d * d,
            burn: 30 * d * d,
        }
    }
}

/// Estimate the uniform-distribution covariance by hit-and-run and return
/// the whitening transform that brings the body close to isotropic position.
pub fn round_body<R: Rng + ?Sized>(
    oracle: &MembershipOracle,
    center: &[f64],
    rng: &mut R,
    cfg: WalkConfig,
) -> Result<RoundingMap> {
    let d = center.len();
    let mut x = center.to_vec();
    for _ in 0..cfg.burn {
        hit_and_run_step(oracle, &mut x, None, rng);
    }
    let mut mean = vec![0.0; d];
    let mut cov: DMatrix<f64> = DMatrix::zeros(d, d);
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(cfg.rounding_samples);
    for _ in 0..cfg.rounding_samples {
        for _ in 0..cfg.thin {
            hit_and_run_step(oracle, &mut x, None, rng);
        }
        for (m, xi) in mean.iter_mut().zip(&x) {
            *m += xi;
        }
        samples.push(x.clone());
    }
    let n = samples.len() as f64;
    for m in mean.iter_mut() {
        *m /= n;
    }
    for s in &samples {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (s[i] - mean[i]) * (s[j] - mean[j]) / n;
            }
        }
    }
    let eig = cov.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 1e-24)) {
        return Err(Error::RoundingFailed);
    }
    // Whitening: A = V diag(1/sqrt(l)) V^T (scaled so volumes track |det A|).
    let mut scale: DMatrix<f64> = DMatrix::zeros(d, d);
    let mut det = 1.0;
    let mut inv_scale: DMatrix<f64> = DMatrix::zeros(d, d);
    for i in 0..d {
        let s = 1.0 / eig.eigenvalues[i].sqrt();
        scale[(i, i)] = s;
        inv_scale[(i, i)] = 1.0 / s;
        det *= s;
    }
    let v = eig.eigenvectors;
    let a = &v * scale * v.transpose();
    let inv = &v * inv_scale * v.transpose();
    let sigmas: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| 1.0 / l.sqrt())
        .collect();
    Ok(RoundingMap {
        center: mean,
        matrix: a,
        inverse: inv,
        det: det.abs(),
        sigma_min: sigmas.iter().cloned().fold(f64::INFINITY, f64::min),
        sigma_max: sigmas.iter().cloned().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperplane::cube_facets;
    use crate::noise::stream_rng;

    fn box_oracle(w: f64, h: f64) -> MembershipOracle {
        // Axis box [0,w] x [0,h] expressed by scaled cube facets.
        use crate::hyperplane::{Halfspace, Hyperplane, Side};
        use num_bigint::BigInt;
        let scale = 1000.0;
        let mk = |coeffs: Vec<i64>, side: Side| {
            Halfspace::new(
                Hyperplane::from_coeffs(coeffs.into_iter().map(BigInt::from).collect()).unwrap(),
                side,
            )
        };
        MembershipOracle::from_halfspaces(
            vec![
                mk(vec![0, 1, 0], Side::Geq),
                mk(vec![-((w * scale) as i64), (scale as i64), 0], Side::Leq),
                mk(vec![0, 0, 1], Side::Geq),
                mk(vec![-((h * scale) as i64), 0, (scale as i64)], Side::Leq),
            ],
            0,
        )
    }

    #[test]
    fn walk_stays_inside_cube() {
        let oracle = MembershipOracle::from_halfspaces(cube_facets(3), 0);
        let mut rng = stream_rng(1, 0);
        let mut x = vec![0.5, 0.5, 0.5];
        for _ in 0..2000 {
            hit_and_run_step(&oracle, &mut x, None, &mut rng);
            assert!(oracle.query(&x));
        }
    }

    #[test]
    fn rounding_of_isotropic_body_is_near_identity() {
        let oracle = MembershipOracle::from_halfspaces(cube_facets(2), 0);
        let mut rng = stream_rng(2, 0);
        let map = round_body(&oracle, &[0.5, 0.5], &mut rng, WalkConfig::for_dim(2)).unwrap();
        let ratio = map.sigma_max / map.sigma_min;
        assert!(ratio <= 1.1, "eigenvalue ratio {ratio}");
    }

    #[test]
    fn rounding_rescales_elongated_box() {
        let oracle = box_oracle(1.0, 0.01);
        let mut rng = stream_rng(3, 0);
        let map = round_body(&oracle, &[0.5, 0.005], &mut rng, WalkConfig::for_dim(2)).unwrap();
        // True covariance diag(1/12, 1e-4/12): whitening gains ~100x on y.
        let gain = map.sigma_max / map.sigma_min;
        assert!((50.0..200.0).contains(&gain), "gain {gain}");
        // Post-transform sample covariance should be within a factor 2.
        let mut x = vec![0.5, 0.005];
        let mut vals = [0.0f64; 2];
        let mut count = 0.0;
        for _ in 0..4000 {
            for _ in 0..10 {
                hit_and_run_step(&oracle, &mut x, None, &mut rng);
            }
            let y = map.map(&x);
            vals[0] += y[0] * y[0];
            vals[1] += y[1] * y[1];
            count += 1.0;
        }
        let r = (vals[0] / count) / (vals[1] / count);
        assert!((0.5..2.0).contains(&r), "residual anisotropy {r}");
    }

    #[test]
    fn map_unmap_roundtrip() {
        let oracle = box_oracle(1.0, 0.3);
        let mut rng = stream_rng(4, 0);
        let map = round_body(&oracle, &[0.5, 0.15], &mut rng, WalkConfig::for_dim(2)).unwrap();
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let p = vec![(i % 97) as f64 / 97.0, 0.3 * ((i % 89) as f64 / 89.0)];
            let back = map.unmap(&map.map(&p));
            for (a, b) in p.iter().zip(&back) {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst <= 1e-9, "roundtrip error {worst}");
    }
}
