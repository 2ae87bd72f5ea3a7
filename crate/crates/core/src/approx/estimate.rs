//! Randomized volume estimation and almost-uniform sampling, plus the
//! approximate two-stage base case built on them.

use rand::Rng;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::mechanism::{BaseCaseRecord, RegionLadder};
use crate::rational::RationalPoint;

use super::membership::{inner_ball, MembershipOracle};
use super::walk::{round_body, RoundingMap, WalkConfig};

/// A randomized volume value with its accuracy contract and cost counters.
#[derive(Debug, Clone)]
pub struct VolumeEstimate {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phases: usize,
    pub samples_per_phase: usize,
    pub queries: u64,
}

fn unit_ball_volume(d: usize) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0 + 1.0)
}

/// Multi-phase ball-sequence estimator in the rounded space.
///
/// With B(r') inside the rounded body K' and K' inside B(R'), the bodies
/// K_i = K' cap B(r' 2^(i/d)) satisfy Vol(K_{i-1})/Vol(K_i) >= 1/2, and each
/// ratio is estimated by hit-and-run sampling in K_i. The returned value is
/// mapped back through the rounding determinant.
pub fn estimate_volume<R: Rng + ?Sized>(
    oracle: &MembershipOracle,
    rounding: &RoundingMap,
    r: f64,
    big_r: f64,
    alpha: f64,
    beta: f64,
    rng: &mut R,
) -> Result<VolumeEstimate> {
    let d = oracle.dim();
    let start_queries = oracle.query_count();
    let r_rounded = (r * rounding.sigma_min * 0.98).max(1e-14);
    let big_r_rounded = big_r * rounding.sigma_max * 1.02;
    let phases = ((d as f64) * (big_r_rounded / r_rounded).log2()).ceil().max(1.0) as usize;
    let samples = (14.0 * phases as f64 / (alpha * alpha)
        * (1.0 + (1.0 / beta.max(1e-12)).ln() / 6.0))
        .ceil() as usize;
    let cfg = WalkConfig::for_dim(d);
    // Membership in the rounded space.
    let inside = |y: &[f64]| -> bool { oracle.query(&rounding.unmap(y)) };
    let mut radii: Vec<f64> = (0..=phases)
        .map(|i| r_rounded * 2f64.powf(i as f64 / d as f64))
        .collect();
    let last = radii.len() - 1;
    radii[last] = radii[last].max(big_r_rounded);
    let mut log_volume = unit_ball_volume(d).ln() + (d as f64) * r_rounded.ln();
    let mut y = vec![0.0; d];
    for i in 1..=phases {
        let r_i = radii[i];
        let r_prev = radii[i - 1];
        let mut hits = 0usize;
        if !inside(&y) {
            y = vec![0.0; d];
        }
        for _ in 0..cfg.burn {
            hit_and_run_step_rounded(oracle, rounding, &mut y, r_i, rng);
        }
        for _ in 0..samples {
            for _ in 0..cfg.thin {
                hit_and_run_step_rounded(oracle, rounding, &mut y, r_i, rng);
            }
            let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= r_prev {
                hits += 1;
            }
        }
        if hits == 0 {
            return Err(Error::EstimationFailed(format!(
                "phase {i}/{phases}: no samples fell into the previous body"
            )));
        }
        // Vol(K_i) = Vol(K_{i-1}) / p_i.
        log_volume += (samples as f64 / hits as f64).ln();
    }
    let value = (log_volume - rounding.det.ln()).exp();
    Ok(VolumeEstimate {
        value,
        alpha,
        beta,
        phases,
        samples_per_phase: samples,
        queries: oracle.query_count() - start_queries,
    })
}

/// One hit-and-run step of the rounded body intersected with a centered ball.
fn hit_and_run_step_rounded<R: Rng + ?Sized>(
    oracle: &MembershipOracle,
    rounding: &RoundingMap,
    y: &mut [f64],
    ball: f64,
    rng: &mut R,
) {
    // Work in the original space but intersect with the rounded-space ball:
    // simpler to run the chord search directly in rounded coordinates.
    let d = y.len();
    let mut dir = vec![0.0; d];
    let mut norm = 0.0;
    for v in dir.iter_mut() {
        *v = super::walk::gaussian(rng);
        norm += *v * *v;
    }
    norm = norm.sqrt().max(1e-12);
    for v in dir.iter_mut() {
        *v /= norm;
    }
    // Chord bounds from the ball.
    let b = super::membership::dot_f64(y, &dir);
    let c = super::membership::dot_f64(y, y) - ball * ball;
    let disc = b * b - c;
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    let (mut lo, mut hi) = (-b - sq, -b + sq);
    // Refine with the halfspaces: map the line back to original coordinates.
    let x0 = rounding.unmap(y);
    let x1 = rounding.unmap(&y.iter().zip(&dir).map(|(a, b)| a + b).collect::<Vec<_>>());
    let dir_x: Vec<f64> = x1.iter().zip(&x0).map(|(a, b)| a - b).collect();
    match oracle.chord(&x0, &dir_x) {
        Some((l2, h2)) => {
            lo = lo.max(l2);
            hi = hi.min(h2);
        }
        None => return,
    }
    if lo >= hi {
        return;
    }
    let t = lo + (hi - lo) * rng.gen::<f64>();
    for (yi, di) in y.iter_mut().zip(&dir) {
        *yi += t * di;
    }
}

/// Almost-uniform point of the body: a fresh hit-and-run chain per sample,
/// with a step budget scaled by log(1/eta).
pub fn approx_uniform_sample<R: Rng + ?Sized>(
    oracle: &MembershipOracle,
    rounding: &RoundingMap,
    eta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let d = oracle.dim();
    let steps = (40.0 * (d * d) as f64 * (2.0 + (1.0 / eta.max(1e-12)).ln())).ceil() as usize;
    let mut y = vec![0.0; d];
    let mut x = rounding.unmap(&y);
    for _ in 0..steps {
        // Walk in rounded coordinates for mixing, membership in original.
        let mut dir = vec![0.0; d];
        let mut norm = 0.0;
        for v in dir.iter_mut() {
            *v = super::walk::gaussian(rng);
            norm += *v * *v;
        }
        norm = norm.sqrt().max(1e-12);
        for v in dir.iter_mut() {
            *v /= norm;
        }
        let x0 = rounding.unmap(&y);
        let x1 = rounding.unmap(&y.iter().zip(&dir).map(|(a, b)| a + b).collect::<Vec<_>>());
        let dir_x: Vec<f64> = x1.iter().zip(&x0).map(|(a, b)| a - b).collect();
        if let Some((lo, hi)) = oracle.chord(&x0, &dir_x) {
            if lo < hi {
                let t = lo + (hi - lo) * rng.gen::<f64>();
                for (yi, di) in y.iter_mut().zip(&dir) {
                    *yi += t * di;
                }
            }
        }
        x = rounding.unmap(&y);
    }
    x
}

/// Tuning knobs for the approximate base case.
#[derive(Debug, Clone, Copy)]
pub struct ApproxConfig {
    /// alpha = alpha_scale * epsilon (clamped to sane Monte-Carlo range).
    pub alpha_scale: f64,
    /// beta = beta_scale * delta / n per estimate (clamped).
    pub beta_scale: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            alpha_scale: 0.25,
            beta_scale: 0.25,
        }
    }
}

/// Approximate two-stage sampler: estimated volumes V' replace the exact
/// ones in the lambda formulas, levels are drawn from lambda', and the point
/// is produced by the almost-uniform sampler with eta = delta.
pub fn run_base_case_approx<R: Rng + ?Sized>(
    ladder: &RegionLadder,
    n: usize,
    epsilon: f64,
    delta: f64,
    cfg: ApproxConfig,
    rng: &mut R,
) -> Result<(RationalPoint, BaseCaseRecord)> {
    let d = ladder.dim;
    let alpha = (cfg.alpha_scale * epsilon).clamp(1e-3, 0.45);
    let beta = (cfg.beta_scale * delta / n.max(1) as f64).clamp(1e-9, 0.2);
    let eta = delta.clamp(1e-9, 0.2);
    let cap = ladder.depth_cap;
    let mut volumes = vec![1.0f64];
    let mut oracles = Vec::new();
    let mut query_counts = Vec::new();
    for level in &ladder.levels {
        let oracle = MembershipOracle::from_region(&level.region, level.k);
        let ball = inner_ball(&level.region, &level.polytope)?;
        // Union-bound split of the per-level failure budget between the
        // rounding step and the volume phases.
        let map = round_body(&oracle, &ball.center_f64, rng, WalkConfig::for_dim(d))?;
        let est = estimate_volume(
            &oracle,
            &map,
            ball.radius,
            ball.outer,
            alpha,
            beta / 2.0,
            rng,
        )?;
        volumes.push(est.value);
        query_counts.push(est.queries);
        oracles.push((oracle, map));
    }
    // lambda'_0 = C' V'_0, lambda'_l = C' (1 - e^{-eps/2}) e^{eps l/2} V'_l,
    // computed in log space.
    let mut logw = vec![volumes[0].ln()];
    let gap = (-(epsilon / 2.0)).exp();
    for (l, v) in volumes.iter().enumerate().skip(1) {
        logw.push((1.0 - gap).ln() + epsilon * l as f64 / 2.0 + v.ln());
    }
    let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logw.iter().map(|w| (w - m).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut level = 0usize;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            level = i;
            break;
        }
        u -= w;
        level = i;
    }
    let point_f64 = if level == 0 {
        (0..d).map(|_| rng.gen::<f64>()).collect::<Vec<f64>>()
    } else {
        let (oracle, map) = &oracles[level - 1];
        approx_uniform_sample(oracle, map, eta, rng)
    };
    let point = RationalPoint::new(
        point_f64
            .iter()
            .map(|&x| crate::mechanism::rational_from_f64(x.clamp(0.0, 1.0)))
            .collect(),
    );
    let lambda: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let record = BaseCaseRecord {
        mode: "approx".into(),
        dim: d,
        epsilon,
        depth_cap: cap,
        volumes,
        lambda,
        level,
        alpha: Some(alpha),
        beta: Some(beta),
        eta: Some(eta),
        query_counts: Some(query_counts),
    };
    Ok((point, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperplane::{cube_facets, Halfspace, Hyperplane, Side};
    use crate::noise::stream_rng;
    use num_bigint::BigInt;

    fn simplex_oracle_3d() -> MembershipOracle {
        // x,y,z >= 0 and x+y+z <= 1.
        let mut hs = cube_facets(3);
        hs.push(Halfspace::new(
            Hyperplane::from_coeffs(vec![
                BigInt::from(-1),
                BigInt::from(1),
                BigInt::from(1),
                BigInt::from(1),
            ])
            .unwrap(),
            Side::Leq,
        ));
        MembershipOracle::from_halfspaces(hs, 0)
    }

    #[test]
    fn cube_volume_within_ten_percent() {
        let oracle = MembershipOracle::from_halfspaces(cube_facets(3), 0);
        let mut rng = stream_rng(100, 0);
        let map = round_body(&oracle, &[0.5; 3], &mut rng, WalkConfig::for_dim(3)).unwrap();
        let est = estimate_volume(&oracle, &map, 0.5, 0.75f64.sqrt(), 0.1, 0.05, &mut rng).unwrap();
        assert!(
            (est.value - 1.0).abs() <= 0.1,
            "cube estimate {}",
            est.value
        );
        assert!(est.queries > 0);
    }

    #[test]
    fn simplex_volume_within_ten_percent() {
        let oracle = simplex_oracle_3d();
        let center = [0.25, 0.25, 0.25];
        // Inner ball radius: distance from center to x+y+z=1 is
        // (1-0.75)/sqrt(3); outer radius bounded by the farthest vertex.
        let r = 0.25f64 / 3f64.sqrt() * 0.9;
        let big_r = 1.0;
        let mut rng = stream_rng(101, 0);
        let map = round_body(&oracle, &center, &mut rng, WalkConfig::for_dim(3)).unwrap();
        let est = estimate_volume(&oracle, &map, r, big_r, 0.1, 0.05, &mut rng).unwrap();
        let truth = 1.0 / 6.0;
        assert!(
            (est.value - truth).abs() / truth <= 0.1,
            "simplex estimate {}",
            est.value
        );
    }

    #[test]
    fn uniform_sample_stays_inside() {
        let oracle = simplex_oracle_3d();
        let mut rng = stream_rng(102, 0);
        let map = RoundingMap::identity(&[0.2, 0.2, 0.2]);
        for _ in 0..200 {
            let p = approx_uniform_sample(&oracle, &map, 0.05, &mut rng);
            assert!(oracle.query(&p));
        }
    }
}
