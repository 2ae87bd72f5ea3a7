//! The exact base case: exponential weights over the depth ladder, sampled
//! through the two-stage scheme that only ever draws uniformly from the
//! convex regions D_{>=l}.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dataset::GridDataset;
use crate::error::{Error, Result};
use crate::numeric::{exp_lower, pow};
use crate::polytope::{self, Triangulation, VPolytope};
use crate::rational::{dyadic_uniform, dyadic_uniform_wide, rational_to_f64, RationalPoint};
use crate::tukey::{self, TukeyRegion};

/// One ladder level: the pruned H-representation of D_{>=k} and, when the
/// region is certified full-dimensional, its triangulation.
#[derive(Debug, Clone)]
pub struct LadderLevel {
    pub k: usize,
    pub region: TukeyRegion,
    pub polytope: VPolytope,
    pub triangulation: Triangulation,
}

/// Exact volumes of the nested depth regions, with per-level geometry.
///
/// `volumes[l]` is Vol(D_{>=l}) for l = 0..=depth_cap, where `depth_cap` is
/// the deepest level whose region is certified full-dimensional. Deeper
/// regions have zero volume: the spanned H-representation equals the true
/// region exactly when all of its vertices pass the depth check, and a
/// failed check proves the region is degenerate.
#[derive(Debug, Clone)]
pub struct RegionLadder {
    pub dim: usize,
    pub volumes: Vec<BigRational>,
    pub levels: Vec<LadderLevel>,
    pub depth_cap: usize,
}

impl RegionLadder {
    pub fn volumes_f64(&self) -> Vec<f64> {
        self.volumes.iter().map(rational_to_f64).collect()
    }

    /// Deepest level whose region contains the point, scanning upward from
    /// a level already known to contain it.
    pub fn depth_class_from(&self, p: &RationalPoint, start: usize) -> usize {
        let mut class = start;
        for level in &self.levels {
            if level.k <= start {
                continue;
            }
            if level.region.contains(p) {
                class = level.k;
            } else {
                break;
            }
        }
        class
    }
}

/// Build the ladder of exact region volumes for levels 0..=k_max.
pub fn build_ladder(s: &GridDataset, k_max: usize) -> RegionLadder {
    let spanned = tukey::spanned_hyperplanes(s);
    let mut volumes = vec![BigRational::one()];
    let mut levels = Vec::new();
    let mut cap = 0usize;
    for k in 1..=k_max.min(s.len()) {
        let raw = tukey::region_from_spanned(s, &spanned, k);
        let region = tukey::prune_halfspaces(s, &raw);
        let Ok(poly) = polytope::vertex_enumeration(&region) else {
            break; // empty region: this and all deeper volumes are zero
        };
        if poly.dim_affine < s.dim {
            break;
        }
        // Vertex certificate: the spanned H-representation equals D_{>=k}
        // iff every vertex really has depth >= k (depth is quasi-concave,
        // so the hull of certified vertices is contained in D_{>=k}).
        if !poly
            .vertices
            .iter()
            .all(|v| tukey::tukey_depth(v, s) >= k)
        {
            break;
        }
        let triangulation = polytope::triangulate(&poly).expect("full-dimensional");
        if triangulation.total_volume.is_zero() {
            break;
        }
        volumes.push(triangulation.total_volume.clone());
        levels.push(LadderLevel {
            k,
            region,
            polytope: poly,
            triangulation,
        });
        cap = k;
    }
    RegionLadder {
        dim: s.dim,
        volumes,
        levels,
        depth_cap: cap,
    }
}

/// The two-stage level distribution: picking D_{>=l} with probability
/// lambda_l and then a uniform point of D_{>=l} simulates the exponential
/// mechanism over the depth classes exactly.
#[derive(Debug, Clone)]
pub struct LambdaWeights {
    /// Normalizer C.
    pub c: BigRational,
    /// lambda_0..lambda_cap, summing to exactly 1.
    pub lambdas: Vec<BigRational>,
    /// Rational lower approximation of e^(eps/2) used for the weights.
    pub e_half: BigRational,
    pub epsilon: f64,
}

impl LambdaWeights {
    pub fn lambdas_f64(&self) -> Vec<f64> {
        self.lambdas.iter().map(rational_to_f64).collect()
    }
}

/// lambda_0 = C V_0, lambda_l = C (1 - 1/e_half) e_half^l V_l, with C the
/// normalizer making the weights sum to one.
pub fn lambda_weights(ladder: &RegionLadder, epsilon: f64) -> LambdaWeights {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let e_half = exp_lower(&rational_from_f64(epsilon / 2.0));
    let one = BigRational::one();
    let gap = &one - e_half.recip(); // 1 - e^{-eps/2}
    let mut z = ladder.volumes[0].clone(); // V_0
    for (l, v) in ladder.volumes.iter().enumerate().skip(1) {
        z += &gap * pow(&e_half, l) * v;
    }
    let c = z.recip();
    let mut lambdas = vec![&c * &ladder.volumes[0]];
    for (l, v) in ladder.volumes.iter().enumerate().skip(1) {
        lambdas.push(&c * &gap * pow(&e_half, l) * v);
    }
    LambdaWeights {
        c,
        lambdas,
        e_half,
        epsilon,
    }
}

/// Depth-class marginal mu_k = e_half^k v_k / sum_j e_half^j v_j with
/// v_k = V_k - V_{k+1}; kept as the test oracle for the lambda scheme.
pub fn mu_weights(ladder: &RegionLadder, epsilon: f64) -> Vec<BigRational> {
    let e_half = exp_lower(&rational_from_f64(epsilon / 2.0));
    let cap = ladder.depth_cap;
    let mut raw = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let next = if k + 1 <= cap {
            ladder.volumes[k + 1].clone()
        } else {
            BigRational::zero()
        };
        let vk = &ladder.volumes[k] - next;
        raw.push(pow(&e_half, k) * vk);
    }
    let total: BigRational = raw.iter().sum();
    raw.into_iter().map(|w| w / &total).collect()
}

/// Exact f64 -> rational conversion (every finite f64 is rational).
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseCaseRecord {
    pub mode: String,
    pub dim: usize,
    pub epsilon: f64,
    pub depth_cap: usize,
    pub volumes: Vec<f64>,
    pub lambda: Vec<f64>,
    pub level: usize,
    /// Approximate-mode diagnostics; absent in exact mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query_counts: Option<Vec<u64>>,
}

/// Draw a level with probability lambda_l, then a uniform point of D_{>=l}.
pub fn run_base_case_exact<R: rand::Rng + ?Sized>(
    ladder: &RegionLadder,
    epsilon: f64,
    rng: &mut R,
) -> Result<(RationalPoint, BaseCaseRecord)> {
    let weights = lambda_weights(ladder, epsilon);
    let level = sample_discrete_exact(&weights.lambdas, rng)?;
    let point = if level == 0 {
        // D_{>=0} is the unit cube.
        RationalPoint::new((0..ladder.dim).map(|_| dyadic_uniform(rng)).collect())
    } else {
        let tri = &ladder.levels[level - 1].triangulation;
        polytope::sample_uniform(tri, rng)?
    };
    let record = BaseCaseRecord {
        mode: "exact".into(),
        dim: ladder.dim,
        epsilon,
        depth_cap: ladder.depth_cap,
        volumes: ladder.volumes_f64(),
        lambda: weights.lambdas_f64(),
        level,
        alpha: None,
        beta: None,
        eta: None,
        query_counts: None,
    };
    Ok((point, record))
}

/// Exact categorical draw from rational weights summing to a positive total.
pub fn sample_discrete_exact<R: rand::Rng + ?Sized>(
    weights: &[BigRational],
    rng: &mut R,
) -> Result<usize> {
    let total: BigRational = weights.iter().sum();
    if !total.is_positive() {
        return Err(Error::ZeroVolume);
    }
    let u = dyadic_uniform_wide(rng) * &total;
    let mut acc = BigRational::zero();
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Ok(i);
        }
    }
    Ok(weights.len() - 1)
}
