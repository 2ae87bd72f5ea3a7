//! Membership-oracle access to the depth regions and inner/outer ball data.

use num_rational::BigRational;
use num_traits::Signed;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::hyperplane::{Halfspace, Side};
use crate::linalg;
use crate::polytope::VPolytope;
use crate::rational::{rational_to_f64, RationalPoint};
use crate::tukey::TukeyRegion;

/// Point-in-body predicate over a fixed halfspace list, with a query counter.
#[derive(Debug)]
pub struct MembershipOracle {
    pub level: usize,
    halfspaces: Vec<Halfspace>,
    /// Oriented rows (b0, b): inside iff b0 + b.x >= 0 for every row.
    rows: Vec<(f64, Vec<f64>)>,
    queries: AtomicU64,
}

impl MembershipOracle {
    pub fn from_region(region: &TukeyRegion, level: usize) -> Self {
        Self::from_halfspaces(region.halfspaces.clone(), level)
    }

    pub fn from_halfspaces(halfspaces: Vec<Halfspace>, level: usize) -> Self {
        let rows = halfspaces
            .iter()
            .map(|h| {
                let sgn = match h.sign {
                    Side::Geq => 1.0,
                    Side::Leq => -1.0,
                };
                let b0 = sgn
                    * rational_to_f64(&BigRational::from_integer(h.plane.coeffs[0].clone()));
                let b: Vec<f64> = h.plane.coeffs[1..]
                    .iter()
                    .map(|c| sgn * rational_to_f64(&BigRational::from_integer(c.clone())))
                    .collect();
                (b0, b)
            })
            .collect();
        Self {
            level,
            halfspaces,
            rows,
            queries: AtomicU64::new(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map(|(_, b)| b.len()).unwrap_or(0)
    }

    pub fn query(&self, x: &[f64]) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.rows
            .iter()
            .all(|(b0, b)| b0 + dot_f64(b, x) >= 0.0)
    }

    /// Exact membership on rational points, for cross-checks.
    pub fn query_exact(&self, p: &RationalPoint) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Chord of the body along x + t*dir: returns (t_lo, t_hi), or None when
    /// the line misses the body numerically.
    pub fn chord(&self, x: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (b0, b) in &self.rows {
            let c = b0 + dot_f64(b, x);
            let s = dot_f64(b, dir);
            if s.abs() < 1e-300 {
                if c < 0.0 {
                    return None;
                }
            } else {
                let t = -c / s;
                if s > 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        (lo < hi).then_some((lo, hi))
    }
}

pub fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Center and radius of a ball inside the polytope, plus an outer radius.
pub struct InnerBall {
    pub center: RationalPoint,
    pub center_f64: Vec<f64>,
    pub radius: f64,
    /// Radius of a ball around the center containing the whole body.
    pub outer: f64,
}

/// Vertex centroid and the exact minimum distance to the bounding
/// hyperplanes. The centroid of a full-dimensional vertex set is strictly
/// interior (no listed hyperplane contains every vertex), so the radius is
/// positive.
pub fn inner_ball(region: &TukeyRegion, poly: &VPolytope) -> Result<InnerBall> {
    let d = region.dim;
    if poly.dim_affine < d {
        return Err(Error::NotFullDimensional);
    }
    // d+1 affinely independent vertices must exist; the centroid of the full
    // vertex set is used as the center (it matches symmetric bodies).
    let mut rank_pts: Vec<&RationalPoint> = vec![&poly.vertices[0]];
    for v in &poly.vertices[1..] {
        if rank_pts.len() == d + 1 {
            break;
        }
        let rows: linalg::Matrix = rank_pts[1..]
            .iter()
            .map(|c| c.sub(rank_pts[0]))
            .chain(std::iter::once(v.sub(rank_pts[0])))
            .collect();
        if linalg::rank(rows) == rank_pts.len() {
            rank_pts.push(v);
        }
    }
    if rank_pts.len() != d + 1 {
        return Err(Error::NotFullDimensional);
    }
    let inv = BigRational::new(1.into(), (poly.vertices.len() as i64).into());
    let center = RationalPoint::new(
        (0..d)
            .map(|c| {
                let sum: BigRational = poly.vertices.iter().map(|p| p.coords[c].clone()).sum();
                sum * &inv
            })
            .collect(),
    );
    // Exact squared distance to each hyperplane, then one square root.
    let mut min_sq: Option<BigRational> = None;
    for h in &region.halfspaces {
        let val = h.plane.eval(&center);
        let norm_sq: BigRational = h
            .plane
            .normal()
            .iter()
            .map(|a| BigRational::from_integer(a * a))
            .sum();
        let dist_sq = &val * &val / norm_sq;
        if min_sq.as_ref().map_or(true, |m| &dist_sq < m) {
            min_sq = Some(dist_sq);
        }
    }
    let min_sq = min_sq.expect("region has halfspaces");
    if !min_sq.is_positive() {
        return Err(Error::NotFullDimensional);
    }
    let center_f64 = center.to_f64_vec();
    let outer = poly
        .vertices
        .iter()
        .map(|v| {
            v.to_f64_vec()
                .iter()
                .zip(&center_f64)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0f64, f64::max);
    Ok(InnerBall {
        center,
        center_f64,
        radius: rational_to_f64(&min_sq).sqrt(),
        outer: outer.max(1e-12),
    })
}
