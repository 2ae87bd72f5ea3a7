//! Affine subspaces spanned by point sets: spans, projections, lifts.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::RationalPoint;

/// Affine subspace given by a basepoint and an exact direction basis.
///
/// The basis is kept in reduced row echelon form and the basepoint has zero
/// entries in the pivot coordinates, so equal subspaces compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    pub base: RationalPoint,
    /// Linearly independent direction vectors, RREF rows.
    pub basis: Vec<Vec<BigRational>>,
    pub dim: usize,
    /// Number of dataset points lying on the subspace (set by the census).
    pub count: usize,
    /// Indices of dim+1 affinely independent spanning points, when known.
    pub spanning_witness: Option<Vec<usize>>,
}

impl AffineSubspace {
    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        let mut diff = p.sub(&self.base);
        // Reduce against the RREF basis; on the subspace iff residual is zero.
        for row in &self.basis {
            let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
            if !diff[pivot].is_zero() {
                let f = diff[pivot].clone();
                for (d, r) in diff.iter_mut().zip(row) {
                    *d -= &f * r;
                }
            }
        }
        diff.iter().all(Zero::is_zero)
    }

    /// Stable key for dedup: basepoint then basis rows.
    pub fn canonical_key(&self) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
        (self.base.coords.clone(), self.basis.clone())
    }
}

/// Affine span of a nonempty point list.
pub fn affine_span(pts: &[RationalPoint]) -> AffineSubspace {
    assert!(!pts.is_empty(), "affine_span of empty list");
    let base0 = &pts[0];
    let mut rows: Matrix = pts[1..].iter().map(|p| p.sub(base0)).collect();
    let pivots = linalg::rref(&mut rows);
    let basis: Vec<Vec<BigRational>> = rows.into_iter().take(pivots.len()).collect();
    let dim = basis.len();
    // Canonical basepoint: clear the pivot coordinates.
    let mut base = base0.coords.clone();
    for row in &basis {
        let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
        if !base[pivot].is_zero() {
            let f = base[pivot].clone();
            for (b, r) in base.iter_mut().zip(row) {
                *b -= &f * r;
            }
        }
    }
    AffineSubspace {
        base: RationalPoint::new(base),
        basis,
        dim,
        count: pts.len(),
        spanning_witness: None,
    }
}

/// Coordinate indices onto which the subspace projects bijectively.
///
/// Deterministic rule: pivot columns of exact Gaussian elimination on the
/// direction basis, scanning coordinates in increasing index order.
pub fn choose_projection_coords(f: &AffineSubspace) -> Vec<usize> {
    assert!(f.dim >= 1, "projection needs a positive-dimensional subspace");
    let mut rows = f.basis.clone();
    linalg::rref(&mut rows)
}

/// Lift a point from projection coordinates back onto the subspace.
///
/// Solves base + B^T t restricted to `coords` = p', then evaluates the full
/// point. `coords` must come from `choose_projection_coords`.
pub fn lift_point(
    p_proj: &RationalPoint,
    f: &AffineSubspace,
    coords: &[usize],
) -> Result<RationalPoint> {
    let j = f.dim;
    if p_proj.dim() != j || coords.len() != j {
        return Err(Error::DimensionMismatch {
            expected: j,
            got: p_proj.dim(),
        });
    }
    let a: Matrix = coords
        .iter()
        .map(|&c| f.basis.iter().map(|row| row[c].clone()).collect())
        .collect();
    let b: Vec<BigRational> = coords
        .iter()
        .zip(&p_proj.coords)
        .map(|(&c, v)| v - &f.base.coords[c])
        .collect();
    let t = linalg::solve(&a, &b).ok_or(Error::PointOffSubspace)?;
    let full = (0..f.ambient_dim())
        .map(|c| {
            let mut x = f.base.coords[c].clone();
            for (ti, row) in t.iter().zip(&f.basis) {
                x += ti * &row[c];
            }
            x
        })
        .collect();
    Ok(RationalPoint::new(full))
}
