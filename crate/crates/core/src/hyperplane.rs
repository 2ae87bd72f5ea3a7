//! Integer-coefficient hyperplanes and closed halfspaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::dataset::GridDataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::RationalPoint;

/// Affine functional a_0 + sum a_i x_i = 0 with integer coefficients in
/// canonical form: gcd of all coefficients is 1 and the first nonzero
/// coefficient among a_1..a_d is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub coeffs: Vec<BigInt>,
}

impl Hyperplane {
    /// Canonicalize an integer coefficient vector (a_0, a_1, ..., a_d).
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs[1..].iter().all(Zero::is_zero) {
            return Err(Error::DegenerateSpan);
        }
        let mut g = BigInt::zero();
        for c in &coeffs {
            g = g.gcd(c);
        }
        let first = coeffs[1..].iter().find(|c| !c.is_zero()).unwrap();
        if first.is_negative() {
            g = -g;
        }
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c / &g).collect(),
        })
    }

    /// Canonicalize a rational coefficient vector by clearing denominators.
    pub fn from_rational_coeffs(coeffs: &[BigRational]) -> Result<Self> {
        let mut lcm = BigInt::from(1);
        for c in coeffs {
            lcm = lcm.lcm(c.denom());
        }
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact evaluation of a_0 + sum a_i x_i at a rational point.
    pub fn eval(&self, p: &RationalPoint) -> BigRational {
        let mut acc = BigRational::from_integer(self.coeffs[0].clone());
        for (a, x) in self.coeffs[1..].iter().zip(&p.coords) {
            acc += BigRational::from_integer(a.clone()) * x;
        }
        acc
    }

    /// Sign of the evaluation: -1, 0, or +1.
    pub fn side(&self, p: &RationalPoint) -> i8 {
        // sign(a_0 + sum a_i n_i/d_i) via clearing the common denominator.
        let mut lcm = BigInt::from(1);
        for x in &p.coords {
            lcm = lcm.lcm(x.denom());
        }
        let mut acc = &self.coeffs[0] * &lcm;
        for (a, x) in self.coeffs[1..].iter().zip(&p.coords) {
            acc += a * x.numer() * (&lcm / x.denom());
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Fast path for grid points given as numerators over `denom`.
    pub fn side_grid(&self, numers: &[i64], denom: u64) -> i8 {
        let mut acc = &self.coeffs[0] * BigInt::from(denom);
        for (a, &m) in self.coeffs[1..].iter().zip(numers) {
            acc += a * BigInt::from(m);
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn normal(&self) -> Vec<BigInt> {
        self.coeffs[1..].to_vec()
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Closed side where the functional is <= 0.
    Leq,
    /// Closed side where the functional is >= 0.
    Geq,
}

/// Closed halfspace: boundary points belong to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub plane: Hyperplane,
    pub sign: Side,
}

impl Halfspace {
    pub fn new(plane: Hyperplane, sign: Side) -> Self {
        Self { plane, sign }
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        let s = self.plane.side(p);
        match self.sign {
            Side::Leq => s <= 0,
            Side::Geq => s >= 0,
        }
    }

    pub fn contains_f64(&self, p: &[f64]) -> bool {
        let mut acc = crate::rational::rational_to_f64(&BigRational::from_integer(
            self.plane.coeffs[0].clone(),
        ));
        for (a, &x) in self.plane.coeffs[1..].iter().zip(p) {
            acc += crate::rational::rational_to_f64(&BigRational::from_integer(a.clone())) * x;
        }
        match self.sign {
            Side::Leq => acc <= 0.0,
            Side::Geq => acc >= 0.0,
        }
    }

    /// Inward-pointing normal (towards the interior of the halfspace).
    pub fn inward_normal(&self) -> Vec<BigInt> {
        match self.sign {
            Side::Geq => self.plane.normal(),
            Side::Leq => self.plane.normal().into_iter().map(|c| -c).collect(),
        }
    }
}

/// Hyperplane through `d` affinely independent points in dimension `d`.
///
/// The coefficient vector spans the kernel of the rows (1, p_i); for grid
/// inputs the canonical integer coefficients stay within the Hadamard bound
/// |a_i| <= d^(d/2) X^d.
pub fn hyperplane_through(pts: &[RationalPoint]) -> Result<Hyperplane> {
    let d = pts
        .first()
        .map(|p| p.dim())
        .ok_or(Error::DegenerateSpan)?;
    if pts.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: pts.len(),
        });
    }
    let rows: linalg::Matrix = pts
        .iter()
        .map(|p| {
            let mut row = Vec::with_capacity(d + 1);
            row.push(BigRational::from_integer(BigInt::from(1)));
            row.extend(p.coords.iter().cloned());
            row
        })
        .collect();
    let kern = linalg::kernel(rows);
    if kern.len() != 1 {
        return Err(Error::DegenerateSpan);
    }
    Hyperplane::from_rational_coeffs(&kern[0])
}

/// Exact (below, on, above) counts of the dataset against the plane.
pub fn side_counts(h: &Hyperplane, s: &GridDataset) -> (usize, usize, usize) {
    debug_assert_eq!(h.dim(), s.dim);
    let mut below = 0;
    let mut on = 0;
    let mut above = 0;
    for p in &s.points {
        match h.side_grid(p, s.denom).cmp(&0) {
            Ordering::Less => below += 1,
            Ordering::Equal => on += 1,
            Ordering::Greater => above += 1,
        }
    }
    (below, on, above)
}

/// The 2d facet halfspaces of the unit cube.
pub fn cube_facets(dim: usize) -> Vec<Halfspace> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        // x_i >= 0
        let mut lo = vec![BigInt::zero(); dim + 1];
        lo[i + 1] = BigInt::from(1);
        out.push(Halfspace::new(
            Hyperplane::from_coeffs(lo).unwrap(),
            Side::Geq,
        ));
        // x_i <= 1  <=>  -1 + x_i <= 0
        let mut hi = vec![BigInt::zero(); dim + 1];
        hi[0] = BigInt::from(-1);
        hi[i + 1] = BigInt::from(1);
        out.push(Halfspace::new(
            Hyperplane::from_coeffs(hi).unwrap(),
            Side::Leq,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn pt(parts: &[(i64, i64)]) -> RationalPoint {
        RationalPoint::new(
            parts
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    #[test]
    fn single_point_hyperplane_1d() {
        // x = 1/2 scales to (-1, 2).
        let h = hyperplane_through(&[pt(&[(1, 2)])]).unwrap();
        assert_eq!(h.coeffs, vec![BigInt::from(-1), BigInt::from(2)]);
    }

    #[test]
    fn diagonal_through_origin() {
        let h = hyperplane_through(&[pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (1, 1)])]).unwrap();
        // x_1 - x_2 = 0 in canonical form.
        assert_eq!(
            h.coeffs,
            vec![BigInt::zero(), BigInt::one(), BigInt::from(-1)]
        );
    }

    #[test]
    fn grid_example_with_expected_coefficients() {
        // Through (1/4, 0) and (0, 1/2): proportional to (-2, 8, 4).
        let h = hyperplane_through(&[pt(&[(1, 4), (0, 1)]), pt(&[(0, 1), (1, 2)])]).unwrap();
        assert_eq!(
            h.coeffs,
            vec![BigInt::from(-1), BigInt::from(4), BigInt::from(2)]
        );
    }

    #[test]
    fn degenerate_span_rejected() {
        let e = hyperplane_through(&[pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (0, 1)])]);
        assert!(matches!(e, Err(Error::DegenerateSpan)));
    }

    #[test]
    fn side_counts_1d() {
        let s = GridDataset::new(1, 2, vec![vec![0], vec![1], vec![2]]).unwrap();
        let h = hyperplane_through(&[pt(&[(1, 2)])]).unwrap();
        assert_eq!(side_counts(&h, &s), (1, 1, 1));
    }

    #[test]
    fn side_counts_empty() {
        let s = GridDataset::new(1, 2, vec![]).unwrap();
        let h = hyperplane_through(&[pt(&[(1, 2)])]).unwrap();
        assert_eq!(side_counts(&h, &s), (0, 0, 0));
    }

    #[test]
    fn side_counts_square_diagonal() {
        let s = GridDataset::new(
            2,
            1,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
        )
        .unwrap();
        let h = hyperplane_through(&[pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (1, 1)])]).unwrap();
        assert_eq!(side_counts(&h, &s), (1, 2, 1));
    }

    #[test]
    fn canonical_dedup() {
        let a = Hyperplane::from_coeffs(vec![BigInt::from(2), BigInt::from(-4), BigInt::from(6)])
            .unwrap();
        let b = Hyperplane::from_coeffs(vec![BigInt::from(-1), BigInt::from(2), BigInt::from(-3)])
            .unwrap();
        assert_eq!(a, b);
    }
}
