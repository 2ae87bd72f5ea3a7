//! Grid-quantized input datasets.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::rational::RationalPoint;

/// Multiset of points with integer numerators over a common denominator `denom`,
/// all lying in `[0,1]^dim` on the grid with step `1/denom`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDataset {
    pub dim: usize,
    pub denom: u64,
    pub points: Vec<Vec<i64>>,
}

impl GridDataset {
    pub fn new(dim: usize, denom: u64, points: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dim must be positive".into()));
        }
        if denom == 0 {
            return Err(Error::InvalidConfig("denom must be positive".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|&m| m < 0 || m as u64 > denom) {
                return Err(Error::InvalidConfig(format!(
                    "numerator out of [0, {denom}] in {p:?}"
                )));
            }
        }
        Ok(Self { dim, denom, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> RationalPoint {
        RationalPoint::from_numerators(&self.points[i], self.denom)
    }

    pub fn rational_points(&self) -> Vec<RationalPoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Distinct coordinate vectors with their multiset multiplicities.
    pub fn distinct_with_multiplicity(&self) -> Vec<(Vec<i64>, usize)> {
        let mut sorted = self.points.clone();
        sorted.sort();
        let mut out: Vec<(Vec<i64>, usize)> = Vec::new();
        for p in sorted {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Keep exactly the points satisfying `keep`, preserving multiplicity.
    pub fn restrict(&self, keep: impl Fn(&RationalPoint) -> bool) -> GridDataset {
        let points = self
            .points
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(&self.point(*i)))
            .map(|(_, p)| p.clone())
            .collect();
        GridDataset {
            dim: self.dim,
            denom: self.denom,
            points,
        }
    }

    /// Project every point onto the given coordinate indices.
    pub fn project(&self, coords: &[usize]) -> GridDataset {
        let points = self
            .points
            .iter()
            .map(|p| coords.iter().map(|&c| p[c]).collect())
            .collect();
        GridDataset {
            dim: coords.len(),
            denom: self.denom,
            points,
        }
    }

    pub fn grid_step(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.denom))
    }

    /// Stable content fingerprint used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        let mut sorted = self.points.clone();
        sorted.sort();
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        self.denom.hash(&mut h);
        sorted.hash(&mut h);
        h.finish()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: GridDataset = serde_json::from_str(s)?;
        GridDataset::new(d.dim, d.denom, d.points)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_grid() {
        assert!(GridDataset::new(2, 4, vec![vec![0, 5]]).is_err());
        assert!(GridDataset::new(2, 4, vec![vec![0, -1]]).is_err());
        assert!(GridDataset::new(2, 4, vec![vec![0, 4]]).is_ok());
    }

    #[test]
    fn multiset_semantics() {
        let s = GridDataset::new(1, 2, vec![vec![1], vec![1], vec![0]]).unwrap();
        let m = s.distinct_with_multiplicity();
        assert_eq!(m, vec![(vec![0], 1), (vec![1], 2)]);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn restriction_keeps_count_consistent() {
        let s = GridDataset::new(2, 2, vec![vec![0, 0], vec![1, 1], vec![2, 2]]).unwrap();
        let r = s.restrict(|p| p.coords[0] == p.coords[1]);
        assert_eq!(r.len(), 3);
        let r2 = s.restrict(|p| p.coords[0].numer() == &num_bigint::BigInt::from(0));
        assert_eq!(r2.len(), 1);
    }

    #[test]
    fn json_roundtrip() {
        let s = GridDataset::new(2, 4, vec![vec![1, 0], vec![0, 2]]).unwrap();
        let t = GridDataset::from_json(&s.to_json()).unwrap();
        assert_eq!(s, t);
    }
}
