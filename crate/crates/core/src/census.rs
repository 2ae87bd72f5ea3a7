//! Census of the affine subspaces spanned by dataset points.

use itertools::Itertools;
use std::collections::HashMap;

use crate::dataset::GridDataset;
use crate::rational::RationalPoint;
use crate::subspace::{affine_span, AffineSubspace};

/// All affine subspaces of dimension <= d-1 spanned by points of the
/// dataset, with their multiset point counts and the maxima M_i.
#[derive(Debug, Clone)]
pub struct SubspaceCensus {
    pub dim: usize,
    /// Spanned subspaces grouped by their dimension j = 0..d-1, each with
    /// count c(f) and a spanning witness; deterministically ordered.
    pub by_dim: Vec<Vec<AffineSubspace>>,
    /// M_i = max count over spanned subspaces of dimension at most i.
    pub maxima: Vec<usize>,
}

/// Enumerate spans of point subsets of each size up to d, deduplicate by
/// exact span equality, and count containment with multiplicity.
pub fn subspace_census(s: &GridDataset) -> SubspaceCensus {
    let d = s.dim;
    assert!(s.len() >= 1, "census needs a nonempty dataset");
    let distinct = s.distinct_with_multiplicity();
    // First dataset index of every distinct coordinate vector.
    let mut first_index: HashMap<&Vec<i64>, usize> = HashMap::new();
    for (i, p) in s.points.iter().enumerate() {
        let _ = first_index.entry(p).or_insert(i);
    }
    let pts: Vec<RationalPoint> = distinct
        .iter()
        .map(|(p, _)| RationalPoint::from_numerators(p, s.denom))
        .collect();
    let mut by_dim: Vec<Vec<AffineSubspace>> = vec![Vec::new(); d];
    for j in 0..d {
        let mut seen: HashMap<(Vec<_>, Vec<Vec<_>>), ()> = HashMap::new();
        for combo in (0..pts.len()).combinations(j + 1) {
            let subset: Vec<RationalPoint> = combo.iter().map(|&i| pts[i].clone()).collect();
            let mut f = affine_span(&subset);
            if f.dim != j {
                continue; // dependent subset; its span shows up at a smaller size
            }
            if seen.insert(f.canonical_key(), ()).is_some() {
                continue;
            }
            f.count = distinct
                .iter()
                .enumerate()
                .filter(|(i, _)| f.contains(&pts[*i]))
                .map(|(_, (_, mult))| mult)
                .sum();
            f.spanning_witness = Some(
                combo
                    .iter()
                    .map(|&i| first_index[&distinct[i].0])
                    .collect(),
            );
            by_dim[j].push(f);
        }
        by_dim[j].sort_by(|a, b| a.canonical_key().cmp(&b.canonical_key()));
    }
    let mut maxima = Vec::with_capacity(d);
    let mut running = 0usize;
    for j in 0..d {
        let level_max = by_dim[j].iter().map(|f| f.count).max().unwrap_or(0);
        running = running.max(level_max);
        maxima.push(running);
    }
    SubspaceCensus { dim: d, by_dim, maxima }
}

/// Scores for the spanned j-dimensional subspaces:
/// s(f) = c(f) for j = 0, otherwise max{0, c(f) - M_{j-1}}. Members of the
/// grid-spanned universe that no dataset points span implicitly score 0.
pub fn subspace_scores(census: &SubspaceCensus, j: usize) -> Vec<(usize, usize)> {
    census.by_dim[j]
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            let score = if j == 0 {
                f.count
            } else {
                f.count.saturating_sub(census.maxima[j - 1])
            };
            (idx, score)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(dim: usize, denom: u64, pts: &[&[i64]]) -> GridDataset {
        GridDataset::new(dim, denom, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    #[test]
    fn generic_position_maxima() {
        let s = ds(2, 4, &[&[0, 0], &[4, 1], &[1, 3], &[3, 4]]);
        let c = subspace_census(&s);
        assert_eq!(c.maxima, vec![1, 2]);
    }

    #[test]
    fn collinear_points_dominate_m1() {
        let s = ds(2, 4, &[&[0, 0], &[1, 1], &[2, 2], &[3, 3], &[0, 4]]);
        let c = subspace_census(&s);
        assert_eq!(c.maxima, vec![1, 4]);
        let line = c.by_dim[1].iter().find(|f| f.count == 4).unwrap();
        assert_eq!(line.spanning_witness.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn multiplicity_three_in_m0() {
        let s = ds(2, 4, &[&[2, 2], &[2, 2], &[2, 2], &[0, 1]]);
        let c = subspace_census(&s);
        assert_eq!(c.maxima[0], 3);
    }

    #[test]
    fn maxima_nondecreasing() {
        let s = ds(3, 2, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 1], &[2, 2, 2]]);
        let c = subspace_census(&s);
        for w in c.maxima.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn scores_zero_dim_are_counts() {
        let s = ds(2, 4, &[&[1, 1], &[1, 1], &[1, 1], &[1, 1], &[1, 1], &[3, 0]]);
        let c = subspace_census(&s);
        let scores = subspace_scores(&c, 0);
        let max_score = scores.iter().map(|&(_, s)| s).max().unwrap();
        assert_eq!(max_score, 5);
    }

    #[test]
    fn line_score_subtracts_m0() {
        let s = ds(
            2,
            4,
            &[&[0, 0], &[1, 1], &[2, 2], &[4, 4], &[4, 0], &[4, 0], &[0, 3]],
        );
        let c = subspace_census(&s);
        assert_eq!(c.maxima[0], 2);
        let scores = subspace_scores(&c, 1);
        let max_score = scores.iter().map(|&(_, s)| s).max().unwrap();
        // Diagonal holds 4 points; score = 4 - M_0 = 2.
        assert_eq!(max_score, 2);
        // A line holding only c(f) <= M_0 points scores zero.
        assert!(scores.iter().any(|&(_, s)| s == 0));
    }
}
