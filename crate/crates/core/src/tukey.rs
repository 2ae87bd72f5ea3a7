//! Tukey depth queries and H-representations of the depth regions.

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashMap;

use crate::dataset::GridDataset;
use crate::hyperplane::{cube_facets, hyperplane_through, side_counts, Halfspace, Hyperplane, Side};
use crate::linalg;
use crate::rational::RationalPoint;

/// Tukey depth of `q` with respect to the dataset: the smallest number of
/// points of `S` lying in a closed halfspace that contains `q`.
pub fn tukey_depth(q: &RationalPoint, s: &GridDataset) -> usize {
    assert_eq!(q.dim(), s.dim, "dimension mismatch");
    let zs: Vec<Vec<BigInt>> = s
        .rational_points()
        .iter()
        .map(|p| scale_to_int(&p.sub(q)))
        .collect();
    depth_from_offsets(&zs)
}

/// Depth of the origin among integer offset vectors.
///
/// Only the direction of each offset matters, so callers may scale each
/// vector by any positive factor. Works in any dimension; boundary points of
/// a candidate halfspace are resolved by recursing inside its hyperplane.
pub fn depth_from_offsets(zs: &[Vec<BigInt>]) -> usize {
    let n = zs.len();
    if n == 0 {
        return 0;
    }
    let d = zs[0].len();
    if d == 1 {
        let le = zs.iter().filter(|z| !z[0].is_positive()).count();
        let ge = zs.iter().filter(|z| !z[0].is_negative()).count();
        return le.min(ge);
    }
    let dirs = distinct_directions(zs);
    if dirs.is_empty() {
        return n; // every point coincides with the query
    }
    let dir_rows: linalg::Matrix = dirs.iter().map(|v| to_rational_vec(v)).collect();
    let mut rref_rows = dir_rows.clone();
    let pivots = linalg::rref(&mut rref_rows);
    if pivots.len() < d - 1 {
        // All offsets live in a lower-dimensional linear subspace; any
        // direction outside it scores n, so recurse within the span.
        let zs_proj: Vec<Vec<BigInt>> = zs
            .iter()
            .map(|z| pivots.iter().map(|&c| z[c].clone()).collect())
            .collect();
        return depth_from_offsets(&zs_proj);
    }
    let mut best = n;
    for subset in (0..dirs.len()).combinations(d - 1) {
        let m: linalg::Matrix = subset.iter().map(|&i| dir_rows[i].clone()).collect();
        let kern = linalg::kernel(m);
        if kern.len() != 1 {
            continue; // subset does not span a hyperplane
        }
        let v = scale_to_int(&kern[0]);
        let mut below = 0;
        let mut above = 0;
        let mut on: Vec<Vec<BigInt>> = Vec::new();
        for z in zs {
            let dp: BigInt = v.iter().zip(z).map(|(a, b)| a * b).sum();
            match dp.sign() {
                num_bigint::Sign::Minus => below += 1,
                num_bigint::Sign::Plus => above += 1,
                num_bigint::Sign::NoSign => on.push(z.clone()),
            }
        }
        let strict = below.min(above);
        if strict >= best {
            continue;
        }
        // Boundary offsets lie in the hyperplane v.z = 0; dropping a
        // coordinate where v is nonzero maps it bijectively to R^(d-1).
        let drop = v.iter().position(|c| !c.is_zero()).unwrap();
        let on_proj: Vec<Vec<BigInt>> = on
            .iter()
            .map(|z| {
                z.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, c)| c.clone())
                    .collect()
            })
            .collect();
        best = best.min(strict + depth_from_offsets(&on_proj));
    }
    best
}

fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

/// Clear denominators and divide by the gcd; sign is preserved.
fn scale_to_int(v: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::from(1);
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

/// Distinct unsigned primitive directions among the nonzero offsets.
fn distinct_directions(zs: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for z in zs {
        if z.iter().all(Zero::is_zero) {
            continue;
        }
        let mut g = BigInt::zero();
        for c in z {
            g = g.gcd(c);
        }
        let first = z.iter().find(|c| !c.is_zero()).unwrap();
        if first.is_negative() {
            g = -g;
        }
        let prim: Vec<BigInt> = z.iter().map(|c| c / &g).collect();
        if seen.insert(prim.clone()) {
            out.push(prim);
        }
    }
    out
}

/// A hyperplane spanned by `dim` affinely independent dataset points,
/// together with its exact side counts and one spanning witness.
#[derive(Debug, Clone)]
pub struct SpannedHyperplane {
    pub plane: Hyperplane,
    pub below: usize,
    pub on: usize,
    pub above: usize,
    /// Indices into the dataset of one affinely independent spanning subset.
    pub witness: Vec<usize>,
}

/// All distinct hyperplanes spanned by d affinely independent points of `S`,
/// with side counts. Degenerate d-subsets are skipped; their supporting
/// planes are recovered through other subsets spanning the same plane.
pub fn spanned_hyperplanes(s: &GridDataset) -> Vec<SpannedHyperplane> {
    let d = s.dim;
    // Work over distinct coordinate vectors; remember one index per vector.
    let mut first_index: HashMap<&Vec<i64>, usize> = HashMap::new();
    for (i, p) in s.points.iter().enumerate() {
        first_index.entry(p).or_insert(i);
    }
    let mut distinct: Vec<(&Vec<i64>, usize)> = first_index.into_iter().collect();
    distinct.sort();
    let mut by_plane: HashMap<Hyperplane, Vec<usize>> = HashMap::new();
    for combo in (0..distinct.len()).combinations(d) {
        let pts: Vec<RationalPoint> = combo
            .iter()
            .map(|&i| RationalPoint::from_numerators(distinct[i].0, s.denom))
            .collect();
        if let Ok(h) = hyperplane_through(&pts) {
            by_plane
                .entry(h)
                .or_insert_with(|| combo.iter().map(|&i| distinct[i].1).collect());
        }
    }
    let mut planes: Vec<(Hyperplane, Vec<usize>)> = by_plane.into_iter().collect();
    planes.sort_by(|a, b| a.0.cmp(&b.0));
    planes
        .into_iter()
        .map(|(plane, witness)| {
            let (below, on, above) = side_counts(&plane, s);
            SpannedHyperplane {
                plane,
                below,
                on,
                above,
                witness,
            }
        })
        .collect()
}

/// Where a region halfspace came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfspaceSource {
    /// Spanned by the listed dataset point indices.
    Spanned(Vec<usize>),
    CubeFacet,
}

/// H-representation of the depth region D_{>=k} intersected with the cube.
///
/// Each non-cube halfspace contains at least n-k+1 points of S (closed
/// count). When D_{>=k} is full-dimensional the intersection of the listed
/// halfspaces equals it exactly; degenerate regions may be overestimated by
/// this representation and are detected downstream by the vertex certificate.
#[derive(Debug, Clone)]
pub struct TukeyRegion {
    pub k: usize,
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
    pub sources: Vec<HalfspaceSource>,
}

impl TukeyRegion {
    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }

    pub fn contains_f64(&self, p: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.contains_f64(p))
    }

    /// Non-cube halfspaces only.
    pub fn spanned(&self) -> impl Iterator<Item = (&Halfspace, &HalfspaceSource)> {
        self.halfspaces
            .iter()
            .zip(&self.sources)
            .filter(|(_, src)| !matches!(src, HalfspaceSource::CubeFacet))
    }

    fn sort(&mut self) {
        let mut paired: Vec<(Halfspace, HalfspaceSource)> = self
            .halfspaces
            .drain(..)
            .zip(self.sources.drain(..))
            .collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        paired.dedup_by(|a, b| a.0 == b.0);
        for (h, s) in paired {
            self.halfspaces.push(h);
            self.sources.push(s);
        }
    }
}

/// Build the H-representation of D_{>=k} from precomputed spanned planes.
pub fn region_from_spanned(
    s: &GridDataset,
    spanned: &[SpannedHyperplane],
    k: usize,
) -> TukeyRegion {
    let n = s.len() as i64;
    let need = n - k as i64 + 1;
    let mut halfspaces = Vec::new();
    let mut sources = Vec::new();
    // A non-positive threshold is vacuous (k > n); only the cube remains.
    if need > 0 {
        let need = need as usize;
        for sh in spanned {
            if sh.on + sh.above >= need {
                halfspaces.push(Halfspace::new(sh.plane.clone(), Side::Geq));
                sources.push(HalfspaceSource::Spanned(sh.witness.clone()));
            }
            if sh.on + sh.below >= need {
                halfspaces.push(Halfspace::new(sh.plane.clone(), Side::Leq));
                sources.push(HalfspaceSource::Spanned(sh.witness.clone()));
            }
        }
    }
    for facet in cube_facets(s.dim) {
        halfspaces.push(facet);
        sources.push(HalfspaceSource::CubeFacet);
    }
    let mut region = TukeyRegion {
        k,
        dim: s.dim,
        halfspaces,
        sources,
    };
    region.sort();
    region
}

/// Enumerate spanned hyperplanes and build the region for one threshold.
pub fn critical_halfspaces(s: &GridDataset, k: usize) -> TukeyRegion {
    region_from_spanned(s, &spanned_hyperplanes(s), k)
}

/// Drop redundant halfspaces, keeping the intersection set-equal.
///
/// For every affinely independent (d-1)-tuple of dataset points, the region
/// halfspaces whose boundary contains the tuple form a pencil whose
/// intersection is a wedge bounded by at most two of them; those two are kept.
/// Pencils whose normal cone is degenerate (opposite normals or a positively
/// spanning set) are kept whole, which preserves set equality in flat cases.
pub fn prune_halfspaces(s: &GridDataset, region: &TukeyRegion) -> TukeyRegion {
    let d = region.dim;
    let spanned: Vec<(Halfspace, HalfspaceSource)> = region
        .spanned()
        .map(|(h, src)| (h.clone(), src.clone()))
        .collect();
    let mut kept: Vec<(Halfspace, HalfspaceSource)> = Vec::new();
    if d == 1 {
        // Rays: the tightest bound in each direction suffices.
        for side in [Side::Geq, Side::Leq] {
            let best = spanned
                .iter()
                .filter(|(h, _)| h.sign == side)
                .max_by_key(|(h, _)| {
                    let bound = BigRational::new(-h.plane.coeffs[0].clone(), h.plane.coeffs[1].clone());
                    match side {
                        Side::Geq => bound,
                        Side::Leq => -bound,
                    }
                });
            if let Some(pair) = best {
                kept.push(pair.clone());
            }
        }
    } else {
        let mut distinct: Vec<Vec<i64>> = s.points.clone();
        distinct.sort();
        distinct.dedup();
        for tuple in distinct.iter().combinations(d - 1) {
            let pts: Vec<RationalPoint> = tuple
                .iter()
                .map(|p| RationalPoint::from_numerators(p, s.denom))
                .collect();
            let span = crate::subspace::affine_span(&pts);
            if span.dim != d - 2 {
                continue; // tuple is affinely dependent
            }
            let pencil: Vec<usize> = (0..spanned.len())
                .filter(|&i| pts.iter().all(|p| spanned[i].0.plane.side(p) == 0))
                .collect();
            if pencil.is_empty() {
                continue;
            }
            for &i in pencil_extremes(&spanned, &pencil, &span.basis).iter() {
                kept.push(spanned[i].clone());
            }
        }
    }
    let mut halfspaces: Vec<Halfspace> = kept.iter().map(|(h, _)| h.clone()).collect();
    let mut sources: Vec<HalfspaceSource> = kept.into_iter().map(|(_, s)| s).collect();
    for facet in cube_facets(d) {
        halfspaces.push(facet);
        sources.push(HalfspaceSource::CubeFacet);
    }
    let mut out = TukeyRegion {
        k: region.k,
        dim: d,
        halfspaces,
        sources,
    };
    out.sort();
    out
}

/// Indices of the pencil members that bound the wedge, or all of them when
/// the normal cone is degenerate.
fn pencil_extremes(
    spanned: &[(Halfspace, HalfspaceSource)],
    pencil: &[usize],
    flat_basis: &[Vec<BigRational>],
) -> Vec<usize> {
    if pencil.len() <= 2 {
        return pencil.to_vec();
    }
    // All pencil normals are orthogonal to the flat; express them in a basis
    // of the 2-dimensional orthogonal complement.
    let d = spanned[pencil[0]].0.plane.dim();
    let comp = if flat_basis.is_empty() {
        vec![unit_rational(d, 0), unit_rational(d, 1)]
    } else {
        linalg::kernel(flat_basis.to_vec())
    };
    if comp.len() != 2 {
        return pencil.to_vec();
    }
    let coords2d: Vec<(BigRational, BigRational)> = pencil
        .iter()
        .map(|&i| {
            let n: Vec<BigRational> = spanned[i]
                .0
                .inward_normal()
                .into_iter()
                .map(BigRational::from_integer)
                .collect();
            express_in_plane(&n, &comp)
        })
        .collect();
    let cross = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| -> i8 {
        let c = &a.0 * &b.1 - &a.1 * &b.0;
        if c.is_positive() {
            1
        } else if c.is_negative() {
            -1
        } else {
            0
        }
    };
    let dot2 = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| -> BigRational {
        &a.0 * &b.0 + &a.1 * &b.1
    };
    // Opposite normals make the wedge a slab/flat; bail out to the full set.
    for i in 0..coords2d.len() {
        for j in (i + 1)..coords2d.len() {
            if cross(&coords2d[i], &coords2d[j]) == 0 && dot2(&coords2d[i], &coords2d[j]).is_negative()
            {
                return pencil.to_vec();
            }
        }
    }
    let right = (0..coords2d.len())
        .find(|&i| (0..coords2d.len()).all(|j| cross(&coords2d[i], &coords2d[j]) >= 0));
    let left = (0..coords2d.len())
        .find(|&i| (0..coords2d.len()).all(|j| cross(&coords2d[j], &coords2d[i]) >= 0));
    match (right, left) {
        (Some(r), Some(l)) if r != l => vec![pencil[r], pencil[l]],
        (Some(r), Some(_)) => vec![pencil[r]],
        _ => pencil.to_vec(), // positively spanning normals
    }
}

fn unit_rational(d: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); d];
    v[i] = BigRational::from_integer(BigInt::from(1));
    v
}

/// Coordinates of `v` (known to lie in span(b1, b2)) in that basis.
fn express_in_plane(v: &[BigRational], basis: &[Vec<BigRational>]) -> (BigRational, BigRational) {
    let d = v.len();
    // Pick two coordinate rows making the 2x2 system nonsingular.
    for i in 0..d {
        for j in (i + 1)..d {
            let a = vec![
                vec![basis[0][i].clone(), basis[1][i].clone()],
                vec![basis[0][j].clone(), basis[1][j].clone()],
            ];
            let b = vec![v[i].clone(), v[j].clone()];
            if let Some(sol) = linalg::solve(&a, &b) {
                return (sol[0].clone(), sol[1].clone());
            }
        }
    }
    (BigRational::zero(), BigRational::zero())
}

/// Largest Tukey depth over the candidate set: vertices of the arrangement
/// of all spanned hyperplanes (plus cube facets) restricted to the cube,
/// together with the dataset points themselves.
///
/// Intended for desk-scale inputs; cost grows with the number of spanned
/// hyperplanes to the d-th power.
pub fn max_tukey_depth(s: &GridDataset) -> usize {
    assert!(s.len() >= 1);
    let d = s.dim;
    let mut planes: Vec<Hyperplane> = spanned_hyperplanes(s)
        .into_iter()
        .map(|sh| sh.plane)
        .collect();
    for facet in cube_facets(d) {
        planes.push(facet.plane);
    }
    planes.sort();
    planes.dedup();
    let cube = cube_facets(d);
    let mut candidates: Vec<RationalPoint> = s.rational_points();
    for combo in planes.iter().combinations(d) {
        let a: linalg::Matrix = combo
            .iter()
            .map(|h| {
                h.normal()
                    .into_iter()
                    .map(BigRational::from_integer)
                    .collect()
            })
            .collect();
        let b: Vec<BigRational> = combo
            .iter()
            .map(|h| -BigRational::from_integer(h.coeffs[0].clone()))
            .collect();
        if let Some(x) = linalg::solve(&a, &b) {
            let p = RationalPoint::new(x);
            if cube.iter().all(|f| f.contains(&p)) {
                candidates.push(p);
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates
        .iter()
        .map(|q| tukey_depth(q, s))
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(dim: usize, denom: u64, pts: &[&[i64]]) -> GridDataset {
        GridDataset::new(dim, denom, pts.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn rp(coords: &[(i64, i64)]) -> RationalPoint {
        RationalPoint::new(
            coords
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    #[test]
    fn depth_1d_basics() {
        let s = ds(1, 2, &[&[0], &[1], &[2]]);
        assert_eq!(tukey_depth(&rp(&[(0, 1)]), &s), 1);
        assert_eq!(tukey_depth(&rp(&[(1, 2)]), &s), 2);
        assert_eq!(tukey_depth(&rp(&[(3, 1)]), &s), 0);
    }

    #[test]
    fn depth_outside_hull_is_zero() {
        let s = ds(2, 2, &[&[0, 0], &[2, 0], &[0, 2]]);
        assert_eq!(tukey_depth(&rp(&[(2, 1), (2, 1)]), &s), 0);
    }

    #[test]
    fn depth_square_center() {
        let s = ds(2, 1, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(tukey_depth(&rp(&[(1, 2), (1, 2)]), &s), 2);
    }

    #[test]
    fn depth_counts_multiplicity_at_query() {
        let s = ds(2, 1, &[&[0, 0], &[0, 0], &[0, 0]]);
        assert_eq!(tukey_depth(&rp(&[(0, 1), (0, 1)]), &s), 3);
        assert_eq!(tukey_depth(&rp(&[(1, 1), (0, 1)]), &s), 0);
    }

    #[test]
    fn depth_collinear_middle_point() {
        // Three collinear points: the middle one has depth 2.
        let s = ds(2, 2, &[&[0, 0], &[1, 1], &[2, 2]]);
        assert_eq!(tukey_depth(&rp(&[(1, 2), (1, 2)]), &s), 2);
        assert_eq!(tukey_depth(&rp(&[(0, 1), (0, 1)]), &s), 1);
        // Off the line the depth vanishes.
        assert_eq!(tukey_depth(&rp(&[(1, 2), (1, 4)]), &s), 0);
    }

    #[test]
    fn max_depth_examples() {
        let dup = ds(2, 1, &[&[1, 1], &[1, 1], &[1, 1], &[1, 1]]);
        assert_eq!(max_tukey_depth(&dup), 4);
        let two = ds(1, 1, &[&[0], &[1]]);
        assert_eq!(max_tukey_depth(&two), 1);
        let square = ds(2, 1, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(max_tukey_depth(&square), 2);
    }

    #[test]
    fn region_square_hull() {
        let s = ds(2, 1, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let region = critical_halfspaces(&s, 1);
        // The four edges qualify; the two diagonals do not (each open side
        // of a diagonal misses only one point, so closed counts are 3 < 4).
        let non_cube = region.spanned().count();
        assert_eq!(non_cube, 4);
        assert!(region.contains(&rp(&[(1, 2), (1, 2)])));
        assert!(region.contains(&rp(&[(0, 1), (0, 1)])));
    }

    #[test]
    fn region_beyond_n_is_cube_only() {
        let s = ds(2, 1, &[&[0, 0], &[1, 1]]);
        let region = critical_halfspaces(&s, 7);
        assert_eq!(region.spanned().count(), 0);
        assert_eq!(region.halfspaces.len(), 4);
    }

    #[test]
    fn region_1d_middle() {
        let s = ds(1, 2, &[&[0], &[1], &[2]]);
        let region = critical_halfspaces(&s, 2);
        // D_{>=2} = {1/2}: both closed sides of x = 1/2 contain 2 points.
        assert!(region.contains(&rp(&[(1, 2)])));
        assert!(!region.contains(&rp(&[(1, 4)])));
        assert!(!region.contains(&rp(&[(3, 4)])));
    }

    #[test]
    fn prune_keeps_intersection() {
        let s = ds(
            2,
            4,
            &[&[0, 0], &[4, 0], &[0, 4], &[4, 4], &[2, 1], &[1, 3]],
        );
        let region = critical_halfspaces(&s, 2);
        let pruned = prune_halfspaces(&s, &region);
        assert!(pruned.halfspaces.len() <= region.halfspaces.len());
        // Pruned list stays below the 2 per (d-1)-tuple bound plus cube.
        assert!(pruned.spanned().count() <= 2 * 6);
        // Set equality is checked on a grid of probe points.
        for i in 0..=8 {
            for j in 0..=8 {
                let p = rp(&[(i, 8), (j, 8)]);
                assert_eq!(region.contains(&p), pruned.contains(&p));
            }
        }
    }

    #[test]
    fn depth_sensitivity_under_replacement() {
        let mut pts = vec![
            vec![0, 0],
            vec![4, 0],
            vec![0, 4],
            vec![4, 4],
            vec![2, 2],
            vec![1, 2],
        ];
        let s1 = GridDataset::new(2, 4, pts.clone()).unwrap();
        pts[5] = vec![3, 1];
        let s2 = GridDataset::new(2, 4, pts).unwrap();
        for i in 0..=4 {
            for j in 0..=4 {
                let q = rp(&[(i, 4), (j, 4)]);
                let d1 = tukey_depth(&q, &s1) as i64;
                let d2 = tukey_depth(&q, &s2) as i64;
                assert!((d1 - d2).abs() <= 1, "sensitivity violated at {q:?}");
            }
        }
    }
}
