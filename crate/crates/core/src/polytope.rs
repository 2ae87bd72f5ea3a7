//! Exact convex polytope machinery: vertex enumeration from halfspaces,
//! triangulation, volumes, and uniform sampling.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hyperplane::Hyperplane;
use crate::linalg;
use crate::rational::{dyadic_uniform, dyadic_uniform_wide, RationalPoint};
use crate::tukey::TukeyRegion;

/// V-representation: the extreme points of a bounded region.
#[derive(Debug, Clone)]
pub struct VPolytope {
    pub vertices: Vec<RationalPoint>,
    pub dim_ambient: usize,
    pub dim_affine: usize,
}

/// Exhaustive vertex enumeration over d-subsets of the bounding hyperplanes.
///
/// Every candidate with d independent tight constraints that satisfies all
/// halfspaces is an extreme point, and a bounded region is recovered exactly.
/// The region must include the cube facets so it is bounded.
pub fn vertex_enumeration(region: &TukeyRegion) -> Result<VPolytope> {
    let d = region.dim;
    let mut planes: Vec<&Hyperplane> = region.halfspaces.iter().map(|h| &h.plane).collect();
    planes.sort();
    planes.dedup();
    let mut vertices: Vec<RationalPoint> = Vec::new();
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
            if region.contains(&p) {
                vertices.push(p);
            }
        }
    }
    vertices.sort();
    vertices.dedup();
    if vertices.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let dim_affine = affine_rank(&vertices);
    Ok(VPolytope {
        vertices,
        dim_ambient: d,
        dim_affine,
    })
}

fn affine_rank(vertices: &[RationalPoint]) -> usize {
    if vertices.len() <= 1 {
        return 0;
    }
    let rows: linalg::Matrix = vertices[1..].iter().map(|v| v.sub(&vertices[0])).collect();
    linalg::rank(rows)
}

/// Fan triangulation of a full-dimensional polytope.
#[derive(Debug, Clone)]
pub struct Triangulation {
    /// Each simplex is d+1 vertices of the polytope.
    pub simplices: Vec<Vec<RationalPoint>>,
    pub volumes: Vec<BigRational>,
    pub total_volume: BigRational,
}

/// Exact volume: zero for non-full-dimensional input, else the sum of
/// simplex volumes |det|/d! over the fan triangulation.
pub fn volume(poly: &VPolytope) -> BigRational {
    if poly.dim_affine < poly.dim_ambient {
        return BigRational::zero();
    }
    triangulate(poly).expect("full-dimensional").total_volume
}

pub fn simplex_volume(simplex: &[RationalPoint]) -> BigRational {
    let d = simplex.len() - 1;
    let rows: linalg::Matrix = simplex[1..].iter().map(|v| v.sub(&simplex[0])).collect();
    let det = linalg::determinant(&rows);
    let mut fact = BigInt::one();
    for i in 2..=d {
        fact *= BigInt::from(i);
    }
    det.abs() / BigRational::from_integer(fact)
}

/// Fan triangulation coned from the lexicographically smallest vertex.
pub fn triangulate(poly: &VPolytope) -> Result<Triangulation> {
    if poly.dim_affine < poly.dim_ambient {
        return Err(Error::NotFullDimensional);
    }
    let idx_simplices = triangulate_indices(&poly.vertices, poly.dim_ambient);
    let mut simplices = Vec::new();
    let mut volumes = Vec::new();
    let mut total = BigRational::zero();
    for ids in idx_simplices {
        let simplex: Vec<RationalPoint> = ids.iter().map(|&i| poly.vertices[i].clone()).collect();
        let vol = simplex_volume(&simplex);
        if vol.is_zero() {
            continue;
        }
        total += &vol;
        simplices.push(simplex);
        volumes.push(vol);
    }
    Ok(Triangulation {
        simplices,
        volumes,
        total_volume: total,
    })
}

/// Index-level triangulation of full-dimensional `vertices` in dimension `d`.
fn triangulate_indices(vertices: &[RationalPoint], d: usize) -> Vec<Vec<usize>> {
    let ids: Vec<usize> = (0..vertices.len()).collect();
    triangulate_rec(vertices, &ids, d)
}

fn triangulate_rec(all: &[RationalPoint], ids: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 0 || ids.len() < dim + 1 {
        return vec![];
    }
    if dim == 1 {
        // A 1-polytope is a segment between its extreme coordinates.
        let pick = |cmp: bool| -> usize {
            *ids.iter()
                .reduce(|a, b| {
                    let ord = all[*a].coords.cmp(&all[*b].coords);
                    if (ord == std::cmp::Ordering::Less) == cmp {
                        a
                    } else {
                        b
                    }
                })
                .unwrap()
        };
        let lo = pick(true);
        let hi = pick(false);
        if lo == hi {
            return vec![];
        }
        return vec![vec![lo, hi]];
    }
    if ids.len() == dim + 1 {
        return vec![ids.to_vec()];
    }
    // Working coordinates: project onto the pivot columns of the affine span
    // so the recursion always sees a full-dimensional body.
    let apex = *ids
        .iter()
        .min_by(|a, b| all[**a].coords.cmp(&all[**b].coords))
        .unwrap();
    let mut out = Vec::new();
    for facet in facets(all, ids, dim) {
        if facet.contains(&apex) {
            continue;
        }
        // Triangulate the facet within its own affine hull.
        let fpts: Vec<RationalPoint> = facet.iter().map(|&i| all[i].clone()).collect();
        let span = crate::subspace::affine_span(&fpts);
        let coords = if span.dim == 0 {
            vec![]
        } else {
            crate::subspace::choose_projection_coords(&span)
        };
        let projected: Vec<RationalPoint> = fpts
            .iter()
            .map(|p| RationalPoint::new(coords.iter().map(|&c| p.coords[c].clone()).collect()))
            .collect();
        let local_ids: Vec<usize> = (0..projected.len()).collect();
        for sub in triangulate_rec(&projected, &local_ids, dim - 1) {
            let mut simplex = vec![apex];
            simplex.extend(sub.iter().map(|&li| facet[li]));
            out.push(simplex);
        }
    }
    out
}

/// Facets of conv(ids): maximal vertex sets lying on a supporting hyperplane.
fn facets(all: &[RationalPoint], ids: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let mut planes: Vec<Hyperplane> = Vec::new();
    for combo in ids.iter().combinations(dim) {
        let pts: Vec<RationalPoint> = combo.iter().map(|&&i| all[i].clone()).collect();
        if let Ok(h) = crate::hyperplane::hyperplane_through(&pts) {
            planes.push(h);
        }
    }
    planes.sort();
    planes.dedup();
    let mut out = Vec::new();
    for h in planes {
        let mut on = Vec::new();
        let mut pos = false;
        let mut neg = false;
        for &i in ids {
            match h.side(&all[i]) {
                0 => on.push(i),
                s if s > 0 => pos = true,
                _ => neg = true,
            }
        }
        if on.len() >= dim && !(pos && neg) {
            out.push(on);
        }
    }
    out
}

/// Map d sorted uniforms in [0,1] to the point sum lambda_i v_i, where the
/// lambdas are the d+1 gap lengths.
pub fn simplex_point_from_uniforms(
    simplex: &[RationalPoint],
    uniforms: &[BigRational],
) -> RationalPoint {
    let d = simplex.len() - 1;
    assert_eq!(uniforms.len(), d);
    let mut cuts = uniforms.to_vec();
    cuts.sort();
    let dim = simplex[0].dim();
    let mut acc = vec![BigRational::zero(); dim];
    let mut prev = BigRational::zero();
    for i in 0..=d {
        let next = if i == d {
            BigRational::one()
        } else {
            cuts[i].clone()
        };
        let lambda = &next - &prev;
        for (a, c) in acc.iter_mut().zip(&simplex[i].coords) {
            *a += &lambda * c;
        }
        prev = next;
    }
    RationalPoint::new(acc)
}

/// Uniform sample: pick a simplex with probability proportional to its exact
/// volume, then a uniform point inside it via the sorted-gaps construction.
/// All arithmetic is exact; callers convert to floating point on output.
pub fn sample_uniform<R: rand::Rng + ?Sized>(
    tri: &Triangulation,
    rng: &mut R,
) -> Result<RationalPoint> {
    if tri.total_volume.is_zero() || tri.simplices.is_empty() {
        return Err(Error::ZeroVolume);
    }
    let u = dyadic_uniform_wide(rng) * &tri.total_volume;
    let mut acc = BigRational::zero();
    let mut chosen = tri.simplices.len() - 1;
    for (i, v) in tri.volumes.iter().enumerate() {
        acc += v;
        if u < acc {
            chosen = i;
            break;
        }
    }
    let simplex = &tri.simplices[chosen];
    let d = simplex.len() - 1;
    let uniforms: Vec<BigRational> = (0..d).map(|_| dyadic_uniform(rng)).collect();
    Ok(simplex_point_from_uniforms(simplex, &uniforms))
}
