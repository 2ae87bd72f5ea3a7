//! Independent brute-force references for depth, volume and region shapes.
//!
//! Nothing here calls the production geometry modules: the depth reference
//! enumerates candidate halfspace normals geometrically (arc representatives
//! on the circle, cross products in 3-d) instead of the recursive kernel
//! method, so the two paths can cross-validate each other.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::dataset::GridDataset;
use crate::rational::RationalPoint;

/// Definition-level Tukey depth: minimum over closed halfspaces containing
/// `q` of the number of dataset points inside. Supports d <= 3.
pub fn depth_bruteforce(q: &RationalPoint, s: &GridDataset) -> usize {
    assert_eq!(q.dim(), s.dim);
    assert!(s.dim <= 3, "brute-force oracle supports d <= 3");
    let offsets: Vec<Vec<BigInt>> = s
        .rational_points()
        .iter()
        .map(|p| int_offset(p, q))
        .collect();
    match s.dim {
        1 => depth_1d(&offsets),
        2 => depth_2d(&offsets, &pair_normals_2d(s)),
        3 => depth_3d(&offsets, &triple_normals_3d(s)),
        _ => unreachable!(),
    }
}

/// Offset p - q cleared to integers. Each offset may be scaled by its own
/// positive factor; only directions matter to halfspace counts.
fn int_offset(p: &RationalPoint, q: &RationalPoint) -> Vec<BigInt> {
    let diff: Vec<_> = p
        .coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| a - b)
        .collect();
    let mut lcm = BigInt::from(1);
    for x in &diff {
        lcm = lcm.lcm(x.denom());
    }
    diff.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divide by the gcd, preserving direction.
fn reduce(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|c| c / &g).collect()
}

fn depth_1d(zs: &[Vec<BigInt>]) -> usize {
    let le = zs.iter().filter(|z| !z[0].is_positive()).count();
    let ge = zs.iter().filter(|z| !z[0].is_negative()).count();
    le.min(ge)
}

/// Normals of lines spanned by dataset point pairs (query-independent).
fn pair_normals_2d(s: &GridDataset) -> Vec<Vec<BigInt>> {
    let mut distinct = s.points.clone();
    distinct.sort();
    distinct.dedup();
    let mut out = Vec::new();
    for i in 0..distinct.len() {
        for j in (i + 1)..distinct.len() {
            let dx = BigInt::from(distinct[j][0] - distinct[i][0]);
            let dy = BigInt::from(distinct[j][1] - distinct[i][1]);
            out.push(reduce(&[-dy.clone(), dx.clone()]));
            out.push(reduce(&[dy, -dx]));
        }
    }
    out
}

/// Minimum closed-halfspace count at the origin, 2-d arc method.
///
/// Every candidate normal direction lies strictly inside an open arc of the
/// circle cut by the offset perpendiculars (plus any extra walls), so no
/// nonzero offset sits on the boundary and closed counts are unambiguous.
fn depth_2d(zs: &[Vec<BigInt>], extra_walls: &[Vec<BigInt>]) -> usize {
    let n = zs.len();
    let zeros = zs.iter().filter(|z| z.iter().all(Zero::is_zero)).count();
    let nonzero: Vec<&Vec<BigInt>> = zs.iter().filter(|z| !z.iter().all(Zero::is_zero)).collect();
    if nonzero.is_empty() {
        return n;
    }
    let mut walls: Vec<Vec<BigInt>> = Vec::new();
    for z in &nonzero {
        walls.push(reduce(&[-z[1].clone(), z[0].clone()]));
        walls.push(reduce(&[z[1].clone(), -z[0].clone()]));
    }
    for w in extra_walls {
        if !w.iter().all(Zero::is_zero) {
            walls.push(reduce(w));
        }
    }
    walls.sort_by(angle_cmp);
    walls.dedup();
    let m = walls.len();
    let mut reps: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..m {
        let u = &walls[i];
        let v = &walls[(i + 1) % m];
        let cross = &u[0] * &v[1] - &u[1] * &v[0];
        if m == 1 {
            reps.push(vec![-u[1].clone(), u[0].clone()]);
            reps.push(vec![u[1].clone(), -u[0].clone()]);
        } else if cross.is_zero() && dot(u, v).is_negative() {
            // Gap of exactly pi: the CCW perpendicular is strictly inside.
            reps.push(vec![-u[1].clone(), u[0].clone()]);
        } else if cross.is_positive() {
            reps.push(vec![&u[0] + &v[0], &u[1] + &v[1]]);
        }
    }
    let mut best = n;
    for v in &reps {
        let pos = nonzero.iter().filter(|z| dot(v, z).is_positive()).count();
        let neg = nonzero.len() - pos; // representatives avoid every wall
        best = best.min(pos.min(neg) + zeros);
    }
    best
}

/// Counter-clockwise angular order starting from the positive x-axis.
fn angle_cmp(a: &Vec<BigInt>, b: &Vec<BigInt>) -> std::cmp::Ordering {
    let half = |v: &[BigInt]| -> u8 {
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    match half(a).cmp(&half(b)) {
        std::cmp::Ordering::Equal => {
            let cross = &a[0] * &b[1] - &a[1] * &b[0];
            if cross.is_positive() {
                std::cmp::Ordering::Less
            } else if cross.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        }
        o => o,
    }
}

fn cross3(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// Normals of planes spanned by dataset point triples (query-independent).
fn triple_normals_3d(s: &GridDataset) -> Vec<Vec<BigInt>> {
    let mut distinct = s.points.clone();
    distinct.sort();
    distinct.dedup();
    let m = distinct.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let u: Vec<BigInt> = (0..3)
                    .map(|c| BigInt::from(distinct[j][c] - distinct[i][c]))
                    .collect();
                let v: Vec<BigInt> = (0..3)
                    .map(|c| BigInt::from(distinct[k][c] - distinct[i][c]))
                    .collect();
                let c = cross3(&u, &v);
                if !c.iter().all(Zero::is_zero) {
                    out.push(reduce(&c));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn depth_3d(zs: &[Vec<BigInt>], triple_normals: &[Vec<BigInt>]) -> usize {
    let n = zs.len();
    let nonzero: Vec<Vec<BigInt>> = zs
        .iter()
        .filter(|z| !z.iter().all(Zero::is_zero))
        .map(|z| reduce(z))
        .collect();
    if nonzero.is_empty() {
        return n;
    }
    // Collapse onto a lower-dimensional span when possible.
    let base = &nonzero[0];
    if nonzero
        .iter()
        .all(|z| cross3(base, z).iter().all(Zero::is_zero))
    {
        // All offsets on one line through q.
        let axis = base.iter().position(|c| !c.is_zero()).unwrap();
        let reduced: Vec<Vec<BigInt>> = zs
            .iter()
            .map(|z| vec![&z[axis] * BigInt::from(sign_of(&base[axis]))])
            .collect();
        return depth_1d(&reduced);
    }
    let plane_normal = nonzero
        .iter()
        .map(|z| cross3(base, z))
        .find(|c| !c.iter().all(Zero::is_zero))
        .unwrap();
    if nonzero.iter().all(|z| dot(&plane_normal, z).is_zero()) {
        // All offsets in a plane through q: rotate nothing, just project out
        // one coordinate where the plane normal is nonzero.
        let drop = plane_normal.iter().position(|c| !c.is_zero()).unwrap();
        let reduced: Vec<Vec<BigInt>> = zs
            .iter()
            .map(|z| {
                (0..3)
                    .filter(|&i| i != drop)
                    .map(|i| z[i].clone())
                    .collect()
            })
            .collect();
        return depth_2d(&reduced, &[]);
    }
    // Candidate normals: cross products of offset pairs, plus the normals of
    // planes spanned by dataset triples.
    let mut candidates: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..nonzero.len() {
        for j in (i + 1)..nonzero.len() {
            let c = cross3(&nonzero[i], &nonzero[j]);
            if !c.iter().all(Zero::is_zero) {
                candidates.push(reduce(&c));
            }
        }
    }
    candidates.extend(triple_normals.iter().cloned());
    candidates.sort();
    candidates.dedup();
    let mut best = n;
    for v in &candidates {
        let mut pos = 0;
        let mut neg = 0;
        let mut on: Vec<Vec<BigInt>> = Vec::new();
        for z in zs {
            match sign_of(&dot(v, z)) {
                1 => pos += 1,
                -1 => neg += 1,
                _ => on.push(z.clone()),
            }
        }
        if pos.min(neg) >= best {
            continue;
        }
        // Resolve boundary offsets inside the candidate plane with the 2-d
        // arc method (project out a coordinate where the normal is nonzero).
        let drop = v.iter().position(|c| !c.is_zero()).unwrap();
        let reduced: Vec<Vec<BigInt>> = on
            .iter()
            .map(|z| {
                (0..3)
                    .filter(|&i| i != drop)
                    .map(|i| z[i].clone())
                    .collect()
            })
            .collect();
        best = best.min(pos.min(neg) + depth_2d(&reduced, &[]));
    }
    best
}

/// Rejection-sampling volume estimate with a 99% Clopper-Pearson interval.
pub struct MonteCarloVolume {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub hits: u64,
    pub samples: u64,
}

pub fn volume_montecarlo<R: rand::Rng>(
    membership: impl Fn(&[f64]) -> bool,
    lo: &[f64],
    hi: &[f64],
    samples: u64,
    rng: &mut R,
) -> MonteCarloVolume {
    assert!(samples >= 10_000, "too few samples for a useful interval");
    let d = lo.len();
    let box_volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mut hits = 0u64;
    let mut x = vec![0.0; d];
    for _ in 0..samples {
        for i in 0..d {
            x[i] = lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>();
        }
        if membership(&x) {
            hits += 1;
        }
    }
    let (plo, phi) = clopper_pearson(hits, samples, 0.99);
    MonteCarloVolume {
        estimate: hits as f64 / samples as f64 * box_volume,
        lo: plo * box_volume,
        hi: phi * box_volume,
        hits,
        samples,
    }
}

/// Two-sided Clopper-Pearson interval for a binomial proportion.
pub fn clopper_pearson(hits: u64, n: u64, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let lo = if hits == 0 {
        0.0
    } else {
        Beta::new(hits as f64, (n - hits + 1) as f64)
            .unwrap()
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if hits == n {
        1.0
    } else {
        Beta::new((hits + 1) as f64, (n - hits) as f64)
            .unwrap()
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Depth of every node of the refined grid with step 1/refinement.
/// Intended for d <= 2.
pub fn depth_field(s: &GridDataset, refinement: u64) -> Vec<(Vec<i64>, usize)> {
    assert!(s.dim <= 2, "depth field scan is for d <= 2");
    let r = refinement as i64;
    let mut out = Vec::new();
    match s.dim {
        1 => {
            for i in 0..=r {
                let q = RationalPoint::from_numerators(&[i], refinement);
                out.push((vec![i], depth_bruteforce(&q, s)));
            }
        }
        2 => {
            for i in 0..=r {
                for j in 0..=r {
                    let q = RationalPoint::from_numerators(&[i, j], refinement);
                    out.push((vec![i, j], depth_bruteforce(&q, s)));
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

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
    fn oracle_1d_direct_counts() {
        let s = ds(1, 4, &[&[0], &[1], &[3], &[4]]);
        assert_eq!(depth_bruteforce(&rp(&[(1, 4)]), &s), 2);
        assert_eq!(depth_bruteforce(&rp(&[(1, 8)]), &s), 1);
        assert_eq!(depth_bruteforce(&rp(&[(9, 8)]), &s), 0);
    }

    #[test]
    fn oracle_2d_square() {
        let s = ds(2, 1, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert_eq!(depth_bruteforce(&rp(&[(1, 2), (1, 2)]), &s), 2);
        assert_eq!(depth_bruteforce(&rp(&[(0, 1), (0, 1)]), &s), 1);
        assert_eq!(depth_bruteforce(&rp(&[(2, 1), (0, 1)]), &s), 0);
    }

    #[test]
    fn oracle_2d_collinear_middle() {
        let s = ds(2, 2, &[&[0, 0], &[1, 1], &[2, 2]]);
        assert_eq!(depth_bruteforce(&rp(&[(1, 2), (1, 2)]), &s), 2);
        assert_eq!(depth_bruteforce(&rp(&[(0, 1), (0, 1)]), &s), 1);
        assert_eq!(depth_bruteforce(&rp(&[(1, 2), (1, 4)]), &s), 0);
    }

    #[test]
    fn oracle_2d_duplicates_at_query() {
        let s = ds(2, 1, &[&[0, 0], &[0, 0], &[0, 0]]);
        assert_eq!(depth_bruteforce(&rp(&[(0, 1), (0, 1)]), &s), 3);
    }

    #[test]
    fn oracle_3d_simplex_center() {
        let s = ds(3, 1, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(depth_bruteforce(&rp(&[(1, 4), (1, 4), (1, 4)]), &s), 1);
        assert_eq!(depth_bruteforce(&rp(&[(1, 1), (1, 1), (1, 1)]), &s), 0);
    }

    #[test]
    fn oracle_3d_collinear() {
        let s = ds(3, 2, &[&[0, 0, 0], &[1, 1, 1], &[2, 2, 2]]);
        assert_eq!(depth_bruteforce(&rp(&[(1, 2), (1, 2), (1, 2)]), &s), 2);
        assert_eq!(depth_bruteforce(&rp(&[(0, 1), (0, 1), (0, 1)]), &s), 1);
        assert_eq!(depth_bruteforce(&rp(&[(1, 2), (1, 2), (1, 4)]), &s), 0);
    }

    #[test]
    fn mc_volume_half_cube() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
        let mc = volume_montecarlo(
            |x: &[f64]| x[0] <= 0.5,
            &[0.0, 0.0],
            &[1.0, 1.0],
            100_000,
            &mut rng,
        );
        assert!(mc.lo <= 0.5 && 0.5 <= mc.hi, "CI [{}, {}]", mc.lo, mc.hi);
    }

    #[test]
    fn field_square_center_cell() {
        let s = ds(2, 1, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let field = depth_field(&s, 8);
        let center = field.iter().find(|(p, _)| p == &vec![4, 4]).unwrap();
        assert_eq!(center.1, 2);
    }
}
