//! Seeded dataset generators for the experiment harness.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::GridDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DatasetFamily {
    UniformGrid,
    Clustered { clusters: usize, spread: f64 },
    /// `fraction` of the points on one grid line, the rest uniform.
    Collinear { fraction: f64 },
    /// `fraction` of the points on one plane (d >= 3 flats of dim d-1).
    Coplanar { fraction: f64 },
    DuplicatedPoint { multiplicity: usize },
    /// Points hugging a line within one grid step without lying on it.
    AdversarialNearDegenerate { fraction: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetParams {
    pub dim: usize,
    pub denom: u64,
    pub n: usize,
    #[serde(flatten)]
    pub family: DatasetFamily,
}

pub fn generate_dataset<R: Rng + ?Sized>(
    params: &DatasetParams,
    rng: &mut R,
) -> Result<GridDataset> {
    let d = params.dim;
    let x = params.denom as i64;
    let n = params.n;
    if d == 0 || params.denom == 0 || n == 0 {
        return Err(Error::InfeasibleParams("need positive dim, denom, n".into()));
    }
    let uniform_point = |rng: &mut R| -> Vec<i64> { (0..d).map(|_| rng.gen_range(0..=x)).collect() };
    let points: Vec<Vec<i64>> = match &params.family {
        DatasetFamily::UniformGrid => (0..n).map(|_| uniform_point(rng)).collect(),
        DatasetFamily::Clustered { clusters, spread } => {
            if *clusters == 0 {
                return Err(Error::InfeasibleParams("clusters must be positive".into()));
            }
            let centers: Vec<Vec<i64>> = (0..*clusters).map(|_| uniform_point(rng)).collect();
            (0..n)
                .map(|_| {
                    let c = &centers[rng.gen_range(0..centers.len())];
                    (0..d)
                        .map(|i| {
                            let jitter = (spread * x as f64
                                * (rng.gen::<f64>() + rng.gen::<f64>() - 1.0))
                                .round() as i64;
                            (c[i] + jitter).clamp(0, x)
                        })
                        .collect()
                })
                .collect()
        }
        DatasetFamily::Collinear { fraction } => {
            let line = random_flat_points(d, x, 1, rng)?;
            mix_flat_points(&line, *fraction, n, d, x, rng)?
        }
        DatasetFamily::Coplanar { fraction } => {
            if d < 3 {
                return Err(Error::InfeasibleParams("coplanar family needs d >= 3".into()));
            }
            let plane = random_flat_points(d, x, d - 1, rng)?;
            mix_flat_points(&plane, *fraction, n, d, x, rng)?
        }
        DatasetFamily::DuplicatedPoint { multiplicity } => {
            if *multiplicity > n {
                return Err(Error::InfeasibleParams(
                    "multiplicity exceeds point count".into(),
                ));
            }
            let heavy = uniform_point(rng);
            let mut pts = vec![heavy; *multiplicity];
            while pts.len() < n {
                pts.push(uniform_point(rng));
            }
            pts
        }
        DatasetFamily::AdversarialNearDegenerate { fraction } => {
            let line = random_flat_points(d, x, 1, rng)?;
            let on = ((fraction * n as f64).ceil() as usize).min(n);
            let mut pts = Vec::with_capacity(n);
            for i in 0..n {
                if i < on {
                    let mut p = line[rng.gen_range(0..line.len())].clone();
                    // One grid step off the line, alternating side.
                    let axis = rng.gen_range(0..d);
                    let bump = if i % 2 == 0 { 1 } else { -1 };
                    p[axis] = (p[axis] + bump).clamp(0, x);
                    pts.push(p);
                } else {
                    pts.push(uniform_point(rng));
                }
            }
            pts
        }
    };
    GridDataset::new(d, params.denom, points)
}

/// Grid points of a random flat of dimension `flat_dim` with at least two
/// positions (small random integer directions through a random base point).
fn random_flat_points<R: Rng + ?Sized>(
    d: usize,
    x: i64,
    flat_dim: usize,
    rng: &mut R,
) -> Result<Vec<Vec<i64>>> {
    for _attempt in 0..200 {
        let base: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=x)).collect();
        let dirs: Vec<Vec<i64>> = (0..flat_dim)
            .map(|_| (0..d).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        if dirs.iter().any(|v| v.iter().all(|&c| c == 0)) {
            continue;
        }
        // Walk integer combinations; enough for desk-scale grids.
        let span = (x + 1).pow(flat_dim as u32).min(4096);
        let mut pts: Vec<Vec<i64>> = Vec::new();
        let mut stack = vec![0i64; flat_dim];
        'outer: for step in 0..span {
            let mut t = step;
            for s in stack.iter_mut() {
                *s = (t % (2 * x + 1)) - x;
                t /= 2 * x + 1;
            }
            let mut p = base.clone();
            for (ti, dir) in stack.iter().zip(&dirs) {
                for (pi, di) in p.iter_mut().zip(dir) {
                    *pi += ti * di;
                }
            }
            for &c in &p {
                if c < 0 || c > x {
                    continue 'outer;
                }
            }
            pts.push(p);
        }
        pts.sort();
        pts.dedup();
        if pts.len() >= 2 {
            return Ok(pts);
        }
    }
    Err(Error::InfeasibleParams(
        "could not sample a flat with enough grid points".into(),
    ))
}

fn mix_flat_points<R: Rng + ?Sized>(
    flat: &[Vec<i64>],
    fraction: f64,
    n: usize,
    d: usize,
    x: i64,
    rng: &mut R,
) -> Result<Vec<Vec<i64>>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InfeasibleParams("fraction must be in [0,1]".into()));
    }
    let on = (fraction * n as f64).ceil() as usize;
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        if i < on {
            pts.push(flat[rng.gen_range(0..flat.len())].clone());
        } else {
            pts.push((0..d).map(|_| rng.gen_range(0..=x)).collect());
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::subspace_census;
    use crate::noise::stream_rng;

    #[test]
    fn collinear_full_fraction_spans_one_line() {
        let params = DatasetParams {
            dim: 2,
            denom: 8,
            n: 20,
            family: DatasetFamily::Collinear { fraction: 1.0 },
        };
        let mut rng = stream_rng(5, 0);
        let s = generate_dataset(&params, &mut rng).unwrap();
        assert_eq!(s.len(), 20);
        let census = subspace_census(&s);
        assert_eq!(census.maxima[1], 20);
    }

    #[test]
    fn uniform_mean_within_clt_band() {
        let n = 4000;
        let params = DatasetParams {
            dim: 2,
            denom: 16,
            n,
            family: DatasetFamily::UniformGrid,
        };
        let mut rng = stream_rng(6, 0);
        let s = generate_dataset(&params, &mut rng).unwrap();
        for c in 0..2 {
            let mean: f64 =
                s.points.iter().map(|p| p[c] as f64 / 16.0).sum::<f64>() / n as f64;
            let band = 3.0 / (12.0 * n as f64).sqrt();
            assert!((mean - 0.5).abs() <= band, "mean {mean} band {band}");
        }
    }

    #[test]
    fn duplicated_point_sets_m0() {
        let params = DatasetParams {
            dim: 2,
            denom: 8,
            n: 12,
            family: DatasetFamily::DuplicatedPoint { multiplicity: 5 },
        };
        let mut rng = stream_rng(7, 0);
        let s = generate_dataset(&params, &mut rng).unwrap();
        let census = subspace_census(&s);
        assert!(census.maxima[0] >= 5);
    }

    #[test]
    fn infeasible_params_rejected() {
        let params = DatasetParams {
            dim: 2,
            denom: 8,
            n: 4,
            family: DatasetFamily::DuplicatedPoint { multiplicity: 9 },
        };
        let mut rng = stream_rng(8, 0);
        assert!(generate_dataset(&params, &mut rng).is_err());
        let params = DatasetParams {
            dim: 2,
            denom: 8,
            n: 4,
            family: DatasetFamily::Coplanar { fraction: 0.5 },
        };
        assert!(generate_dataset(&params, &mut rng).is_err());
    }
}
