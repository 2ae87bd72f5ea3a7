//! Stage timings across input sizes with log-log slope fits.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::census::subspace_census;
use crate::error::Result;
use crate::mechanism::{build_ladder, run_base_case_exact};
use crate::noise::stream_rng;
use crate::tukey::spanned_hyperplanes;

use super::datasets::{generate_dataset, DatasetFamily, DatasetParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dim: usize,
    pub denom: u64,
    pub ns: Vec<usize>,
    pub seed: u64,
    /// Timing repetitions per stage; the median is reported.
    #[serde(default = "default_reps")]
    pub reps: usize,
}

fn default_reps() -> usize {
    3
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub stage: String,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of ln(time) against ln(n) per stage.
    pub slopes: Vec<(String, f64)>,
}

pub fn bench(config: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for (i, &n) in config.ns.iter().enumerate() {
        let params = DatasetParams {
            dim: config.dim,
            denom: config.denom,
            n,
            family: DatasetFamily::UniformGrid,
        };
        let mut rng = stream_rng(config.seed, i as u64 + 1);
        let s = generate_dataset(&params, &mut rng)?;
        let time_stage = |f: &dyn Fn()| -> f64 {
            let mut times: Vec<f64> = (0..config.reps)
                .map(|_| {
                    let start = Instant::now();
                    f();
                    start.elapsed().as_secs_f64() * 1e3
                })
                .collect();
            times.sort_by(f64::total_cmp);
            times[times.len() / 2]
        };
        rows.push(BenchRow {
            n,
            stage: "halfspace_enumeration".into(),
            millis: time_stage(&|| {
                let _ = spanned_hyperplanes(&s);
            }),
        });
        rows.push(BenchRow {
            n,
            stage: "ladder".into(),
            millis: time_stage(&|| {
                let _ = build_ladder(&s, s.len());
            }),
        });
        rows.push(BenchRow {
            n,
            stage: "census".into(),
            millis: time_stage(&|| {
                let _ = subspace_census(&s);
            }),
        });
        let ladder = build_ladder(&s, s.len());
        rows.push(BenchRow {
            n,
            stage: "sampling_100".into(),
            millis: time_stage(&|| {
                let mut r = stream_rng(config.seed, 999);
                for _ in 0..100 {
                    let _ = run_base_case_exact(&ladder, 1.0, &mut r);
                }
            }),
        });
    }
    let mut slopes = Vec::new();
    for stage in ["halfspace_enumeration", "ladder", "census", "sampling_100"] {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.stage == stage && r.millis > 0.0)
            .map(|r| ((r.n as f64).ln(), r.millis.max(1e-6).ln()))
            .collect();
        if pts.len() >= 2 {
            slopes.push((stage.to_string(), least_squares_slope(&pts)));
        }
    }
    Ok(BenchReport {
        config: config.clone(),
        rows,
        slopes,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn bench_csv(report: &BenchReport) -> String {
    let mut out = String::from("n,stage,millis\n");
    for r in &report.rows {
        out.push_str(&format!("{},{},{:.4}\n", r.n, r.stage, r.millis));
    }
    out
}
