//! Utility sweeps: success rate and achieved depth across parameter grids.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::dataset::GridDataset;
use crate::driver::{dp_convex_hull_point, BudgetSplit, Engine, Mode};
use crate::error::Result;
use crate::noise::stream_rng;
use crate::tukey::tukey_depth;

use super::datasets::{generate_dataset, DatasetFamily, DatasetParams};
use super::parallel_map;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dim: usize,
    pub denoms: Vec<u64>,
    pub ns: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub modes: Vec<Mode>,
    pub family: DatasetFamily,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub dim: usize,
    pub denom: u64,
    pub n: usize,
    pub epsilon: f64,
    pub mode: Mode,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_depth: f64,
    pub failure_rate: f64,
    pub mean_runtime_ms: f64,
}

/// Per cell: T independent runs; success means the output point has
/// positive Tukey depth (it lies in the hull); achieved depth is measured
/// on the output with the exact depth query.
pub fn utility_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    let mut cell_index = 0u64;
    for &denom in &config.denoms {
        for &n in &config.ns {
            for &epsilon in &config.epsilons {
                for &mode in &config.modes {
                    cell_index += 1;
                    let params = DatasetParams {
                        dim: config.dim,
                        denom,
                        n,
                        family: config.family.clone(),
                    };
                    let mut data_rng = stream_rng(config.seed, cell_index);
                    let s = generate_dataset(&params, &mut data_rng)?;
                    let delta = if mode == Mode::Approx {
                        if config.delta > 0.0 {
                            config.delta
                        } else {
                            1e-3
                        }
                    } else {
                        config.delta
                    };
                    let budget = BudgetSplit::default_for(epsilon, delta, config.dim, mode);
                    let engine = Engine::new();
                    // Warm the caches once so the timing reflects sampling.
                    let _ = engine.ladder(&s);
                    let trial_ids: Vec<usize> = (0..config.trials).collect();
                    let results = parallel_map(&trial_ids, |_, &t| {
                        let mut rng =
                            stream_rng(config.seed, (cell_index << 32) | (t as u64 + 1));
                        let start = Instant::now();
                        let out = dp_convex_hull_point(&s, &budget, &engine, &mut rng);
                        let ms = start.elapsed().as_secs_f64() * 1e3;
                        match out {
                            Ok(o) => match o.point {
                                Some(p) => (Some(tukey_depth(&p, &s)), ms),
                                None => (None, ms),
                            },
                            Err(_) => (None, ms),
                        }
                    });
                    let t = config.trials as f64;
                    let failures = results.iter().filter(|(d, _)| d.is_none()).count();
                    let successes = results
                        .iter()
                        .filter(|(d, _)| matches!(d, Some(dep) if *dep >= 1))
                        .count();
                    let depth_sum: usize = results.iter().filter_map(|(d, _)| *d).sum();
                    let runtime: f64 = results.iter().map(|(_, ms)| ms).sum::<f64>() / t;
                    rows.push(SweepRow {
                        dim: config.dim,
                        denom,
                        n,
                        epsilon,
                        mode,
                        trials: config.trials,
                        success_rate: successes as f64 / t,
                        mean_depth: depth_sum as f64 / t,
                        failure_rate: failures as f64 / t,
                        mean_runtime_ms: runtime,
                    });
                }
            }
        }
    }
    Ok(rows)
}
