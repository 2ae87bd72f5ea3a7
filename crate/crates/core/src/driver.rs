//! Top-level private mechanism: noisy subspace census, private dimension
//! choice, private subspace selection, recursion with projection/lift, and
//! base-case dispatch with budget accounting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::approx::{run_base_case_approx, ApproxConfig};
use crate::census::{subspace_census, subspace_scores, SubspaceCensus};
use crate::dataset::GridDataset;
use crate::error::{Error, Result};
use crate::mechanism::{
    build_ladder, run_base_case_exact, sample_discrete_exact, BaseCaseRecord, RegionLadder,
};
use crate::noise::laplace_noise;
use crate::numeric::{exp_lower, pow};
use crate::rational::{dyadic_uniform_wide, RationalPoint};
use crate::subspace::{choose_projection_coords, lift_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

/// Privacy budget split across the mechanism's events.
///
/// Each noisy maximum costs `epsilon_noise`; the selection at recursion step
/// r costs `epsilon_select / 2^r`; a base-case run consumes whatever budget
/// remains on its path. Along every possible path the event budgets sum to
/// at most `epsilon_total`, which gives the overall privacy claim by
/// composition. `delta_total` is consumed entirely by the approximate mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BudgetSplit {
    pub epsilon_total: f64,
    pub delta_total: f64,
    /// Per noisy maximum M'_i.
    pub epsilon_noise: f64,
    /// Selection budget at recursion step 0; halves at each deeper step.
    pub epsilon_select: f64,
    /// Guaranteed floor for the base-case budget (actual = remaining).
    pub epsilon_base: f64,
    /// Per-event confidence parameter for the threshold rules.
    pub beta: f64,
    pub mode: Mode,
    /// Smallest accepted input size.
    pub min_n: usize,
}

impl BudgetSplit {
    /// Default desk-scale split: a quarter of the budget to the noisy
    /// maxima, the rest shared between selections (geometrically decaying
    /// per step) and the base case, which receives everything unspent.
    pub fn default_for(epsilon: f64, delta: f64, d: usize, mode: Mode) -> Self {
        assert!(epsilon > 0.0 && d >= 1);
        let worst_maxima = (d * (d + 1) / 2) as f64;
        let epsilon_noise = epsilon / (4.0 * worst_maxima);
        let epsilon_select = (3.0 * epsilon / 8.0) / (1.0 - 0.5f64.powi(d as i32));
        let epsilon_base =
            (3.0 * epsilon / 4.0) * 0.5f64.powi(d as i32) / (1.0 - 0.5f64.powi(d as i32));
        Self {
            epsilon_total: epsilon,
            delta_total: delta,
            epsilon_noise,
            epsilon_select,
            epsilon_base,
            beta: 0.1,
            mode,
            min_n: 4 * d,
        }
    }

    pub fn select_epsilon(&self, step: usize) -> f64 {
        self.epsilon_select * 0.5f64.powi(step as i32)
    }

    /// Largest possible sum of event budgets over any recursion path.
    pub fn worst_path_epsilon(&self, d: usize) -> f64 {
        let noise = (d * (d + 1) / 2) as f64 * self.epsilon_noise;
        let selections: f64 = (0..d).map(|r| self.select_epsilon(r)).sum();
        noise + selections
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.epsilon_total <= 0.0 {
            return Err(Error::InvalidConfig("epsilon must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta) || self.beta == 0.0 {
            return Err(Error::InvalidConfig("beta must lie in (0, 1)".into()));
        }
        let worst = self.worst_path_epsilon(d);
        if worst > self.epsilon_total * (1.0 + 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "budget split exceeds epsilon: worst path {worst} > {}",
                self.epsilon_total
            )));
        }
        if self.mode == Mode::Approx && self.delta_total <= 0.0 {
            return Err(Error::InvalidConfig(
                "approximate mode needs a positive delta".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    BaseCase,
    Recurse(usize),
}

/// Threshold rule: recurse at the smallest j whose noisy maximum exceeds
/// n - (d-j+1)k - ln(2/beta)/epsilon_noise, else run the base case.
pub fn choose_dimension(
    m_noisy: &[f64],
    n: usize,
    k: f64,
    d: usize,
    epsilon_noise: f64,
    beta: f64,
) -> Decision {
    debug_assert_eq!(m_noisy.len(), d);
    for (j, m) in m_noisy.iter().enumerate() {
        let threshold = n as f64 - (d - j + 1) as f64 * k - (2.0 / beta).ln() / epsilon_noise;
        if *m > threshold {
            return Decision::Recurse(j);
        }
    }
    Decision::BaseCase
}

pub fn dimension_thresholds(n: usize, k: f64, d: usize, epsilon_noise: f64, beta: f64) -> Vec<f64> {
    (0..d)
        .map(|j| n as f64 - (d - j + 1) as f64 * k - (2.0 / beta).ln() / epsilon_noise)
        .collect()
}

/// Outcome of the private subspace selection.
pub enum Selection {
    /// Index into census.by_dim[j].
    Chosen(usize),
    /// The zero-score class was drawn; the whole run stops with a failure.
    Failure,
}

/// Exponential mechanism over the universe of grid-spanned j-subspaces,
/// padded with dummies to exactly X^(d(j+1)) elements. Classes are drawn
/// with weight N_s e^(eps s/4) in exact rational arithmetic and a uniform
/// member of the winning class is returned.
pub fn select_subspace<R: rand::Rng + ?Sized>(
    census: &SubspaceCensus,
    j: usize,
    grid_denom: u64,
    epsilon_select: f64,
    rng: &mut R,
) -> Result<Selection> {
    let d = census.dim;
    let scored = subspace_scores(census, j);
    let mut classes: Vec<(usize, Vec<usize>)> = Vec::new(); // (score, member idx)
    for (idx, score) in &scored {
        if *score == 0 {
            continue;
        }
        match classes.binary_search_by_key(score, |(s, _)| *s) {
            Ok(pos) => classes[pos].1.push(*idx),
            Err(pos) => classes.insert(pos, (*score, vec![*idx])),
        }
    }
    let universe = BigInt::from(grid_denom).pow((d * (j + 1)) as u32);
    let positive: usize = classes.iter().map(|(_, m)| m.len()).sum();
    let n0 = (&universe - BigInt::from(positive)).max(BigInt::zero());
    let e_quarter = exp_lower(&crate::mechanism::rational_from_f64(epsilon_select / 4.0));
    let mut weights = vec![BigRational::from_integer(n0)];
    for (score, members) in &classes {
        weights.push(BigRational::from_integer(BigInt::from(members.len())) * pow(&e_quarter, *score));
    }
    let chosen = sample_discrete_exact(&weights, rng)?;
    if chosen == 0 {
        return Ok(Selection::Failure);
    }
    let members = &classes[chosen - 1].1;
    let pick = uniform_index(members.len(), rng);
    Ok(Selection::Chosen(members[pick]))
}

fn uniform_index<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> usize {
    let u = dyadic_uniform_wide(rng) * BigRational::from_integer(BigInt::from(len));
    let idx = (u.numer() / u.denom())
        .to_string()
        .parse::<usize>()
        .unwrap_or(0);
    idx.min(len - 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub step: usize,
    pub dim: usize,
    pub n: usize,
    pub noisy_maxima: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub decision: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_select: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection_coords: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restricted_n: Option<usize>,
}

/// Full record of one mechanism run; fixed (dataset, config, seed) produce
/// byte-identical transcripts.
#[derive(Debug, Clone, Serialize)]
pub struct RunTranscript {
    pub config: BudgetSplit,
    pub k: f64,
    pub levels: Vec<LevelRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseCaseRecord>,
    pub epsilon_spent_before_base: f64,
    pub failure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_exact: Option<Vec<String>>,
}

pub struct RunOutcome {
    pub point: Option<RationalPoint>,
    pub transcript: RunTranscript,
}

/// Memoized per-dataset geometry shared across repeated runs.
#[derive(Default)]
pub struct Engine {
    census_cache: Mutex<HashMap<u64, Arc<SubspaceCensus>>>,
    ladder_cache: Mutex<HashMap<u64, Arc<RegionLadder>>>,
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn census(&self, s: &GridDataset) -> Arc<SubspaceCensus> {
        let key = s.fingerprint();
        let mut cache = self.census_cache.lock().unwrap();
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(subspace_census(s)))
            .clone()
    }

    pub fn ladder(&self, s: &GridDataset) -> Arc<RegionLadder> {
        let key = s.fingerprint();
        let mut cache = self.ladder_cache.lock().unwrap();
        cache
            .entry(key)
            .or_insert_with(|| Arc::new(build_ladder(s, s.len())))
            .clone()
    }
}

/// The full private mechanism. Returns the output point (absent on explicit
/// mechanism failure) together with the complete transcript.
pub fn dp_convex_hull_point<R: rand::Rng + ?Sized>(
    s: &GridDataset,
    config: &BudgetSplit,
    engine: &Engine,
    rng: &mut R,
) -> Result<RunOutcome> {
    config.validate(s.dim)?;
    if s.len() < config.min_n {
        return Err(Error::InvalidConfig(format!(
            "need at least {} points, got {}",
            config.min_n,
            s.len()
        )));
    }
    let d0 = s.dim;
    let n0 = s.len();
    // k is fixed for the whole recursion from the top-level n and d.
    let k = n0 as f64 / (4.0 * d0 as f64);
    let mut transcript = RunTranscript {
        config: config.clone(),
        k,
        levels: Vec::new(),
        base: None,
        epsilon_spent_before_base: 0.0,
        failure: false,
        point: None,
        point_exact: None,
    };
    let mut current = s.clone();
    let mut lift_stack: Vec<(crate::subspace::AffineSubspace, Vec<usize>)> = Vec::new();
    let mut spent = 0.0f64;
    let mut point: Option<RationalPoint> = None;
    for step in 0..=d0 {
        let d_cur = current.dim;
        let n_cur = current.len();
        let census = engine.census(&current);
        let noise_scale = 1.0 / config.epsilon_noise;
        let noisy: Vec<f64> = census
            .maxima
            .iter()
            .map(|&m| m as f64 + laplace_noise(noise_scale, rng))
            .collect();
        spent += d_cur as f64 * config.epsilon_noise;
        let thresholds = dimension_thresholds(n_cur, k, d_cur, config.epsilon_noise, config.beta);
        let decision = choose_dimension(&noisy, n_cur, k, d_cur, config.epsilon_noise, config.beta);
        let mut record = LevelRecord {
            step,
            dim: d_cur,
            n: n_cur,
            noisy_maxima: noisy,
            thresholds,
            decision: match decision {
                Decision::BaseCase => "base".into(),
                Decision::Recurse(_) => "recurse".into(),
            },
            chosen_dim: None,
            epsilon_select: None,
            selected_witness: None,
            projection_coords: None,
            restricted_n: None,
        };
        match decision {
            Decision::BaseCase => {
                transcript.levels.push(record);
                let eps_base = (config.epsilon_total - spent).max(config.epsilon_base * 0.5);
                transcript.epsilon_spent_before_base = spent;
                let ladder = engine.ladder(&current);
                let (p, base_record) = match config.mode {
                    Mode::Exact => run_base_case_exact(&ladder, eps_base, rng)?,
                    Mode::Approx => run_base_case_approx(
                        &ladder,
                        n_cur,
                        eps_base,
                        config.delta_total,
                        ApproxConfig::default(),
                        rng,
                    )?,
                };
                transcript.base = Some(base_record);
                point = Some(p);
                break;
            }
            Decision::Recurse(j) => {
                let eps_sel = config.select_epsilon(step);
                spent += eps_sel;
                record.chosen_dim = Some(j);
                record.epsilon_select = Some(eps_sel);
                let selection = select_subspace(&census, j, current.denom, eps_sel, rng)?;
                let idx = match selection {
                    Selection::Failure => {
                        transcript.levels.push(record);
                        transcript.failure = true;
                        transcript.epsilon_spent_before_base = spent;
                        return Ok(RunOutcome {
                            point: None,
                            transcript,
                        });
                    }
                    Selection::Chosen(idx) => idx,
                };
                let subspace = census.by_dim[j][idx].clone();
                record.selected_witness = subspace.spanning_witness.clone();
                if j == 0 {
                    // Zero-dimensional subspace: its base point is the output.
                    transcript.levels.push(record);
                    transcript.epsilon_spent_before_base = spent;
                    point = Some(subspace.base.clone());
                    break;
                }
                let restricted = current.restrict(|p| subspace.contains(p));
                if restricted.is_empty() {
                    return Err(Error::EmptyRestriction);
                }
                let coords = choose_projection_coords(&subspace);
                record.projection_coords = Some(coords.clone());
                record.restricted_n = Some(restricted.len());
                transcript.levels.push(record);
                current = restricted.project(&coords);
                lift_stack.push((subspace, coords));
            }
        }
    }
    // Lift the output point back through the recorded projections.
    let mut lifted = point.expect("loop always sets a point or returns");
    for (subspace, coords) in lift_stack.iter().rev() {
        lifted = lift_point(&lifted, subspace, coords)?;
    }
    transcript.point = Some(lifted.to_f64_vec());
    transcript.point_exact = Some(lifted.to_strings());
    Ok(RunOutcome {
        point: Some(lifted),
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::stream_rng;
    use crate::tukey::tukey_depth;

    fn ds(dim: usize, denom: u64, pts: Vec<Vec<i64>>) -> GridDataset {
        GridDataset::new(dim, denom, pts).unwrap()
    }

    #[test]
    fn budget_split_fits_epsilon() {
        for d in 1..=4 {
            let split = BudgetSplit::default_for(1.0, 1e-6, d, Mode::Exact);
            split.validate(d).unwrap();
            let worst = split.worst_path_epsilon(d);
            assert!(worst <= 1.0 + 1e-9, "d={d}: worst={worst}");
            assert!(worst >= 0.95, "d={d}: split leaves budget unused: {worst}");
        }
    }

    #[test]
    fn choose_dimension_rules() {
        // All noisy maxima far below threshold: base case.
        let m = vec![-100.0, -100.0];
        assert_eq!(
            choose_dimension(&m, 64, 8.0, 2, 0.1, 0.1),
            Decision::BaseCase
        );
        // M'_0 above its threshold: recurse at 0.
        let m = vec![100.0, -100.0];
        assert_eq!(
            choose_dimension(&m, 64, 8.0, 2, 0.1, 0.1),
            Decision::Recurse(0)
        );
        // Violation only at j = 1.
        let n = 64;
        let k = 8.0;
        let thr = dimension_thresholds(n, k, 2, 0.1, 0.1);
        let m = vec![thr[0] - 1.0, thr[1] + 0.5];
        assert_eq!(
            choose_dimension(&m, n, k, 2, 0.1, 0.1),
            Decision::Recurse(1)
        );
    }

    #[test]
    fn selection_dominant_subspace_wins() {
        // One line with an enormous score on a tiny grid.
        let mut pts = vec![];
        for i in 0..=4 {
            pts.push(vec![i, i]);
            pts.push(vec![i, i]);
            pts.push(vec![i, i]);
            pts.push(vec![i, i]);
        }
        pts.push(vec![0, 1]);
        let s = ds(2, 4, pts);
        let census = subspace_census(&s);
        let mut rng = stream_rng(1, 0);
        let mut failures = 0;
        for _ in 0..50 {
            match select_subspace(&census, 1, s.denom, 8.0, &mut rng).unwrap() {
                Selection::Chosen(idx) => {
                    assert_eq!(census.by_dim[1][idx].count, 20);
                }
                Selection::Failure => failures += 1,
            }
        }
        assert!(failures <= 1, "dominant subspace lost {failures} times");
    }

    #[test]
    fn selection_without_positive_scores_always_fails() {
        // A single occupied position spans no lines at all, so the j=1
        // universe consists entirely of zero-score elements.
        let s = ds(2, 8, vec![vec![3, 3]; 6]);
        let census = subspace_census(&s);
        assert!(census.by_dim[1].is_empty());
        let mut rng = stream_rng(2, 0);
        for _ in 0..20 {
            assert!(matches!(
                select_subspace(&census, 1, s.denom, 1.0, &mut rng).unwrap(),
                Selection::Failure
            ));
        }
    }

    #[test]
    fn run_identical_points_reaches_dimension_zero() {
        let pts = vec![vec![3, 2]; 40];
        let s = ds(2, 4, pts);
        let config = BudgetSplit::default_for(4.0, 0.0, 2, Mode::Exact);
        let engine = Engine::new();
        let mut rng = stream_rng(7, 0);
        let mut hits = 0;
        for _ in 0..20 {
            let out = dp_convex_hull_point(&s, &config, &engine, &mut rng).unwrap();
            if let Some(p) = out.point {
                assert_eq!(p, s.point(0));
                hits += 1;
            }
        }
        assert!(hits >= 15, "only {hits}/20 runs returned the point");
    }

    #[test]
    fn run_generic_dataset_stays_in_hull_mostly() {
        let mut rng_data = stream_rng(3, 99);
        use rand::Rng;
        let pts: Vec<Vec<i64>> = (0..96)
            .map(|_| vec![rng_data.gen_range(2..=14), rng_data.gen_range(2..=14)])
            .collect();
        let s = ds(2, 16, pts);
        let config = BudgetSplit::default_for(2.0, 0.0, 2, Mode::Exact);
        let engine = Engine::new();
        let mut rng = stream_rng(4, 0);
        let mut inside = 0;
        let mut failures = 0;
        let trials = 40;
        for _ in 0..trials {
            let out = dp_convex_hull_point(&s, &config, &engine, &mut rng).unwrap();
            match out.point {
                Some(p) => {
                    if tukey_depth(&p, &s) >= 1 {
                        inside += 1;
                    }
                }
                None => failures += 1,
            }
        }
        assert!(failures <= 3, "failures {failures}/{trials}");
        assert!(inside >= trials - 4, "inside {inside}/{trials}");
    }

    #[test]
    fn run_collinear_recurses_to_line() {
        let pts: Vec<Vec<i64>> = (0..96).map(|i| vec![i % 17, i % 17]).collect();
        let s = ds(2, 16, pts);
        let config = BudgetSplit::default_for(2.0, 0.0, 2, Mode::Exact);
        let engine = Engine::new();
        let mut rng = stream_rng(8, 0);
        let mut on_line = 0;
        let mut failures = 0;
        let trials = 30;
        for _ in 0..trials {
            let out = dp_convex_hull_point(&s, &config, &engine, &mut rng).unwrap();
            if out.transcript.failure {
                failures += 1;
                continue;
            }
            let p = out.point.unwrap();
            if p.coords[0] == p.coords[1] {
                on_line += 1;
            }
        }
        assert!(failures <= 4, "failures {failures}/{trials}");
        assert!(on_line >= trials - failures - 2, "on line: {on_line}");
    }

    #[test]
    fn transcript_deterministic() {
        let pts: Vec<Vec<i64>> = (0..32).map(|i| vec![(i * 3) % 9, (i * 5) % 9]).collect();
        let s = ds(2, 8, pts);
        let config = BudgetSplit::default_for(1.0, 0.0, 2, Mode::Exact);
        let engine = Engine::new();
        let run = |seed| {
            let mut rng = stream_rng(seed, 0);
            let out = dp_convex_hull_point(&s, &config, &engine, &mut rng).unwrap();
            serde_json::to_string(&out.transcript).unwrap()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }
}
