//! Bayesian search over the class weight and decision threshold so that the
//! number of predicted adopters matches a known total.

pub mod gp;

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::boost::loss::WeightedLogLoss;
use crate::boost::tree::{train_gbt, GbtModel, GbtParams};
use crate::data::{create, AdopterTarget, DataError, HouseholdTable};
use crate::error::{Error, Result};
use crate::preprocess::LabeledDataset;
use crate::rng::{stream, Purpose};

pub use gp::{expected_improvement, gp_fit, gp_predict, GpKernel, GpModel};

/// Number of class-weight grid values: `0.00, 0.01, ..., 2.00`.
pub const BETA_STEPS: usize = 201;
/// Number of threshold grid values: `0.05, 0.06, ..., 0.95`.
pub const TAU_STEPS: usize = 91;
/// Converged once the adopter-count error is within this fraction of the target.
pub const TOLERANCE: f64 = 0.15;

pub fn beta_at(i: usize) -> f64 {
    i as f64 / 100.0
}

pub fn tau_at(j: usize) -> f64 {
    (5 + j) as f64 / 100.0
}

/// Full candidate grid in beta-major order.
pub fn grid() -> Vec<(usize, usize)> {
    (0..BETA_STEPS)
        .flat_map(|i| (0..TAU_STEPS).map(move |j| (i, j)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct CalibrateConfig {
    pub budget: usize,
    pub init: usize,
    pub seed: u64,
    pub gbt: GbtParams,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        CalibrateConfig {
            budget: 2000,
            init: 10,
            seed: 42,
            gbt: GbtParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub round: usize,
    pub beta: f64,
    pub tau: f64,
    pub predicted: u64,
    pub target: u64,
    pub diff: f64,
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub beta_star: f64,
    pub tau_star: f64,
    pub discrepancy: f64,
    pub trace: Vec<TraceRow>,
    pub rounds_used: usize,
    pub converged: bool,
    /// Model trained at `beta_star`.
    pub model: GbtModel<f64>,
}

impl CalibrationResult {
    /// Best discrepancy seen up to and including each round.
    pub fn incumbent_trace(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|r| {
                best = best.min(r.diff);
                best
            })
            .collect()
    }
}

struct Search {
    evaluated: Vec<bool>,
    points: Vec<[f64; 2]>,
    values: Vec<f64>,
    trace: Vec<TraceRow>,
    best: Option<(usize, f64)>,
}

impl Search {
    /// Evaluates grid point `g` and returns its discrepancy.
    fn record(&mut self, g: usize, (bi, tj): (usize, usize), eval: &mut Evaluator, target: u64) -> Result<f64> {
        let predicted = eval.predicted(bi, tj)?;
        let diff = (target as f64 - predicted as f64).abs();
        self.evaluated[g] = true;
        self.points.push([beta_at(bi), tau_at(tj)]);
        self.values.push(diff);
        self.trace.push(TraceRow {
            round: self.trace.len() + 1,
            beta: beta_at(bi),
            tau: tau_at(tj),
            predicted,
            target,
            diff,
        });
        if self.best.is_none_or(|(_, d)| diff < d) {
            self.best = Some((g, diff));
        }
        log::debug!(
            "round {} beta {:.2} tau {:.2} predicted {predicted} diff {diff}",
            self.trace.len(),
            beta_at(bi),
            tau_at(tj)
        );
        Ok(diff)
    }
}

/// Trains one model per class weight and counts predictions above a threshold.
struct Evaluator<'a> {
    train: &'a LabeledDataset,
    apply: Vec<Vec<u8>>,
    params: GbtParams,
    /// Per beta index: the model and its sorted apply-set probabilities.
    cache: HashMap<usize, (GbtModel<f64>, Vec<f64>)>,
}

impl Evaluator<'_> {
    fn predicted(&mut self, bi: usize, tj: usize) -> Result<u64> {
        let (beta, tau) = (beta_at(bi), tau_at(tj));
        if !self.cache.contains_key(&bi) {
            let wrap = |e| Error::Calibration {
                beta,
                tau,
                source: Box::new(e),
            };
            let model = train_gbt(self.train, &self.params, &WeightedLogLoss { beta }).map_err(wrap)?;
            let mut probs = model.predict_all(&self.apply).map_err(wrap)?;
            probs.sort_by(f64::total_cmp);
            self.cache.insert(bi, (model, probs));
        }
        let probs = &self.cache[&bi].1;
        Ok((probs.len() - probs.partition_point(|&p| p < tau)) as u64)
    }
}

/// Households of the target's state as feature rows.
pub fn apply_rows(apply: &HouseholdTable, state: &str) -> Vec<Vec<u8>> {
    apply
        .iter()
        .filter(|h| h.state == state)
        .map(|h| h.features.to_vec())
        .collect()
}

pub fn calibrate(
    train: &LabeledDataset,
    apply: &HouseholdTable,
    target: &AdopterTarget,
    cfg: &CalibrateConfig,
) -> Result<CalibrationResult> {
    let rows = apply_rows(apply, &target.state);
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("no households in state {}", target.state)));
    }
    if target.count as usize > rows.len() {
        return Err(Error::InvalidInput(format!(
            "target {} exceeds the {} households of {}",
            target.count,
            rows.len(),
            target.state
        )));
    }
    if cfg.init == 0 || cfg.budget < cfg.init {
        return Err(Error::Config(format!(
            "need budget >= init >= 1, got budget {} init {}",
            cfg.budget, cfg.init
        )));
    }
    cfg.gbt.validate()?;

    let grid = grid();
    let mut eval = Evaluator {
        train,
        apply: rows,
        params: cfg.gbt,
        cache: HashMap::new(),
    };
    let goal = target.count as f64;
    let band = TOLERANCE * goal;
    let mut search = Search {
        evaluated: vec![false; grid.len()],
        points: Vec::new(),
        values: Vec::new(),
        trace: Vec::new(),
        best: None,
    };

    let mut rng = stream(cfg.seed, Purpose::Calibration, 0);
    let init = cfg.init.min(grid.len());
    let mut done = false;
    for g in sample(&mut rng, grid.len(), init).into_vec() {
        if search.record(g, grid[g], &mut eval, target.count)? <= band {
            done = true;
            break;
        }
    }
    let scale = [beta_at(BETA_STEPS), tau_at(TAU_STEPS - 1) - tau_at(0)];
    while !done && search.trace.len() < cfg.budget && search.trace.len() < grid.len() {
        let values = &search.values;
        let n = values.len() as f64;
        let m = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
        let signal_var = if var > 0.0 { var } else { 1.0 };
        let kernel = GpKernel {
            signal_var,
            length_scales: [0.25 * scale[0], 0.25 * scale[1]],
            noise_var: 1e-6 * signal_var,
        };
        let gp = gp_fit(&search.points, values, kernel)?;
        let f_min = search.best.map_or(f64::INFINITY, |b| b.1);
        let evaluated = &search.evaluated;
        let ei: Vec<f64> = grid
            .par_iter()
            .enumerate()
            .map(|(g, &(bi, tj))| {
                if evaluated[g] {
                    f64::NEG_INFINITY
                } else {
                    let (mu, sd) = gp_predict(&gp, &[beta_at(bi), tau_at(tj)]);
                    expected_improvement(mu, sd, f_min)
                }
            })
            .collect();
        let mut pick = None;
        for (g, &v) in ei.iter().enumerate() {
            if !evaluated[g] && pick.is_none_or(|p: usize| v > ei[p]) {
                pick = Some(g);
            }
        }
        let Some(g) = pick else { break };
        done = search.record(g, grid[g], &mut eval, target.count)? <= band;
    }

    let Search { trace, best, .. } = search;
    let (g, discrepancy) = best.ok_or_else(|| Error::Numerical("no calibration rounds ran".into()))?;
    let (bi, tj) = grid[g];
    let model = eval.cache.remove(&bi).map(|c| c.0).expect("incumbent model is cached");
    Ok(CalibrationResult {
        beta_star: beta_at(bi),
        tau_star: tau_at(tj),
        discrepancy,
        rounds_used: trace.len(),
        converged: discrepancy <= band,
        trace,
        model,
    })
}

pub fn write_trace<W: Write>(trace: &[TraceRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["round", "beta", "tau", "predicted", "target", "diff"])
        .map_err(DataError::from)?;
    for r in trace {
        out.write_record([
            r.round.to_string(),
            format!("{:.2}", r.beta),
            format!("{:.2}", r.tau),
            r.predicted.to_string(),
            r.target.to_string(),
            r.diff.to_string(),
        ])
        .map_err(DataError::from)?;
    }
    out.flush().map_err(|e| DataError::from(csv::Error::from(e)))?;
    Ok(())
}

pub fn save_trace(trace: &[TraceRow], path: &Path) -> Result<()> {
    write_trace(trace, create(path)?)
}
