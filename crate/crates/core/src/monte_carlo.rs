//! Seeded multi-trial runs and per-slot aggregation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::params::SystemParams;
use crate::sim::{run_with_rng, trial_rng, ScenarioConfig, Scheme, SlotRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotStats {
    pub slot: usize,
    pub mean_weighted_actual: f64,
    pub std_weighted_actual: f64,
    pub mean_rate: f64,
    pub std_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub scheme: Scheme,
    pub n_trials: usize,
    pub per_slot: Vec<SlotStats>,
}

impl MonteCarloSummary {
    /// Mean of the per-slot mean weighted actual PCRB over slots after `after`.
    pub fn steady_state_weighted(&self, after: usize) -> f64 {
        let tail: Vec<f64> = self
            .per_slot
            .iter()
            .filter(|s| s.slot > after)
            .map(|s| s.mean_weighted_actual)
            .collect();
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

/// Trial `trial` of the scenario; trial 0 equals `run_scenario`.
pub fn run_trial(cfg: &ScenarioConfig, p: &SystemParams, trial: u64) -> Result<Vec<SlotRecord>> {
    run_with_rng(cfg, p, &mut trial_rng(cfg.seed, trial))
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Reduces trial outputs into per-slot statistics. Trials are ordered by
/// index first, so the result does not depend on the order they arrive in.
pub fn aggregate(scheme: Scheme, mut trials: Vec<(u64, Vec<SlotRecord>)>) -> MonteCarloSummary {
    trials.sort_by_key(|(i, _)| *i);
    let n_slots = trials.iter().map(|(_, r)| r.len()).min().unwrap_or(0);
    let per_slot = (0..n_slots)
        .map(|k| {
            let w = trials.iter().map(move |(_, r)| r[k].pcrb_actual.weighted);
            let rate = trials.iter().map(move |(_, r)| r[k].rate);
            let (mean_weighted_actual, std_weighted_actual) = mean_std(w);
            let (mean_rate, std_rate) = mean_std(rate);
            SlotStats {
                slot: trials[0].1[k].slot,
                mean_weighted_actual,
                std_weighted_actual,
                mean_rate,
                std_rate,
            }
        })
        .collect();
    MonteCarloSummary {
        scheme,
        n_trials: trials.len(),
        per_slot,
    }
}

/// Runs `n_trials` trials of `cfg` in parallel.
pub fn run_monte_carlo(
    cfg: &ScenarioConfig,
    p: &SystemParams,
    n_trials: usize,
) -> Result<MonteCarloSummary> {
    let trials = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| run_trial(cfg, p, t).map(|r| (t, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(cfg.scheme, trials))
}

/// Both schemes over the same trial streams.
pub fn compare_schemes(
    cfg: &ScenarioConfig,
    p: &SystemParams,
    n_trials: usize,
) -> Result<(MonteCarloSummary, MonteCarloSummary)> {
    Ok((
        run_monte_carlo(&cfg.with_scheme(Scheme::Proposed), p, n_trials)?,
        run_monte_carlo(&cfg.with_scheme(Scheme::RightAbove), p, n_trials)?,
    ))
}
