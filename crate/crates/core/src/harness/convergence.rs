//! Convergence of a warped family towards its limit, measured in τ-H.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::Instant;

use super::{default_seed, trial_seed, Case, ExperimentReport, SeriesRow, CONJECTURE_PROBE};
use crate::discretize::{cell_diameter, null_distance_matrix, sample_graph, GridSpec, DEFAULT_WINDOW_CELLS};
use crate::distances::{level_sup_gh, tau_h, timeless_sgh, LevelBins, SearchOptions};
use crate::error::{Error, Result};
use crate::models::{SpacetimeModel, Spatial, Warp};
use crate::space::TimedMetricSpace;

fn small_circle() -> Spatial {
    Spatial::Circle { circumference: 1.0 }
}

fn half_window() -> (f64, f64) {
    (0.0, 0.5)
}

fn grid48() -> (usize, usize) {
    (48, 48)
}

fn eight() -> usize {
    8
}

fn two_pi() -> f64 {
    TAU
}

fn quarter() -> f64 {
    0.25
}

fn cells() -> f64 {
    DEFAULT_WINDOW_CELLS
}

fn yes() -> bool {
    true
}

fn probe_budget() -> u64 {
    200
}

/// Family `f_j(t) = 1 + sin(ω t) / j`, `j = 1..=members`, against `f = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    #[serde(default = "small_circle")]
    pub spatial: Spatial,
    #[serde(default = "half_window")]
    pub window: (f64, f64),
    #[serde(default = "grid48")]
    pub grid: (usize, usize),
    #[serde(default = "eight")]
    pub members: usize,
    #[serde(default = "two_pi")]
    pub omega: f64,
    /// Jitter, as a fraction of a cell, of every sampling.
    #[serde(default = "quarter")]
    pub jitter: f64,
    #[serde(default = "cells")]
    pub window_cells: f64,
    /// Also record level and timeless distances (reported, not asserted).
    #[serde(default = "yes")]
    pub probe: bool,
    #[serde(default = "probe_budget")]
    pub probe_budget: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            spatial: small_circle(),
            window: half_window(),
            grid: grid48(),
            members: 8,
            omega: TAU,
            jitter: 0.25,
            window_cells: DEFAULT_WINDOW_CELLS,
            probe: true,
            probe_budget: 200,
            seed: default_seed(),
            output: None,
        }
    }
}

impl ConvergenceConfig {
    fn sample(&self, warp: Warp, seed: u64) -> Result<TimedMetricSpace> {
        let model = SpacetimeModel::warped(self.spatial.clone(), warp, self.window)?;
        let spec = GridSpec::new(self.grid.0, self.grid.1).with_jitter(self.jitter, seed);
        let r = self.window_cells * cell_diameter(&model, &spec)?;
        null_distance_matrix(&sample_graph(&model, &spec, Some(r))?)
    }

    fn member(&self, j: usize) -> Warp {
        Warp::Sinusoidal { a: 1.0 / j as f64, omega: self.omega }
    }
}

fn probe_cases(cfg: &ConvergenceConfig, j: usize, s: &TimedMetricSpace, limit: &TimedMetricSpace) -> Result<Vec<Case>> {
    let opts = SearchOptions::default().with_budget(cfg.probe_budget);
    let bins = LevelBins::covering(s, limit, (cfg.grid.0 / 4).max(1))?;
    let level = level_sup_gh(s, limit, &bins, &opts)?;
    let timeless = timeless_sgh(s, limit, &opts)?;
    Ok(vec![
        Case::check(format!("level_sup j={j}"), json!({ "j": j }), json!(level), true),
        Case::check(format!("timeless j={j}"), json!({ "j": j }), json!(timeless), true),
    ])
}

pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.members == 0 {
        return Err(Error::Argument("convergence needs at least one member".into()));
    }
    let opts = SearchOptions::default();
    let limit_warp = Warp::Const { c: 1.0 };
    let limit = cfg.sample(limit_warp, trial_seed(cfg.seed, 0))?;
    let floor = tau_h(&cfg.sample(limit_warp, trial_seed(cfg.seed, 1_000))?, &limit, &opts)?.upper;
    let mut report = ExperimentReport::new("convergence", cfg.seed);
    let mut uppers = Vec::new();
    for j in 1..=cfg.members {
        let s = cfg.sample(cfg.member(j), trial_seed(cfg.seed, j))?;
        let b = tau_h(&s, &limit, &opts)?;
        report.series.push(SeriesRow { param: j as f64, lower: b.lower, upper: b.upper, floor });
        report.cases.push(Case::check(format!("tau_h j={j}"), json!({ "j": j, "a": 1.0 / j as f64 }), json!(b), true));
        uppers.push(b.upper);
        if cfg.probe {
            report.probes.extend(probe_cases(cfg, j, &s, &limit)?);
        }
    }
    let zero = tau_h(&cfg.sample(limit_warp, trial_seed(cfg.seed, 999))?, &limit, &opts)?;
    report.cases.push(Case::check(
        "amplitude 0 member within twice the floor",
        json!({ "floor": floor }),
        json!(zero),
        zero.upper <= 2.0 * floor,
    ));
    report.cases.push(Case::check(
        "tau_h non-increasing within the floor",
        json!({ "floor": floor }),
        json!(uppers),
        uppers.windows(2).all(|w| w[1] <= w[0] + floor),
    ));
    let last = *uppers.last().expect("members >= 1");
    report.cases.push(Case::check(
        "final tau_h within twice the floor",
        json!({ "floor": floor }),
        json!(last),
        last <= 2.0 * floor,
    ));
    if cfg.probe {
        report.label = Some(CONJECTURE_PROBE.into());
    }
    Ok(report.finish(started))
}
