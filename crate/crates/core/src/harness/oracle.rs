//! Discrete null distance and cosmological time against continuum oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

use super::{default_seed, Case, ExperimentReport, Expected, SeriesRow, Source};
use crate::discretize::{
    cell_diameter, cosmological_time, null_distance_between, sample_graph, CausalGraph, GridSpec, DEFAULT_WINDOW_CELLS,
};
use crate::error::{Error, Result};
use crate::models::{ModelJson, ModelPoint, SpacetimeModel};

fn default_pairs() -> usize {
    200
}

fn default_cells() -> f64 {
    DEFAULT_WINDOW_CELLS
}

fn yes() -> bool {
    true
}

/// Slack for "non-increasing" comparisons of errors that may sit at
/// rounding level.
pub const LADDER_SLACK: f64 = 1e-12;

/// A single null distance on its own grid, compared with a target value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueCheck {
    pub name: String,
    pub grid: (usize, usize),
    /// Sampled time range; the whole model window if absent.
    #[serde(default)]
    pub t_range: Option<(f64, f64)>,
    /// Model coordinates `[t, x...]` of the endpoints; the nearest nodes are used.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Chains restricted to `s <= τ <= t` when present.
    #[serde(default)]
    pub strip: Option<(f64, f64)>,
    pub expected: f64,
    pub rel_tol: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub model: ModelJson,
    /// Strictly increasing `(nt, nx)` resolutions.
    #[serde(default)]
    pub ladder: Vec<(usize, usize)>,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_cells")]
    pub window_cells: f64,
    #[serde(default)]
    pub t_range: Option<(f64, f64)>,
    /// Threshold on the null-distance error at the finest rung.
    #[serde(default)]
    pub max_error: Option<f64>,
    #[serde(default = "yes")]
    pub tau_regression: bool,
    /// Threshold on the time error at the finest rung.
    #[serde(default)]
    pub tau_max_error: Option<f64>,
    #[serde(default)]
    pub checks: Vec<ValueCheck>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Result of one ladder rung.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RungStats {
    pub nt: usize,
    pub nx: usize,
    pub nodes: usize,
    pub window: f64,
    pub pairs: usize,
    pub max_error: f64,
    pub mean_error: f64,
    pub tau_max_error: Option<f64>,
    /// Largest `τ̂ - t`; at most rounding when time is under-approximated.
    pub tau_max_excess: Option<f64>,
}

fn spec_for(nt: usize, nx: usize, t_range: Option<(f64, f64)>) -> GridSpec {
    let spec = GridSpec::new(nt, nx);
    match t_range {
        Some((lo, hi)) => spec.with_t_range(lo, hi),
        None => spec,
    }
}

fn graph(model: &SpacetimeModel, spec: &GridSpec, cells: f64) -> Result<CausalGraph> {
    let r = cells * cell_diameter(model, spec)?;
    sample_graph(model, spec, Some(r))
}

/// Null-distance error over `pairs` seeded random node pairs that have an
/// oracle value.
pub fn null_distance_errors(g: &CausalGraph, pairs: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<(usize, usize)> = (0..pairs).map(|_| (rng.gen_range(0..g.len()), rng.gen_range(0..g.len()))).collect();
    let model = g.model();
    let errors: Vec<Option<f64>> = picks
        .par_iter()
        .map(|&(a, b)| -> Result<Option<f64>> {
            let Some(exact) = model.null_dist_oracle(g.node(a), g.node(b))? else {
                return Ok(None);
            };
            let d = null_distance_between(g, a, b, None)?;
            Ok(Some((d - exact).abs()))
        })
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = errors.into_iter().flatten().collect();
    if errors.is_empty() {
        return Err(Error::Precondition("model has no null-distance oracle for the sampled pairs".into()));
    }
    Ok(errors)
}

/// `(max |τ̂ - t|, max (τ̂ - t))` over all nodes.
pub fn tau_errors(g: &CausalGraph) -> Result<(f64, f64)> {
    let cosmo = cosmological_time(g)?;
    let model = g.model();
    let mut worst: f64 = 0.0;
    let mut excess = f64::NEG_INFINITY;
    for (i, &v) in cosmo.values.iter().enumerate() {
        let t = model.eval_tau(g.node(i))?;
        worst = worst.max((v - t).abs());
        excess = excess.max(v - t);
    }
    Ok((worst, excess))
}

pub fn rung(model: &SpacetimeModel, nt: usize, nx: usize, cfg: &OracleConfig) -> Result<RungStats> {
    let spec = spec_for(nt, nx, cfg.t_range);
    let g = graph(model, &spec, cfg.window_cells)?;
    let errors = null_distance_errors(&g, cfg.pairs, cfg.seed)?;
    let (tau_max_error, tau_max_excess) = if cfg.tau_regression {
        let (w, e) = tau_errors(&g)?;
        (Some(w), Some(e))
    } else {
        (None, None)
    };
    Ok(RungStats {
        nt,
        nx,
        nodes: g.len(),
        window: g.window_radius(),
        pairs: errors.len(),
        max_error: errors.iter().copied().fold(0.0, f64::max),
        mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
        tau_max_error,
        tau_max_excess,
    })
}

/// Discrete value of a [`ValueCheck`].
pub fn check_value(model: &SpacetimeModel, check: &ValueCheck, cells: f64) -> Result<f64> {
    let spec = spec_for(check.grid.0, check.grid.1, check.t_range);
    let g = graph(model, &spec, cells)?;
    let point = |c: &[f64]| {
        if c.is_empty() {
            return Err(Error::Argument(format!("check {:?}: empty coordinates", check.name)));
        }
        Ok(ModelPoint::new(c[0], c[1..].to_vec()))
    };
    let a = g.nearest(&point(&check.a)?);
    let b = g.nearest(&point(&check.b)?);
    null_distance_between(&g, a, b, check.strip)
}

fn check_ladder(ladder: &[(usize, usize)]) -> Result<()> {
    if ladder.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
        return Err(Error::Argument("resolution ladder must be strictly increasing".into()));
    }
    Ok(())
}

pub fn run_oracle_regression(cfg: &OracleConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    check_ladder(&cfg.ladder)?;
    let model = SpacetimeModel::from_json(cfg.model.clone())?;
    let mut report = ExperimentReport::new("oracle_regression", cfg.seed);
    let stats = cfg
        .ladder
        .iter()
        .map(|&(nt, nx)| rung(&model, nt, nx, cfg))
        .collect::<Result<Vec<_>>>()?;
    for s in &stats {
        let inputs = json!({ "nt": s.nt, "nx": s.nx });
        report.cases.push(Case::check(format!("rung {}x{}", s.nt, s.nx), inputs.clone(), json!(s), true));
        if let Some(excess) = s.tau_max_excess {
            report.cases.push(Case::check(
                format!("time under-approximated {}x{}", s.nt, s.nx),
                inputs,
                json!(excess),
                excess <= 1e-9,
            ));
        }
        report.series.push(SeriesRow { param: s.nt as f64, lower: 0.0, upper: s.max_error, floor: 0.0 });
    }
    let monotone = |f: &dyn Fn(&RungStats) -> f64| stats.windows(2).all(|w| f(&w[1]) <= f(&w[0]) + LADDER_SLACK);
    if stats.len() > 1 {
        let errs: Vec<f64> = stats.iter().map(|s| s.max_error).collect();
        report.cases.push(Case::check(
            "null distance error non-increasing",
            json!(cfg.ladder),
            json!(errs),
            monotone(&|s| s.max_error),
        ));
        if cfg.tau_regression {
            let errs: Vec<f64> = stats.iter().filter_map(|s| s.tau_max_error).collect();
            report.cases.push(Case::check(
                "time error non-increasing",
                json!(cfg.ladder),
                json!(errs),
                monotone(&|s| s.tau_max_error.unwrap_or(0.0)),
            ));
        }
    }
    if let Some(last) = stats.last() {
        let inputs = json!({ "nt": last.nt, "nx": last.nx });
        if let Some(t) = cfg.max_error {
            report.cases.push(Case::value(
                "finest null distance error",
                inputs.clone(),
                last.max_error,
                Expected::abs(0.0, t, Source::ClosedForm),
            ));
        }
        if let (Some(t), Some(e)) = (cfg.tau_max_error, last.tau_max_error) {
            report.cases.push(Case::value("finest time error", inputs, e, Expected::abs(0.0, t, Source::ClosedForm)));
        }
    }
    for check in &cfg.checks {
        let got = check_value(&model, check, cfg.window_cells)?;
        report.cases.push(Case::value(
            check.name.clone(),
            json!(check),
            got,
            Expected::rel(check.expected, check.rel_tol, check.source),
        ));
    }
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Spatial, Warp};
    use std::f64::consts::TAU;

    fn cfg(ladder: Vec<(usize, usize)>) -> OracleConfig {
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0)).unwrap();
        OracleConfig {
            model: m.to_json(),
            ladder,
            pairs: 40,
            window_cells: DEFAULT_WINDOW_CELLS,
            t_range: None,
            max_error: None,
            tau_regression: true,
            tau_max_error: Some(0.05),
            checks: Vec::new(),
            seed: 1,
            output: None,
        }
    }

    #[test]
    fn small_ladder_runs() {
        let r = run_oracle_regression(&cfg(vec![(8, 8), (16, 16)])).unwrap();
        assert!(r.case("time error non-increasing").unwrap().pass);
        assert!(r.case("finest time error").unwrap().pass);
        assert_eq!(r.series.len(), 2);
    }

    #[test]
    fn ladder_must_increase() {
        assert!(run_oracle_regression(&cfg(vec![(16, 16), (8, 8)])).is_err());
        assert!(run_oracle_regression(&cfg(vec![(16, 16), (16, 32)])).is_err());
    }

    #[test]
    fn no_oracle_pairs_is_an_error() {
        let mut c = cfg(vec![(8, 8)]);
        c.pairs = 0;
        assert!(matches!(run_oracle_regression(&c), Err(Error::Precondition(_))));
    }
}
