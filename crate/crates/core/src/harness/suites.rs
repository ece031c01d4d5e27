//! Randomized property suites: definiteness and the κ-GH sandwich.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;

use super::random::{
    big_bang_space, future_developed_lattice, future_developed_space, inflated, random_box_space, relabeled, time_flipped,
    Lattice,
};
use super::{default_seed, fixtures, trial_seed, Case, ExperimentReport, Expected, Source};
use crate::distances::{bb_gh, fd_hh, gh, kappa_gh, level_sup_gh, tau_h, timeless_sgh, LevelBins, SearchOptions};
use crate::error::{Error, Result};
use crate::isometry::{find_flagged_time_isometry, find_time_isometry};
use crate::space::TimedMetricSpace;

/// Distances at or below this count as zero.
pub const ZERO_TOL: f64 = 1e-9;
const LATTICE_SIDE: i64 = 3;

fn hundred() -> usize {
    100
}

fn fifty() -> usize {
    50
}

fn five() -> usize {
    5
}

fn four() -> usize {
    4
}

fn delta() -> f64 {
    0.1
}

fn sandwich_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessConfig {
    #[serde(default = "hundred")]
    pub trials: usize,
    #[serde(default = "five")]
    pub n_max: usize,
    /// Trials for each of the basepoint and initial-set checks.
    #[serde(default = "fifty")]
    pub flagged_trials: usize,
    /// Inflation applied to one distance of the perturbed copies.
    #[serde(default = "delta")]
    pub delta: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for DefinitenessConfig {
    fn default() -> Self {
        Self { trials: 100, n_max: 5, flagged_trials: 50, delta: 0.1, seed: default_seed(), output: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    #[serde(default = "fifty")]
    pub trials: usize,
    #[serde(default = "four")]
    pub n_max: usize,
    #[serde(default = "sandwich_tol")]
    pub tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        Self { trials: 50, n_max: 4, tol: 1e-9, seed: default_seed(), output: None }
    }
}

fn exact_opts(n_max: usize) -> SearchOptions {
    SearchOptions::default().with_exact_max_n(n_max.max(crate::distances::DEFAULT_EXACT_MAX_N))
}

/// How the second space of a trial relates to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Relabeled,
    Reflected,
    TimeFlipped,
    Scaled,
    Independent,
}

fn space_json(s: &TimedMetricSpace) -> serde_json::Value {
    serde_json::to_value(s.to_json()).expect("tms json serializes")
}

fn tau_h_trial(seed: u64, trial: usize, n_max: usize, delta: f64) -> Result<Vec<Case>> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
    let n = rng.gen_range(1..=n_max);
    let lattice = Lattice::random(&mut rng, n, LATTICE_SIDE);
    let x = lattice.space(0.0, 1.0);
    let variant = [Variant::Relabeled, Variant::Reflected, Variant::TimeFlipped, Variant::Independent][trial % 4];
    let y = match variant {
        Variant::Relabeled => relabeled(&x, &mut rng),
        Variant::Reflected => relabeled(&lattice.reflected().space(0.0, 1.0), &mut rng),
        Variant::TimeFlipped => relabeled(&time_flipped(&x), &mut rng),
        _ => Lattice::random(&mut rng, n, LATTICE_SIDE).space(0.0, 1.0),
    };
    let opts = exact_opts(n_max);
    let b = tau_h(&x, &y, &opts)?;
    let iso = find_time_isometry(&x, &y, ZERO_TOL)?.is_some();
    let zero = b.upper <= ZERO_TOL;
    let inputs = json!({ "trial": trial, "n": n, "variant": variant, "x": space_json(&x), "y": space_json(&y) });
    let mut cases = vec![Case::check(
        format!("tau_h zero iff isometry #{trial}"),
        inputs,
        json!({ "bound": b, "isometry": iso }),
        b.is_exact() && zero == iso,
    )];
    if n >= 2 {
        let (p, changed) = inflated(&x, delta)?;
        let b = tau_h(&x, &p, &opts)?;
        cases.push(Case::check(
            format!("tau_h perturbed copy positive #{trial}"),
            json!({ "trial": trial, "delta": delta, "changed": changed }),
            json!(b),
            b.lower > 0.0,
        ));
    }
    Ok(cases)
}

fn bb_trial(seed: u64, trial: usize, n_max: usize) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed ^ 0xBB, trial));
    let n = rng.gen_range(1..n_max);
    let lattice = Lattice::random(&mut rng, n, LATTICE_SIDE);
    let x = big_bang_space(&lattice, 1.0)?;
    let variant = [Variant::Relabeled, Variant::Reflected, Variant::Scaled, Variant::Independent][trial % 4];
    let y = match variant {
        Variant::Relabeled => relabeled(&x, &mut rng),
        Variant::Reflected => relabeled(&big_bang_space(&lattice.reflected(), 1.0)?, &mut rng),
        Variant::Scaled => big_bang_space(&lattice, 1.5)?,
        _ => big_bang_space(&Lattice::random(&mut rng, n, LATTICE_SIDE), 1.0)?,
    };
    let b = bb_gh(&x, &y, &exact_opts(n_max), ZERO_TOL)?;
    let iso = find_flagged_time_isometry(&x, &y, ZERO_TOL)?.is_some();
    Ok(Case::check(
        format!("bb_gh zero iff flagged isometry #{trial}"),
        json!({ "trial": trial, "variant": variant, "x": space_json(&x), "y": space_json(&y) }),
        json!({ "bound": b, "isometry": iso }),
        (b.upper <= ZERO_TOL) == iso && b.lower <= b.upper,
    ))
}

fn fd_lattice(rng: &mut ChaCha8Rng, n_max: usize) -> Lattice {
    loop {
        let n = rng.gen_range(1..=n_max);
        if let Some(l) = future_developed_lattice(rng, n, n_max, LATTICE_SIDE) {
            return l;
        }
    }
}

fn fd_trial(seed: u64, trial: usize, n_max: usize) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed ^ 0xFD, trial));
    let lattice = fd_lattice(&mut rng, n_max);
    let x = future_developed_space(&lattice)?;
    let variant = [Variant::Relabeled, Variant::Reflected, Variant::Independent][trial % 3];
    let y = match variant {
        Variant::Relabeled => relabeled(&x, &mut rng),
        Variant::Reflected => relabeled(&future_developed_space(&lattice.reflected())?, &mut rng),
        _ => future_developed_space(&fd_lattice(&mut rng, n_max))?,
    };
    let b = fd_hh(&x, &y, &exact_opts(n_max), ZERO_TOL)?;
    let iso = find_flagged_time_isometry(&x, &y, ZERO_TOL)?.is_some();
    Ok(Case::check(
        format!("fd_hh zero iff flagged isometry #{trial}"),
        json!({ "trial": trial, "variant": variant, "x": space_json(&x), "y": space_json(&y) }),
        json!({ "bound": b, "isometry": iso }),
        (b.upper <= ZERO_TOL) == iso && b.lower <= b.upper,
    ))
}

/// Checks on the shipped counterexample pairs.
pub fn fixture_cases() -> Result<Vec<Case>> {
    let opts = SearchOptions::default();
    let mut cases = Vec::new();
    let t = fixtures::load("t_to_x").expect("shipped");
    let tl = timeless_sgh(&t.x, &t.y, &opts)?;
    let th = tau_h(&t.x, &t.y, &opts)?;
    cases.push(Case::value("t_to_x timeless upper", json!("t_to_x"), tl.upper, Expected::abs(0.0, 0.0, Source::Derived)));
    cases.push(Case::value("t_to_x tau_h lower", json!("t_to_x"), th.lower, Expected::abs(1.0, 0.0, Source::Derived)));
    cases.push(Case::value("t_to_x tau_h upper", json!("t_to_x"), th.upper, Expected::abs(1.0, 0.0, Source::Derived)));

    let f = fixtures::load("flip_t").expect("shipped");
    let tl = timeless_sgh(&f.x, &f.y, &opts)?;
    let th = tau_h(&f.x, &f.y, &opts)?;
    cases.push(Case::value("flip_t timeless upper", json!("flip_t"), tl.upper, Expected::abs(0.0, 0.0, Source::Trivial)));
    cases.push(Case::check("flip_t tau_h positive", json!("flip_t"), json!(th), th.lower > 0.0));

    let l = fixtures::load("levels_match").expect("shipped");
    let bins = LevelBins::levels(&l.x, &l.y, ZERO_TOL)?;
    let lv = level_sup_gh(&l.x, &l.y, &bins, &opts)?;
    let iso = find_time_isometry(&l.x, &l.y, ZERO_TOL)?;
    cases.push(Case::value("levels_match level_sup upper", json!("levels_match"), lv.upper, Expected::abs(0.0, 0.0, Source::Derived)));
    cases.push(Case::check("levels_match has no time isometry", json!("levels_match"), json!(iso), iso.is_none()));
    Ok(cases)
}

pub fn run_definiteness_suite(cfg: &DefinitenessConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.n_max == 0 || cfg.n_max > 5 {
        return Err(Error::Argument(format!("n_max {} must be in 1..=5", cfg.n_max)));
    }
    let mut report = ExperimentReport::new("definiteness", cfg.seed);
    let tau: Vec<Vec<Case>> =
        (0..cfg.trials).into_par_iter().map(|k| tau_h_trial(cfg.seed, k, cfg.n_max, cfg.delta)).collect::<Result<_>>()?;
    report.cases.extend(tau.into_iter().flatten());
    if cfg.n_max >= 2 {
        let bb: Vec<Case> =
            (0..cfg.flagged_trials).into_par_iter().map(|k| bb_trial(cfg.seed, k, cfg.n_max)).collect::<Result<_>>()?;
        report.cases.extend(bb);
    }
    let fd: Vec<Case> =
        (0..cfg.flagged_trials).into_par_iter().map(|k| fd_trial(cfg.seed, k, cfg.n_max)).collect::<Result<_>>()?;
    report.cases.extend(fd);
    report.cases.extend(fixture_cases()?);
    Ok(report.finish(started))
}

/// `gh <= kappa_gh <= 2 gh` with both sides exact.
pub fn sandwich_case(name: String, x: &TimedMetricSpace, y: &TimedMetricSpace, tol: f64) -> Result<Case> {
    let opts = exact_opts(x.len().max(y.len()));
    let g = gh(x, y, &opts)?;
    let k = kappa_gh(x, y, &opts)?;
    let pass = g.is_exact() && k.is_exact() && g.upper <= k.upper + tol && k.upper <= 2.0 * g.upper + tol;
    Ok(Case::check(
        name,
        json!({ "x": space_json(x), "y": space_json(y) }),
        json!({ "gh": g.upper, "kappa_gh": k.upper }),
        pass,
    ))
}

pub fn run_sandwich_suite(cfg: &SandwichConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    if cfg.n_max == 0 || cfg.n_max > 5 {
        return Err(Error::Argument(format!("n_max {} must be in 1..=5", cfg.n_max)));
    }
    let mut report = ExperimentReport::new("sandwich", cfg.seed);
    let cases: Vec<Case> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, k));
            let (nx, ny) = (rng.gen_range(1..=cfg.n_max), rng.gen_range(1..=cfg.n_max));
            let x = random_box_space(&mut rng, nx);
            let y = random_box_space(&mut rng, ny);
            sandwich_case(format!("sandwich #{k}"), &x, &y, cfg.tol)
        })
        .collect::<Result<_>>()?;
    report.cases.extend(cases);
    let two = |d: f64| {
        TimedMetricSpace::from_fn(TimedMetricSpace::default_ids(2), vec![0.0, 1.0], |_, _| d).expect("valid pair")
    };
    report.cases.push(sandwich_case("sandwich d=1 vs d=3".into(), &two(1.0), &two(3.0), cfg.tol)?);
    report.cases.push(sandwich_case("sandwich self".into(), &two(1.0), &two(1.0), cfg.tol)?);
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_definiteness_run() {
        let cfg = DefinitenessConfig { trials: 12, flagged_trials: 8, ..Default::default() };
        let r = run_definiteness_suite(&cfg).unwrap();
        let bad: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
        assert!(r.passed(), "{bad:?}");
    }

    #[test]
    fn small_sandwich_run() {
        let r = run_sandwich_suite(&SandwichConfig { trials: 10, ..Default::default() }).unwrap();
        assert!(r.passed());
        let c = r.case("sandwich d=1 vs d=3").unwrap();
        assert_eq!(c.got["gh"], json!(1.0));
    }

    #[test]
    fn n_max_is_checked() {
        let cfg = DefinitenessConfig { n_max: 6, ..Default::default() };
        assert!(run_definiteness_suite(&cfg).is_err());
    }

    #[test]
    fn deterministic_reports() {
        let cfg = SandwichConfig { trials: 6, ..Default::default() };
        let mut a = run_sandwich_suite(&cfg).unwrap();
        let mut b = run_sandwich_suite(&cfg).unwrap();
        a.runtime_s = 0.0;
        b.runtime_s = 0.0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
