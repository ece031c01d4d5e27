//! Command-line front end: `model sample`, `dist`, `check`, `experiment`.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::causal::{agreement, causal_relation, check_causal_axioms};
use crate::discretize::{
    augment_big_bang, cell_diameter, cosmological_time, null_distance_matrix, sample_graph, CausalGraph, GridSpec,
    BB_GUARD_RATIO, DEFAULT_WINDOW_CELLS,
};
use crate::distances::{
    bb_gh, fd_hh, gh, kappa_gh, level_lp_gh, level_sup_gh, lp_normalized, strip_lp_gh, strip_sup_gh, tau_h,
    timeless_sgh, DistanceBound, LevelBins, SearchOptions, StripGrid, DEFAULT_BUDGET, DEFAULT_EXACT_MAX_N,
    DEFAULT_SEED,
};
use crate::error::{Error, Result};
use crate::harness::ExperimentConfig;
use crate::models::{ModelKind, Region, SpacetimeModel, Spatial, Warp};
use crate::space::{TimedMetricSpace, DISCRETE_TOL};

pub const EXIT_FLAGS: i32 = 2;
pub const EXIT_DISCONNECTED: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_PRECONDITION: i32 = 5;
pub const EXIT_VALIDATION: i32 = 6;
pub const EXIT_EXPERIMENT: i32 = 7;

#[derive(Debug, Parser)]
#[command(name = "stmc", version, about = "Timed metric spaces from Lorentzian models")]
pub struct Cli {
    /// Seed for sampling jitter, searches and experiments.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Validation tolerance for input spaces.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (falls back to STMC_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Output file, or directory for `model sample`.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and sample spacetime models.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Bound a distance between two tms-v1 spaces.
    Dist(DistArgs),
    /// Validate a space and measure how well it encodes causality.
    Check(CheckArgs),
    /// Run an experiment config (YAML or JSON).
    Experiment { config: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ModelAction {
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Warped,
    Minkowski,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// `const:c`, `linear`, `one-minus-t`, `sin:a,omega`.
    #[arg(long)]
    pub warp: Option<String>,
    /// `circle:L`, `torus:l1,l2`, `euclidean:dim,lo,hi`.
    #[arg(long)]
    pub space: String,
    /// Model time window `lo:hi`.
    #[arg(long)]
    pub window: String,
    #[arg(long)]
    pub nt: usize,
    #[arg(long)]
    pub nx: usize,
    /// `strip`, `past-of-point:t,x1[,x2..]`, `past-of-ring:R,tau_max`.
    #[arg(long)]
    pub region: Option<String>,
    /// Sampled sub-range `lo:hi` of the window.
    #[arg(long)]
    pub t_range: Option<String>,
    /// Edge window in cell diameters.
    #[arg(long, default_value_t = DEFAULT_WINDOW_CELLS)]
    pub window_cells: f64,
    /// Grid jitter as a fraction of a cell.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long)]
    pub augment_bigbang: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Gh,
    KappaGh,
    Timeless,
    LevelSup,
    LevelLp,
    StripSup,
    StripLp,
    TauH,
    BbGh,
    FdHh,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(value_enum)]
    pub op: OpArg,
    pub x: PathBuf,
    pub y: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EXACT_MAX_N)]
    pub exact_max_n: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Exponent of the ℓp variants.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Bin count for level/strip variants; level variants default to one bin per time value.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Report `(sum / total weight)^(1/p)` for ℓp variants.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub space: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// cgraph-v1 file of the sampled model; its analytic causality is the reference.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

/// Process exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Capability(_) | Error::Domain(_) | Error::Yaml(_) => EXIT_FLAGS,
        Error::Disconnected { .. } => EXIT_DISCONNECTED,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::Precondition(_) => EXIT_PRECONDITION,
        Error::Structural(_) | Error::Validation(_) | Error::Json(_) => EXIT_VALIDATION,
        Error::Internal(_) => 1,
    }
}

/// Parses `argv`, runs, prints, and returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FLAGS } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(Outcome { doc, code }) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("json values serialize"));
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// What a command prints, and its exit code.
pub struct Outcome {
    pub doc: Value,
    pub code: i32,
}

fn ok(doc: Value) -> Result<Outcome> {
    Ok(Outcome { doc, code: 0 })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    set_threads(cli.threads)?;
    match &cli.command {
        Command::Model { action: ModelAction::Sample(a) } => cmd_model_sample(cli, a),
        Command::Dist(a) => cmd_dist(cli, a),
        Command::Check(a) => cmd_check(cli, a),
        Command::Experiment { config } => cmd_experiment(cli, config),
    }
}

fn set_threads(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("STMC_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| Error::Argument(format!("STMC_THREADS={v:?} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::Argument("--threads must be positive".into()));
        }
        // a second call in one process (tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn numbers(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Argument(format!("{what}: {s:?} is not a number"))))
        .collect()
}

fn split_family<'a>(text: &'a str) -> (&'a str, Option<&'a str>) {
    match text.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (text, None),
    }
}

fn arity(what: &str, params: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let v = match params {
        Some(p) => numbers(p, what)?,
        None => Vec::new(),
    };
    if v.len() != n {
        return Err(Error::Argument(format!("{what} takes {n} parameter(s), got {}", v.len())));
    }
    Ok(v)
}

pub fn parse_range(text: &str, what: &str) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(':').ok_or_else(|| Error::Argument(format!("{what} must be lo:hi")))?;
    let a = numbers(a, what)?;
    let b = numbers(b, what)?;
    match (a.as_slice(), b.as_slice()) {
        ([a], [b]) => Ok((*a, *b)),
        _ => Err(Error::Argument(format!("{what} must be lo:hi"))),
    }
}

pub fn parse_warp(text: &str) -> Result<Warp> {
    let (family, params) = split_family(text);
    match family {
        "const" => Ok(Warp::Const { c: arity("const warp", params, 1)?[0] }),
        "linear" => arity("linear warp", params, 0).map(|_| Warp::Linear),
        "one-minus-t" => arity("one-minus-t warp", params, 0).map(|_| Warp::OneMinusT),
        "sin" => {
            let v = arity("sin warp", params, 2)?;
            Ok(Warp::Sinusoidal { a: v[0], omega: v[1] })
        }
        _ => Err(Error::Argument(format!("unknown warp family {family:?}"))),
    }
}

pub fn parse_space(text: &str) -> Result<Spatial> {
    let (family, params) = split_family(text);
    match family {
        "circle" => Ok(Spatial::Circle { circumference: arity("circle", params, 1)?[0] }),
        "torus" => {
            let v = arity("torus", params, 2)?;
            Ok(Spatial::FlatTorus { l1: v[0], l2: v[1] })
        }
        "euclidean" => {
            let v = arity("euclidean", params, 3)?;
            if v[0].fract() != 0.0 || v[0] < 1.0 {
                return Err(Error::Argument(format!("euclidean dimension {} must be a positive integer", v[0])));
            }
            Ok(Spatial::Euclidean { dim: v[0] as usize, lo: v[1], hi: v[2] })
        }
        _ => Err(Error::Argument(format!("unknown space type {family:?}"))),
    }
}

pub fn parse_region(text: &str) -> Result<Region> {
    let (family, params) = split_family(text);
    match family {
        "strip" => arity("strip region", params, 0).map(|_| Region::Strip),
        "past-of-point" => {
            let v = numbers(params.unwrap_or(""), "past-of-point")?;
            if v.len() < 2 {
                return Err(Error::Argument("past-of-point needs t and coordinates".into()));
            }
            Ok(Region::PastOfPoint { t: v[0], x: v[1..].to_vec() })
        }
        "past-of-ring" => {
            let v = arity("past-of-ring", params, 2)?;
            Ok(Region::PastOfRing { radius: v[0], tau_max: v[1] })
        }
        _ => Err(Error::Argument(format!("unknown region {family:?}"))),
    }
}

pub fn build_model(a: &SampleArgs) -> Result<SpacetimeModel> {
    let spatial = parse_space(&a.space)?;
    let window = parse_range(&a.window, "--window")?;
    let region = a.region.as_deref().map(parse_region).transpose()?;
    match a.kind {
        KindArg::Warped => {
            let warp = parse_warp(a.warp.as_deref().ok_or_else(|| Error::Argument("--warp is required".into()))?)?;
            SpacetimeModel::new(ModelKind::WarpedProduct, spatial, warp, window, region)
        }
        KindArg::Minkowski => {
            if let Some(w) = &a.warp {
                if parse_warp(w)? != (Warp::Const { c: 1.0 }) {
                    return Err(Error::Argument("minkowski models take no warp".into()));
                }
            }
            SpacetimeModel::minkowski(spatial, window, region.unwrap_or(Region::Strip))
        }
    }
}

fn cmd_model_sample(cli: &Cli, a: &SampleArgs) -> Result<Outcome> {
    let dir = cli.output.as_deref().ok_or_else(|| Error::Argument("model sample needs -o <dir>".into()))?;
    let model = build_model(a)?;
    let mut spec = GridSpec::new(a.nt, a.nx).with_jitter(a.jitter, cli.seed.unwrap_or(DEFAULT_SEED));
    if let Some(r) = &a.t_range {
        let (lo, hi) = parse_range(r, "--t-range")?;
        spec = spec.with_t_range(lo, hi);
    }
    if !(a.window_cells > 0.0) {
        return Err(Error::Argument("--window-cells must be positive".into()));
    }
    let g = sample_graph(&model, &spec, Some(a.window_cells * cell_diameter(&model, &spec)?))?;
    let mut space = null_distance_matrix(&g)?;
    let cosmo = cosmological_time(&g)?;
    let cosmo_err = (0..g.len()).map(|i| (cosmo.values[i] - g.tau(i)).abs()).fold(0.0, f64::max);
    let mut guard = Value::Null;
    if a.augment_bigbang {
        let tol = cli.tol.unwrap_or(DISCRETE_TOL);
        let (s, gd) = augment_big_bang(&space, BB_GUARD_RATIO, tol, tol)?;
        space = s;
        guard = serde_json::to_value(&gd)?;
    }
    let space_path = dir.join("space.json");
    let graph_path = dir.join("graph.json");
    for p in [&space_path, &graph_path] {
        if p.exists() && !cli.force {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::AlreadyExists,
                format!("{} exists (use --force to overwrite)", p.display()),
            )));
        }
    }
    space.save(&space_path, cli.force)?;
    g.save(&graph_path, cli.force)?;
    ok(json!({
        "n": space.len(),
        "nodes": g.len(),
        "edges": g.edge_count(),
        "window_radius": g.window_radius(),
        "diameter": space.diameter(),
        "tau_range": space.tau_range(),
        "cosmological_time_max_error": cosmo_err,
        "basepoint": space.basepoint().map(|i| space.id(i).to_string()),
        "big_bang_guard": guard,
        "files": [space_path, graph_path],
    }))
}

fn load_valid(path: &Path, tol: f64) -> Result<TimedMetricSpace> {
    let s = TimedMetricSpace::load(path)?;
    let report = s.validate(tol);
    if !report.is_valid() {
        return Err(Error::Validation(format!("{}: {}", path.display(), report.summary())));
    }
    Ok(s)
}

/// Dispatches one distance op.
pub fn dist_op(x: &TimedMetricSpace, y: &TimedMetricSpace, a: &DistArgs, seed: u64, tol: f64) -> Result<DistanceBound> {
    let opts = SearchOptions::default().with_exact_max_n(a.exact_max_n).with_budget(a.budget).with_seed(seed);
    let level_bins = || match a.bins {
        Some(k) => LevelBins::covering(x, y, k),
        None => LevelBins::levels(x, y, tol),
    };
    let strip_grid = || StripGrid::regular(x, y, a.bins.unwrap_or(4));
    let bound = match a.op {
        OpArg::Gh => gh(x, y, &opts)?,
        OpArg::KappaGh => kappa_gh(x, y, &opts)?,
        OpArg::Timeless => timeless_sgh(x, y, &opts)?,
        OpArg::TauH => tau_h(x, y, &opts)?,
        OpArg::BbGh => bb_gh(x, y, &opts, tol)?,
        OpArg::FdHh => fd_hh(x, y, &opts, tol)?,
        OpArg::LevelSup => level_sup_gh(x, y, &level_bins()?, &opts)?,
        OpArg::StripSup => strip_sup_gh(x, y, &strip_grid()?, &opts)?,
        OpArg::LevelLp => {
            let bins = level_bins()?;
            let b = level_lp_gh(x, y, a.p, &bins, &opts)?;
            if a.normalized {
                lp_normalized(&b, a.p, bins.width * bins.centers.len() as f64)?
            } else {
                b
            }
        }
        OpArg::StripLp => {
            let grid = strip_grid()?;
            let b = strip_lp_gh(x, y, a.p, &grid, &opts)?;
            if a.normalized {
                lp_normalized(&b, a.p, grid.weight * grid.pairs.len() as f64)?
            } else {
                b
            }
        }
    };
    if a.normalized && !matches!(a.op, OpArg::LevelLp | OpArg::StripLp) {
        return Err(Error::Argument("--normalized applies to level-lp and strip-lp only".into()));
    }
    Ok(bound)
}

fn cmd_dist(cli: &Cli, a: &DistArgs) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(DISCRETE_TOL);
    let x = load_valid(&a.x, tol)?;
    let y = load_valid(&a.y, tol)?;
    let bound = dist_op(&x, &y, a, cli.seed.unwrap_or(DEFAULT_SEED), tol)?;
    if let Some(out) = &cli.output {
        bound.save(out, cli.force)?;
    }
    ok(serde_json::to_value(&bound)?)
}

fn cmd_check(cli: &Cli, a: &CheckArgs) -> Result<Outcome> {
    let tol = cli.tol.unwrap_or(DISCRETE_TOL);
    let space = TimedMetricSpace::load(&a.space)?;
    let validation = space.validate(tol);
    if !validation.is_valid() {
        eprintln!("{}", validation.summary());
        return Err(Error::Validation(format!("{}: {}", a.space.display(), validation.summary())));
    }
    let rel = causal_relation(&space, a.eps)?;
    let axioms = check_causal_axioms(&rel, &space);
    let (reference, agree) = match &a.graph {
        Some(path) => {
            let g = CausalGraph::load(path)?;
            let idx = graph_indices(&space, &g)?;
            let m = g.model();
            ("model", agreement(&rel, |p, q| m.is_causal(g.node(idx[p]), g.node(idx[q])))?)
        }
        None => {
            let exact = causal_relation(&space, 0.0)?;
            ("exact", agreement(&rel, |p, q| Ok(exact.related(p, q)))?)
        }
    };
    let doc = json!({
        "n": space.len(),
        "eps": a.eps,
        "valid": true,
        "related_pairs": rel.count(),
        "axioms": axioms,
        "reference": reference,
        "agreement": agree,
    });
    if let Some(out) = &cli.output {
        crate::json::write_pretty(out, &doc, cli.force)?;
    }
    ok(doc)
}

/// Graph node index of every space point, matched by id.
fn graph_indices(space: &TimedMetricSpace, g: &CausalGraph) -> Result<Vec<usize>> {
    let ids = g.ids();
    space
        .ids()
        .iter()
        .map(|id| {
            ids.iter()
                .position(|g_id| g_id == id)
                .ok_or_else(|| Error::Precondition(format!("point {id} has no node in the graph")))
        })
        .collect()
}

fn cmd_experiment(cli: &Cli, path: &Path) -> Result<Outcome> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    let report = cfg.run()?;
    let out = cli.output.as_deref().or(cfg.output()).map(Path::to_path_buf);
    let files = match &out {
        Some(p) => report.write(p, cli.force)?,
        None => Vec::new(),
    };
    let failures: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    let doc = json!({
        "experiment": report.experiment,
        "verdict": report.verdict,
        "cases": report.cases.len(),
        "failures": failures,
        "label": report.label,
        "runtime_s": report.runtime_s,
        "files": files,
    });
    Ok(Outcome { doc, code: if report.passed() { 0 } else { EXIT_EXPERIMENT } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_grammars() {
        assert_eq!(parse_warp("const:2").unwrap(), Warp::Const { c: 2.0 });
        assert_eq!(parse_warp("sin:0.5,6.28").unwrap(), Warp::Sinusoidal { a: 0.5, omega: 6.28 });
        assert_eq!(parse_warp("linear").unwrap(), Warp::Linear);
        assert!(parse_warp("linear:1").is_err());
        assert!(parse_warp("cubic").is_err());
        assert_eq!(parse_space("torus:1,2").unwrap(), Spatial::FlatTorus { l1: 1.0, l2: 2.0 });
        assert!(parse_space("euclidean:1.5,0,1").is_err());
        assert_eq!(parse_range("0:1.5", "w").unwrap(), (0.0, 1.5));
        assert!(parse_range("0-1", "w").is_err());
        assert_eq!(parse_region("past-of-point:1,0").unwrap(), Region::PastOfPoint { t: 1.0, x: vec![0.0] });
        assert!(parse_region("past-of-point:1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Precondition(String::new())), EXIT_PRECONDITION);
        assert_eq!(exit_code(&Error::Disconnected { from: "a".into(), to: "b".into() }), EXIT_DISCONNECTED);
        assert_eq!(main_with(["stmc", "--bogus"]), EXIT_FLAGS);
        assert_eq!(main_with(["stmc", "dist", "nope", "a.json", "b.json"]), EXIT_FLAGS);
        assert_eq!(main_with(["stmc", "dist", "gh", "/nonexistent/a.json", "/nonexistent/b.json"]), EXIT_IO);
    }
}
