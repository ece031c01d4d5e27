//! End-to-end experiments with machine-readable reports.

mod convergence;
pub mod fixtures;
mod oracle;
pub mod random;
mod suites;

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::json::inf_f64;

pub use convergence::{run_convergence, ConvergenceConfig};
pub use oracle::{run_oracle_regression, OracleConfig, ValueCheck};
pub use suites::{run_definiteness_suite, run_sandwich_suite, DefinitenessConfig, SandwichConfig};

pub const REPORT_SCHEMA: &str = "report-v1";
pub const CONJECTURE_PROBE: &str = "conjecture-probe";

fn default_seed() -> u64 {
    crate::distances::DEFAULT_SEED
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A closed-form value of the continuum model.
    ClosedForm,
    /// Computed independently (enumeration, hand arithmetic, a separate run).
    Derived,
    /// Holds by construction.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    #[serde(with = "inf_f64")]
    pub value: f64,
    pub tol: f64,
    /// `tol` is relative to `|value|` when set.
    pub relative: bool,
    pub source: Source,
}

impl Expected {
    pub fn abs(value: f64, tol: f64, source: Source) -> Self {
        Self { value, tol, relative: false, source }
    }

    pub fn rel(value: f64, tol: f64, source: Source) -> Self {
        Self { value, tol, relative: true, source }
    }
}

/// One checked item of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub inputs: serde_json::Value,
    pub expected: Option<Expected>,
    pub got: serde_json::Value,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub pass: bool,
}

impl Case {
    /// Compares a scalar against `expected`.
    pub fn value(name: impl Into<String>, inputs: serde_json::Value, got: f64, expected: Expected) -> Self {
        let abs_err = if got == expected.value { 0.0 } else { (got - expected.value).abs() };
        let rel_err = if expected.value != 0.0 && expected.value.is_finite() {
            abs_err / expected.value.abs()
        } else {
            abs_err
        };
        let err = if expected.relative { rel_err } else { abs_err };
        Self {
            name: name.into(),
            inputs,
            got: scalar_json(got),
            abs_err: Some(abs_err).filter(|e| e.is_finite()),
            rel_err: Some(rel_err).filter(|e| e.is_finite()),
            pass: err <= expected.tol,
            expected: Some(expected),
        }
    }

    /// A pass/fail property without a scalar target.
    pub fn check(name: impl Into<String>, inputs: serde_json::Value, got: serde_json::Value, pass: bool) -> Self {
        Self { name: name.into(), inputs, expected: None, got, abs_err: None, rel_err: None, pass }
    }
}

fn scalar_json(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!("inf")
    }
}

/// One row of a plotted series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub param: f64,
    #[serde(with = "inf_f64")]
    pub lower: f64,
    #[serde(with = "inf_f64")]
    pub upper: f64,
    pub floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub experiment: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub cases: Vec<Case>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesRow>,
    /// Recorded but not part of the verdict.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<Case>,
    pub verdict: Verdict,
    pub runtime_s: f64,
}

impl ExperimentReport {
    fn new(experiment: &str, seed: u64) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            experiment: experiment.into(),
            seed,
            label: None,
            cases: Vec::new(),
            series: Vec::new(),
            probes: Vec::new(),
            verdict: Verdict::Pass,
            runtime_s: 0.0,
        }
    }

    fn finish(mut self, started: Instant) -> Self {
        self.verdict = if self.cases.iter().all(|c| c.pass) { Verdict::Pass } else { Verdict::Fail };
        self.runtime_s = started.elapsed().as_secs_f64();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn case(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }

    /// Writes the JSON report and a CSV of the series (header only when
    /// there is none) with the same stem. Returns the paths written.
    pub fn write(&self, path: &Path, force: bool) -> Result<Vec<PathBuf>> {
        let csv_path = path.with_extension("csv");
        if csv_path == path {
            return Err(Error::Argument(format!("report path {} must not end in .csv", path.display())));
        }
        if csv_path.exists() && !force {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::AlreadyExists,
                format!("{} exists (use --force to overwrite)", csv_path.display()),
            )));
        }
        crate::json::write_pretty(path, self, force)?;
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(["param", "lower", "upper", "floor"])?;
        for r in &self.series {
            let cell = |v: f64| if v.is_finite() { v.to_string() } else { "inf".into() };
            w.write_record([cell(r.param), cell(r.lower), cell(r.upper), cell(r.floor)])?;
        }
        w.flush()?;
        Ok(vec![path.to_path_buf(), csv_path])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if doc.schema != REPORT_SCHEMA {
            return Err(Error::Structural(format!("schema {:?}, expected {REPORT_SCHEMA:?}", doc.schema)));
        }
        Ok(doc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    OracleRegression(OracleConfig),
    Definiteness(DefinitenessConfig),
    Sandwich(SandwichConfig),
    Convergence(ConvergenceConfig),
}

impl ExperimentConfig {
    /// Reads YAML or JSON (JSON is valid YAML, so one parser serves both).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_yaml::from_str(text)?)
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::OracleRegression(c) => c.seed,
            Self::Definiteness(c) => c.seed,
            Self::Sandwich(c) => c.seed,
            Self::Convergence(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::OracleRegression(c) => c.seed = seed,
            Self::Definiteness(c) => c.seed = seed,
            Self::Sandwich(c) => c.seed = seed,
            Self::Convergence(c) => c.seed = seed,
        }
    }

    /// Output path named in the config, if any.
    pub fn output(&self) -> Option<&Path> {
        match self {
            Self::OracleRegression(c) => c.output.as_deref(),
            Self::Definiteness(c) => c.output.as_deref(),
            Self::Sandwich(c) => c.output.as_deref(),
            Self::Convergence(c) => c.output.as_deref(),
        }
    }

    pub fn run(&self) -> Result<ExperimentReport> {
        match self {
            Self::OracleRegression(c) => run_oracle_regression(c),
            Self::Definiteness(c) => run_definiteness_suite(c),
            Self::Sandwich(c) => run_sandwich_suite(c),
            Self::Convergence(c) => run_convergence(c),
        }
    }
}

/// Per-trial seed, independent of scheduling.
pub(crate) fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
