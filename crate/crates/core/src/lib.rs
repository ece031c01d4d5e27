//! Timed metric spaces and distances between them.

pub mod causal;
pub mod cli;
pub mod discretize;
pub mod distances;
pub mod embed;
pub mod error;
pub mod harness;
pub mod isometry;
pub mod json;
pub mod models;
pub mod space;

pub use error::{Error, Result};
pub use space::TimedMetricSpace;
