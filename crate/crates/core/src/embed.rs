//! Kuratowski and timed-Kuratowski embeddings into sup-norm coordinate space.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

pub const CLOUD_SCHEMA: &str = "cloud-v1";

/// Finite point list with the sup-norm metric. When `timed`, coordinate 0
/// holds τ and the remaining coordinates are distances to the landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedCloud {
    dim: usize,
    timed: bool,
    landmark_ids: Vec<String>,
    points: Vec<f64>,
}

impl EmbeddedCloud {
    pub fn new(dim: usize, timed: bool, landmark_ids: Vec<String>, points: Vec<f64>) -> Result<Self> {
        let expected = landmark_ids.len() + usize::from(timed);
        if dim != expected {
            return Err(Error::Structural(format!("dimension {dim}, expected {expected}")));
        }
        if dim == 0 || points.len() % dim != 0 {
            return Err(Error::Structural(format!("{} coordinates for dimension {dim}", points.len())));
        }
        Ok(Self { dim, timed, landmark_ids, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn timed(&self) -> bool {
        self.timed
    }

    pub fn landmark_ids(&self) -> &[String] {
        &self.landmark_ids
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sup_dist(&self, i: usize, j: usize) -> f64 {
        sup(self.point(i), self.point(j))
    }

    pub fn to_json(&self) -> CloudJson {
        CloudJson {
            schema: CLOUD_SCHEMA.into(),
            dim: self.dim,
            timed: self.timed,
            landmark_ids: self.landmark_ids.clone(),
            points: self.points.clone(),
        }
    }

    pub fn from_json(doc: CloudJson) -> Result<Self> {
        if doc.schema != CLOUD_SCHEMA {
            return Err(Error::Structural(format!("schema {:?}, expected {CLOUD_SCHEMA:?}", doc.schema)));
        }
        Self::new(doc.dim, doc.timed, doc.landmark_ids, doc.points)
    }

    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        crate::json::write_pretty(path, &self.to_json(), force)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudJson {
    pub schema: String,
    pub dim: usize,
    pub timed: bool,
    pub landmark_ids: Vec<String>,
    /// Row-major, `dim` coordinates per point.
    pub points: Vec<f64>,
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn landmarks(space: &TimedMetricSpace, order: &[String]) -> Result<Vec<usize>> {
    let idx = order
        .iter()
        .map(|id| {
            space
                .index_of(id)
                .ok_or_else(|| Error::Argument(format!("unknown landmark {id:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hit = vec![false; space.len()];
    idx.iter().for_each(|&i| hit[i] = true);
    if let Some(miss) = hit.iter().position(|h| !h) {
        return Err(Error::Argument(format!(
            "landmark order misses {:?}; it must cover every point",
            space.id(miss)
        )));
    }
    Ok(idx)
}

fn embed(space: &TimedMetricSpace, order: &[String], timed: bool) -> Result<EmbeddedCloud> {
    let idx = landmarks(space, order)?;
    let dim = idx.len() + usize::from(timed);
    let mut points = Vec::with_capacity(space.len() * dim);
    for x in 0..space.len() {
        if timed {
            points.push(space.tau(x));
        }
        points.extend(idx.iter().map(|&l| space.dist(l, x)));
    }
    EmbeddedCloud::new(dim, timed, order.to_vec(), points)
}

/// `x ↦ (d(x₁, x), …, d(x_k, x))` over a landmark order covering every point.
pub fn kuratowski(space: &TimedMetricSpace, landmark_order: &[String]) -> Result<EmbeddedCloud> {
    embed(space, landmark_order, false)
}

/// `x ↦ (τ(x), d(x₁, x), …, d(x_k, x))`.
pub fn timed_kuratowski(space: &TimedMetricSpace, landmark_order: &[String]) -> Result<EmbeddedCloud> {
    embed(space, landmark_order, true)
}

/// Hausdorff distance between two clouds in the sup norm.
pub fn hausdorff_sup(a: &EmbeddedCloud, b: &EmbeddedCloud) -> Result<f64> {
    if a.dim != b.dim || a.timed != b.timed {
        return Err(Error::Argument(format!(
            "clouds differ in shape: dim {} vs {}, timed {} vs {}",
            a.dim, b.dim, a.timed, b.timed
        )));
    }
    if a.is_empty() || b.is_empty() {
        return Ok(if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY });
    }
    let one_sided = |p: &EmbeddedCloud, q: &EmbeddedCloud| {
        (0..p.len())
            .map(|i| (0..q.len()).map(|j| sup(p.point(i), q.point(j))).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}
