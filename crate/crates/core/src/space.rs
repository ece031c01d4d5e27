//! Finite timed metric spaces.
//!
//! A [`TimedMetricSpace`] is a finite set of points with a dense symmetric
//! distance matrix and a time value per point. Every other module either
//! produces one (discretization, augmentation, restriction) or consumes two
//! (the distance bounds). Construction only checks structure; the metric and
//! time invariants are checked by [`TimedMetricSpace::validate`], which
//! reports instead of failing so callers can decide how strict to be.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};

/// Validation tolerance for analytically constructed spaces.
pub const ANALYTIC_TOL: f64 = 1e-9;
/// Validation tolerance for spaces produced by discretization.
pub const DISCRETE_TOL: f64 = 1e-6;

pub const TMS_SCHEMA: &str = "tms-v1";

#[derive(Debug, Clone, PartialEq)]
pub struct TimedMetricSpace {
    ids: Vec<String>,
    tau: Vec<f64>,
    // Unshifted time, used for strip membership so nested strips compare
    // against the same floats as a single strip.
    tau_abs: Vec<f64>,
    tau_offset: f64,
    dist: Vec<f64>,
    basepoint: Option<usize>,
    initial_set: Option<Vec<usize>>,
    meta: BTreeMap<String, Value>,
}

impl TimedMetricSpace {
    /// Builds a space from ids, times and a row-major `n*n` distance matrix.
    pub fn new(ids: Vec<String>, tau: Vec<f64>, dist: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if tau.len() != n {
            return Err(Error::Structural(format!(
                "{} ids but {} tau values",
                n,
                tau.len()
            )));
        }
        if dist.len() != n * n {
            return Err(Error::Structural(format!(
                "distance matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        if let Some(bad) = tau.iter().chain(dist.iter()).find(|v| !v.is_finite()) {
            return Err(Error::Structural(format!("non-finite value {bad}")));
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if let Some(j) = seen.insert(id.as_str(), i) {
                return Err(Error::Structural(format!(
                    "duplicate point id {id:?} at {j} and {i}"
                )));
            }
        }
        Ok(Self {
            ids,
            tau_abs: tau.clone(),
            tau,
            tau_offset: 0.0,
            dist,
            basepoint: None,
            initial_set: None,
            meta: BTreeMap::new(),
        })
    }

    /// Builds a space from a distance function, evaluated on `i < j` and mirrored.
    pub fn from_fn(
        ids: Vec<String>,
        tau: Vec<f64>,
        mut d: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let n = ids.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = d(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        Self::new(ids, tau, dist)
    }

    /// Ids `p0, p1, ...`.
    pub fn default_ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), Vec::new()).expect("empty space is well formed")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Empty spaces are legal values: level and strip restrictions may select nothing.
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau[i]
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau
    }

    /// Amount subtracted from the original time values by strip restriction.
    pub fn tau_offset(&self) -> f64 {
        self.tau_offset
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn dist_matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    pub fn initial_set(&self) -> Option<&[usize]> {
        self.initial_set.as_deref()
    }

    pub fn meta(&self) -> &BTreeMap<String, Value> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<Value>) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn with_basepoint(mut self, index: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::Argument(format!("basepoint index {index} out of range")));
        }
        self.basepoint = Some(index);
        Ok(self)
    }

    pub fn with_initial_set(mut self, mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Argument("initial set must be nonempty".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Argument(format!("initial set index {bad} out of range")));
        }
        indices.sort_unstable();
        indices.dedup();
        self.initial_set = Some(indices);
        Ok(self)
    }

    pub fn without_flags(mut self) -> Self {
        self.basepoint = None;
        self.initial_set = None;
        self
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.len() {
            return Err(Error::Structural("id list has wrong length".into()));
        }
        let fresh = Self::new(ids, self.tau.clone(), self.dist.clone())?;
        self.ids = fresh.ids;
        Ok(self)
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// `(min τ, max τ)`, or `None` when empty.
    pub fn tau_range(&self) -> Option<(f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let lo = self.tau.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.tau.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo, hi))
    }

    /// Reorders points: index `i` of the result is index `perm[i]` of `self`.
    /// Ids, times, and flags travel with their points.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Argument("not a permutation".into()));
        }
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut out = self.subspace(perm);
        out.basepoint = self.basepoint.map(|b| inverse[b]);
        out.initial_set = self.initial_set.as_ref().map(|m| {
            let mut v: Vec<usize> = m.iter().map(|&i| inverse[i]).collect();
            v.sort_unstable();
            v
        });
        Ok(out)
    }

    /// The subspace on `indices` (in that order). Flags are kept when the
    /// flagged points survive.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let n = self.len();
        let k = indices.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist[i * n + j]);
            }
        }
        let position = |old: usize| indices.iter().position(|&i| i == old);
        let initial_set = self.initial_set.as_ref().and_then(|m| {
            let kept: Vec<usize> = m.iter().filter_map(|&i| position(i)).collect();
            (!kept.is_empty()).then_some(kept)
        });
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            tau: indices.iter().map(|&i| self.tau[i]).collect(),
            tau_abs: indices.iter().map(|&i| self.tau_abs[i]).collect(),
            tau_offset: self.tau_offset,
            dist,
            basepoint: self.basepoint.and_then(position),
            initial_set,
            meta: self.meta.clone(),
        }
    }

    /// Points with `|τ - t| <= half_width`, distances restricted.
    pub fn restrict_level(&self, t: f64, half_width: f64) -> Result<Self> {
        if !(half_width >= 0.0) {
            return Err(Error::Argument(format!("half_width {half_width} < 0")));
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| (self.tau[i] - t).abs() <= half_width)
            .collect();
        Ok(self
            .subspace(&keep)
            .with_meta("level", serde_json::json!({ "t": t, "half_width": half_width })))
    }

    /// Points with `s <= τ <= t`, ambient distances, and time shifted by `-s`.
    ///
    /// The shift accumulates in [`tau_offset`](Self::tau_offset); membership is
    /// decided on the unshifted times so that nested strips select exactly the
    /// points a single strip would.
    pub fn restrict_strip(&self, s: f64, t: f64) -> Result<Self> {
        if !(s <= t) {
            return Err(Error::Argument(format!("strip [{s}, {t}] has s > t")));
        }
        let lo = self.tau_offset + s;
        let hi = self.tau_offset + t;
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.tau_abs[i] >= lo && self.tau_abs[i] <= hi)
            .collect();
        let mut out = self.subspace(&keep);
        out.tau_offset = lo;
        out.tau = out.tau_abs.iter().map(|&a| a - lo).collect();
        // A shifted time breaks the big-bang and initial-data identities.
        out.basepoint = None;
        out.initial_set = None;
        out.set_meta("tau_offset", lo);
        Ok(out)
    }

    /// Checks every timed-metric invariant within `tol`.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate(self, tol)
    }

    pub fn to_json(&self) -> TmsJson {
        let n = self.len();
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                values.push(self.dist(i, j));
            }
        }
        let mut meta = self.meta.clone();
        if self.tau_offset != 0.0 {
            meta.insert("tau_offset".into(), self.tau_offset.into());
        }
        TmsJson {
            schema: TMS_SCHEMA.into(),
            points: (0..n)
                .map(|i| PointJson {
                    id: self.ids[i].clone(),
                    tau: self.tau[i],
                })
                .collect(),
            dist: DistJson {
                format: "dense-upper".into(),
                values,
            },
            basepoint: self.basepoint.map(|b| self.ids[b].clone()),
            initial_set: self
                .initial_set
                .as_ref()
                .map(|m| m.iter().map(|&i| self.ids[i].clone()).collect()),
            meta,
        }
    }

    pub fn from_json(doc: TmsJson) -> Result<Self> {
        if doc.schema != TMS_SCHEMA {
            return Err(Error::Structural(format!(
                "schema {:?}, expected {TMS_SCHEMA:?}",
                doc.schema
            )));
        }
        if doc.dist.format != "dense-upper" {
            return Err(Error::Structural(format!(
                "distance format {:?} unsupported",
                doc.dist.format
            )));
        }
        let n = doc.points.len();
        if doc.dist.values.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Structural(format!(
                "{} upper-triangle values for {} points",
                doc.dist.values.len(),
                n
            )));
        }
        let ids: Vec<String> = doc.points.iter().map(|p| p.id.clone()).collect();
        let tau: Vec<f64> = doc.points.iter().map(|p| p.tau).collect();
        let mut dist = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                dist[i * n + j] = doc.dist.values[k];
                dist[j * n + i] = doc.dist.values[k];
                k += 1;
            }
        }
        let mut space = Self::new(ids, tau, dist)?;
        if let Some(offset) = doc.meta.get("tau_offset").and_then(Value::as_f64) {
            space.tau_offset = offset;
            space.tau_abs = space.tau.iter().map(|t| t + offset).collect();
        }
        space.meta = doc.meta;
        let lookup = |space: &Self, id: &str, what: &str| {
            space
                .index_of(id)
                .ok_or_else(|| Error::Structural(format!("{what} id {id:?} not among points")))
        };
        if let Some(b) = &doc.basepoint {
            let idx = lookup(&space, b, "basepoint")?;
            space = space.with_basepoint(idx)?;
        }
        if let Some(m) = &doc.initial_set {
            let idx = m
                .iter()
                .map(|id| lookup(&space, id, "initial_set"))
                .collect::<Result<Vec<_>>>()?;
            space = space.with_initial_set(idx)?;
        }
        Ok(space)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        crate::json::write_pretty(path, &self.to_json(), force)
    }

    /// SHA-256 of the canonical tms-v1 rendering.
    pub fn content_hash(&self) -> String {
        crate::json::content_hash(&self.to_json()).expect("tms json always serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TmsJson {
    pub schema: String,
    pub points: Vec<PointJson>,
    pub dist: DistJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_set: Option<Vec<String>>,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointJson {
    pub id: String,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistJson {
    pub format: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Diagonal,
    Symmetry,
    Triangle,
    Definiteness,
    NegativeTau,
    Lipschitz,
    Basepoint,
    InitialSet,
}

/// One violated invariant: how often, how badly, and the worst offenders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub count: usize,
    pub magnitude: f64,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn get(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            return "valid".into();
        }
        self.violations
            .iter()
            .map(|v| {
                format!(
                    "{:?} x{} (worst {:.3e} at {:?})",
                    v.kind, v.count, v.magnitude, v.indices
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self.summary()))
        }
    }
}

#[derive(Default)]
struct Tally {
    count: usize,
    worst: f64,
    at: Vec<usize>,
}

impl Tally {
    fn hit(&mut self, magnitude: f64, at: &[usize]) {
        self.count += 1;
        if self.count == 1 || magnitude > self.worst {
            self.worst = magnitude;
            self.at = at.to_vec();
        }
    }

    fn merge(&mut self, other: Tally) {
        if other.count == 0 {
            return;
        }
        let count = self.count + other.count;
        if self.count == 0 || other.worst > self.worst {
            self.worst = other.worst;
            self.at = other.at;
        }
        self.count = count;
    }
}

fn validate(space: &TimedMetricSpace, tol: f64) -> ValidationReport {
    use rayon::prelude::*;

    let n = space.len();
    let d = |i: usize, j: usize| space.dist(i, j);
    let mut tallies: BTreeMap<ViolationKind, Tally> = BTreeMap::new();
    let mut hit = |kind, magnitude, at: &[usize]| tallies.entry(kind).or_default().hit(magnitude, at);

    for i in 0..n {
        if d(i, i).abs() > tol {
            hit(ViolationKind::Diagonal, d(i, i).abs(), &[i]);
        }
        if space.tau(i) < -tol {
            hit(ViolationKind::NegativeTau, -space.tau(i), &[i]);
        }
        for j in i + 1..n {
            let asym = (d(i, j) - d(j, i)).abs();
            if asym > tol {
                hit(ViolationKind::Symmetry, asym, &[i, j]);
            }
            if d(i, j) <= 0.0 {
                hit(ViolationKind::Definiteness, -d(i, j), &[i, j]);
            }
            let lip = (space.tau(i) - space.tau(j)).abs() - d(i, j);
            if lip > tol {
                hit(ViolationKind::Lipschitz, lip, &[i, j]);
            }
        }
    }

    // The cubic triangle scan dominates; split it over rows.
    let triangle = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            for j in i + 1..n {
                let dij = d(i, j);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let excess = dij - d(i, k) - d(k, j);
                    if excess > tol {
                        t.hit(excess, &[i, j, k]);
                    }
                }
            }
            t
        })
        .reduce(Tally::default, |mut a, b| {
            a.merge(b);
            a
        });
    tallies.entry(ViolationKind::Triangle).or_default().merge(triangle);

    if let Some(b) = space.basepoint() {
        let mut t = Tally::default();
        if space.tau(b).abs() > tol {
            t.hit(space.tau(b).abs(), &[b]);
        }
        for x in 0..n {
            let gap = (d(b, x) - space.tau(x)).abs();
            if gap > tol {
                t.hit(gap, &[b, x]);
            }
        }
        tallies.entry(ViolationKind::Basepoint).or_default().merge(t);
    }

    if let Some(m) = space.initial_set() {
        let mut t = Tally::default();
        for &q in m {
            if space.tau(q).abs() > tol {
                t.hit(space.tau(q).abs(), &[q]);
            }
        }
        for p in 0..n {
            let to_m = m.iter().map(|&q| d(p, q)).fold(f64::INFINITY, f64::min);
            let gap = (space.tau(p) - to_m).abs();
            if gap > tol {
                t.hit(gap, &[p]);
            }
        }
        tallies.entry(ViolationKind::InitialSet).or_default().merge(t);
    }

    ValidationReport {
        tol,
        violations: tallies
            .into_iter()
            .filter(|(_, t)| t.count > 0)
            .map(|(kind, t)| Violation {
                kind,
                count: t.count,
                magnitude: t.worst,
                indices: t.at,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(tau: &[f64], upper: &[f64]) -> TimedMetricSpace {
        let n = tau.len();
        let mut k = 0;
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                dist[i * n + j] = upper[k];
                dist[j * n + i] = upper[k];
                k += 1;
            }
        }
        TimedMetricSpace::new(TimedMetricSpace::default_ids(n), tau.to_vec(), dist).unwrap()
    }

    #[test]
    fn lipschitz_tight_pair_is_valid() {
        assert!(space(&[0.0, 1.0], &[1.0]).validate(ANALYTIC_TOL).is_valid());
    }

    #[test]
    fn triangle_violation_magnitude() {
        // d(a,b)=1, d(a,c)=5, d(b,c)=1
        let r = space(&[0.0, 0.0, 0.0], &[1.0, 5.0, 1.0]).validate(ANALYTIC_TOL);
        let v = r.get(ViolationKind::Triangle).unwrap();
        assert!((v.magnitude - 3.0).abs() < 1e-12);
        assert_eq!(v.indices[..2], [0, 2]);
    }

    #[test]
    fn lipschitz_violation_magnitude() {
        let r = space(&[0.0, 1.0], &[0.5]).validate(ANALYTIC_TOL);
        let v = r.get(ViolationKind::Lipschitz).unwrap();
        assert!((v.magnitude - 0.5).abs() < 1e-12);
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn zero_distance_between_distinct_points_is_flagged() {
        let r = space(&[0.0, 0.0], &[0.0]).validate(ANALYTIC_TOL);
        assert!(r.get(ViolationKind::Definiteness).is_some());
    }

    #[test]
    fn structural_errors() {
        let ids = TimedMetricSpace::default_ids(2);
        assert!(TimedMetricSpace::new(ids.clone(), vec![0.0], vec![0.0; 4]).is_err());
        assert!(TimedMetricSpace::new(ids.clone(), vec![0.0, 1.0], vec![0.0; 3]).is_err());
        assert!(TimedMetricSpace::new(ids, vec![0.0, f64::NAN], vec![0.0; 4]).is_err());
        let dup = vec!["a".to_string(), "a".to_string()];
        assert!(TimedMetricSpace::new(dup, vec![0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn basepoint_and_initial_set_checks() {
        let s = space(&[0.0, 1.0, 2.0], &[1.0, 2.0, 1.0]);
        assert!(s.clone().with_basepoint(0).unwrap().validate(1e-9).is_valid());
        let bad = s.clone().with_basepoint(1).unwrap().validate(1e-9);
        assert!(bad.get(ViolationKind::Basepoint).is_some());
        assert!(s.clone().with_initial_set(vec![0]).unwrap().validate(1e-9).is_valid());
        let bad = s.with_initial_set(vec![2]).unwrap().validate(1e-9);
        assert!(bad.get(ViolationKind::InitialSet).is_some());
    }

    fn grid() -> TimedMetricSpace {
        // 3 time slices of 2 points, sup metric plus 1 between distinct points
        let pts: Vec<(f64, f64)> = (0..3)
            .flat_map(|t| (0..2).map(move |x| (t as f64 * 0.5, x as f64)))
            .collect();
        TimedMetricSpace::from_fn(
            TimedMetricSpace::default_ids(pts.len()),
            pts.iter().map(|p| p.0).collect(),
            |i, j| (pts[i].0 - pts[j].0).abs().max((pts[i].1 - pts[j].1).abs()),
        )
        .unwrap()
    }

    #[test]
    fn level_restriction() {
        let g = grid();
        let slice = g.restrict_level(0.5, 0.0).unwrap();
        assert_eq!(slice.len(), 2);
        assert!(slice.taus().iter().all(|&t| t == 0.5));
        assert!(g.restrict_level(0.25, 0.1).unwrap().is_empty());
        assert!(g.restrict_level(0.0, -1.0).is_err());
    }

    #[test]
    fn strip_restriction_shifts_time() {
        let g = grid();
        let whole = g.restrict_strip(0.0, 1.0).unwrap();
        assert_eq!(whole.len(), g.len());
        let upper = g.restrict_strip(0.5, 1.0).unwrap();
        assert_eq!(upper.len(), 4);
        assert_eq!(upper.tau_range(), Some((0.0, 0.5)));
        assert_eq!(upper.tau_offset(), 0.5);
        let single = g.restrict_strip(1.0, 1.0).unwrap();
        assert_eq!(single.len(), 2);
        assert!(g.restrict_strip(1.0, 0.5).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let g = grid().restrict_strip(0.5, 1.0).unwrap().with_basepoint(0).unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = TimedMetricSpace::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.taus(), g.taus());
        assert_eq!(back.dist_matrix(), g.dist_matrix());
        assert_eq!(back.basepoint(), Some(0));
        assert_eq!(back.tau_offset(), 0.5);

        let mut doc = g.to_json();
        doc.dist.values.pop();
        assert!(TimedMetricSpace::from_json(doc).is_err());
        let mut doc = g.to_json();
        doc.schema = "tms-v0".into();
        assert!(TimedMetricSpace::from_json(doc).is_err());
    }

    #[test]
    fn permutation_moves_flags() {
        let s = space(&[0.0, 1.0, 2.0], &[1.0, 2.0, 1.0]).with_basepoint(0).unwrap();
        let p = s.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.basepoint(), Some(1));
        assert_eq!(p.dist(0, 1), s.dist(2, 0));
        assert!(s.permuted(&[0, 0, 1]).is_err());
    }
}
