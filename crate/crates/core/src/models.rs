//! Analytic space-time models.
//!
//! Two families are supported: warped products `-dt² + f(t)² h` over a
//! circle, flat torus, or Euclidean box, and regions of Minkowski space
//! (strip, past of a point, past of a ring). The warp catalog is closed so
//! the causal predicate reduces to comparing the spatial distance with
//! `∫ ds / f(s)`, which is closed-form for every family except the
//! sinusoidal one (integrated by adaptive Simpson to 1e-13).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};

pub const MODEL_SCHEMA: &str = "model-v1";

/// Absolute slack in causal comparisons. Grid points that sit exactly on a
/// light cone must compare as causal despite rounding in their coordinates.
pub const CAUSAL_SLACK: f64 = 1e-12;

/// Default midpoint panels for proper-time quadrature.
pub const DEFAULT_N_QUAD: usize = 64;

/// Interior samples used to check that a segment stays in a non-convex region.
pub const RING_SEGMENT_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    WarpedProduct,
    MinkowskiRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Spatial {
    /// Circle of the given circumference; coordinate is arc length in `[0, L)`.
    Circle { circumference: f64 },
    FlatTorus { l1: f64, l2: f64 },
    /// The box `[lo, hi]^dim` of Euclidean space, `dim ∈ {1, 2, 3}`.
    Euclidean { dim: usize, lo: f64, hi: f64 },
}

impl Spatial {
    pub fn dim(&self) -> usize {
        match self {
            Spatial::Circle { .. } => 1,
            Spatial::FlatTorus { .. } => 2,
            Spatial::Euclidean { dim, .. } => *dim,
        }
    }

    /// Period of each coordinate, `None` for non-periodic axes.
    pub fn periods(&self) -> Vec<Option<f64>> {
        match self {
            Spatial::Circle { circumference } => vec![Some(*circumference)],
            Spatial::FlatTorus { l1, l2 } => vec![Some(*l1), Some(*l2)],
            Spatial::Euclidean { dim, .. } => vec![None; *dim],
        }
    }

    /// Shortest displacement from `a` to `b`, coordinate-wise.
    pub fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        self.periods()
            .iter()
            .zip(a.iter().zip(b))
            .map(|(period, (&u, &v))| match period {
                Some(l) => {
                    let d = (v - u).rem_euclid(*l);
                    if d > l / 2.0 {
                        d - l
                    } else {
                        d
                    }
                }
                None => v - u,
            })
            .collect()
    }

    /// Riemannian distance of the (unwarped) spatial metric.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.displacement(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Spatial::Circle { circumference } => {
                x[0] >= -CAUSAL_SLACK && x[0] <= circumference + CAUSAL_SLACK
            }
            Spatial::FlatTorus { l1, l2 } => {
                x[0] >= -CAUSAL_SLACK
                    && x[0] <= l1 + CAUSAL_SLACK
                    && x[1] >= -CAUSAL_SLACK
                    && x[1] <= l2 + CAUSAL_SLACK
            }
            Spatial::Euclidean { lo, hi, .. } => x
                .iter()
                .all(|&v| v >= lo - CAUSAL_SLACK && v <= hi + CAUSAL_SLACK),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = match self {
            Spatial::Circle { circumference } => *circumference > 0.0,
            Spatial::FlatTorus { l1, l2 } => *l1 > 0.0 && *l2 > 0.0,
            Spatial::Euclidean { dim, lo, hi } => (1..=3).contains(dim) && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("invalid spatial factor {self:?}")))
        }
    }
}

/// The warping function `f(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Warp {
    Const { c: f64 },
    /// `f(t) = t`.
    Linear,
    /// `f(t) = 1 - t`.
    OneMinusT,
    /// `f(t) = 1 + a sin(ω t)`.
    Sinusoidal { a: f64, omega: f64 },
}

impl Warp {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Warp::Const { c } => c,
            Warp::Linear => t,
            Warp::OneMinusT => 1.0 - t,
            Warp::Sinusoidal { a, omega } => 1.0 + a * (omega * t).sin(),
        }
    }

    /// `∫_{t0}^{t1} ds / f(s)` for `t0 <= t1`: the spatial reach of a light
    /// ray over that interval.
    pub fn reach(&self, t0: f64, t1: f64) -> f64 {
        debug_assert!(t0 <= t1);
        match *self {
            Warp::Const { c } => (t1 - t0) / c,
            Warp::Linear => {
                if t0 <= 0.0 {
                    f64::INFINITY
                } else {
                    (t1 / t0).ln()
                }
            }
            Warp::OneMinusT => ((1.0 - t0) / (1.0 - t1)).ln(),
            Warp::Sinusoidal { .. } => {
                if t1 == t0 {
                    0.0
                } else {
                    adaptive_simpson(&|s| 1.0 / self.value(s), t0, t1, 1e-13)
                }
            }
        }
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Region {
    /// The whole slab over the time window.
    Strip,
    /// Timelike past of `apex` within the window.
    PastOfPoint { t: f64, x: Vec<f64> },
    /// Timelike past of the ring `{(3 τ_max, y) : |y| = R}` within `(0, τ_max)`:
    /// `| |x| - R | < 3 τ_max - t`.
    PastOfRing { radius: f64, tau_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub t: f64,
    pub x: Vec<f64>,
}

impl ModelPoint {
    pub fn new(t: f64, x: impl Into<Vec<f64>>) -> Self {
        Self { t, x: x.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeModel {
    kind: ModelKind,
    spatial: Spatial,
    warp: Warp,
    window: (f64, f64),
    region: Option<Region>,
}

/// model-v1 document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub schema: String,
    pub kind: ModelKind,
    pub spatial: Spatial,
    pub warp: Warp,
    pub window: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
}

impl SpacetimeModel {
    pub fn new(
        kind: ModelKind,
        spatial: Spatial,
        warp: Warp,
        window: (f64, f64),
        region: Option<Region>,
    ) -> Result<Self> {
        let model = Self {
            kind,
            spatial,
            warp,
            window,
            region,
        };
        model.check()?;
        Ok(model)
    }

    pub fn warped(spatial: Spatial, warp: Warp, window: (f64, f64)) -> Result<Self> {
        Self::new(ModelKind::WarpedProduct, spatial, warp, window, None)
    }

    pub fn minkowski(spatial: Spatial, window: (f64, f64), region: Region) -> Result<Self> {
        Self::new(
            ModelKind::MinkowskiRegion,
            spatial,
            Warp::Const { c: 1.0 },
            window,
            Some(region),
        )
    }

    fn check(&self) -> Result<()> {
        self.spatial.check()?;
        let (lo, hi) = self.window;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Argument(format!("time window ({lo}, {hi}) must satisfy 0 <= lo < hi")));
        }
        match self.warp {
            Warp::Const { c } if !(c > 0.0) => {
                return Err(Error::Argument(format!("const warp needs c > 0, got {c}")))
            }
            Warp::OneMinusT if hi >= 1.0 => {
                return Err(Error::Argument("one_minus_t warp needs window inside [0, 1)".into()))
            }
            Warp::Sinusoidal { a, omega } => {
                if !a.is_finite() || !omega.is_finite() {
                    return Err(Error::Argument("sinusoidal parameters must be finite".into()));
                }
                let samples = 4096;
                let min = (0..=samples)
                    .map(|k| self.warp.value(lo + (hi - lo) * k as f64 / samples as f64))
                    .fold(f64::INFINITY, f64::min);
                if min <= 1e-9 {
                    return Err(Error::Argument(format!(
                        "sinusoidal warp vanishes on the window (min {min:.3e})"
                    )));
                }
            }
            _ => {}
        }
        match (&self.kind, &self.region) {
            (ModelKind::WarpedProduct, Some(_)) => {
                return Err(Error::Argument("regions apply only to minkowski_region models".into()))
            }
            (ModelKind::MinkowskiRegion, None) => {
                return Err(Error::Argument("minkowski_region models need a region".into()))
            }
            (ModelKind::MinkowskiRegion, Some(region)) => {
                if !matches!(self.spatial, Spatial::Euclidean { .. }) || self.warp != (Warp::Const { c: 1.0 }) {
                    return Err(Error::Argument(
                        "regions need a euclidean spatial factor and warp const(1)".into(),
                    ));
                }
                match region {
                    Region::PastOfPoint { x, .. } if x.len() != self.spatial.dim() => {
                        return Err(Error::Argument("apex dimension mismatch".into()))
                    }
                    Region::PastOfRing { radius, tau_max } => {
                        if self.spatial.dim() < 2 {
                            return Err(Error::Argument(
                                "past_of_ring needs spatial dimension >= 2".into(),
                            ));
                        }
                        if !(*tau_max > 0.0 && 3.0 * tau_max < *radius) {
                            return Err(Error::Argument("past_of_ring needs 0 < 3 tau_max < R".into()));
                        }
                        if lo != 0.0 || hi > *tau_max {
                            return Err(Error::Argument(
                                "past_of_ring window must be (0, tau_max]".into(),
                            ));
                        }
                    }
                    _ => {}
                }
            }
            (ModelKind::WarpedProduct, None) => {}
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn spatial(&self) -> &Spatial {
        &self.spatial
    }

    pub fn warp(&self) -> Warp {
        self.warp
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn region(&self) -> Option<&Region> {
        self.region.as_ref()
    }

    /// Linear warp starting at `t = 0`: the window is open at the singular slice.
    pub fn is_big_bang(&self) -> bool {
        self.warp == Warp::Linear && self.window.0 == 0.0
    }

    fn time_ok(&self, t: f64) -> bool {
        let (lo, hi) = self.window;
        let above = if self.is_big_bang() {
            t > 0.0
        } else {
            t >= lo - CAUSAL_SLACK
        };
        above && t <= hi + CAUSAL_SLACK
    }

    fn region_test(&self, p: &ModelPoint) -> bool {
        match &self.region {
            None | Some(Region::Strip) => true,
            Some(Region::PastOfPoint { t, x }) => {
                let r: f64 = p.x.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                r < t - p.t
            }
            Some(Region::PastOfRing { radius, tau_max }) => {
                let r: f64 = p.x.iter().map(|a| a * a).sum::<f64>().sqrt();
                (r - radius).abs() < 3.0 * tau_max - p.t
            }
        }
    }

    /// Whether `p` lies in the model domain (window, spatial factor, region).
    pub fn contains(&self, p: &ModelPoint) -> bool {
        p.t.is_finite() && self.time_ok(p.t) && self.spatial.contains(&p.x) && self.region_test(p)
    }

    fn require(&self, p: &ModelPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("t={} x={:?}", p.t, p.x)))
        }
    }

    /// Cosmological time: `t - t_lo` for every catalog model.
    pub fn eval_tau(&self, p: &ModelPoint) -> Result<f64> {
        self.require(p)?;
        Ok((p.t - self.window.0).max(0.0))
    }

    /// Whether `q ∈ J⁻(p)`.
    pub fn is_causal(&self, p: &ModelPoint, q: &ModelPoint) -> Result<bool> {
        self.require(p)?;
        self.require(q)?;
        Ok(self.causal_unchecked(p, q))
    }

    pub(crate) fn causal_unchecked(&self, p: &ModelPoint, q: &ModelPoint) -> bool {
        if q.t > p.t + CAUSAL_SLACK {
            return false;
        }
        let spatial = self.spatial.distance(&p.x, &q.x);
        if q.t >= p.t {
            return spatial <= CAUSAL_SLACK;
        }
        let reach = self.warp.reach(q.t, p.t);
        if spatial > reach + CAUSAL_SLACK {
            return false;
        }
        if let Some(Region::PastOfRing { .. }) = self.region {
            // The ring region is not convex; approximate the segment test.
            let dx = self.spatial.displacement(&q.x, &p.x);
            for k in 1..=RING_SEGMENT_SAMPLES {
                let u = k as f64 / (RING_SEGMENT_SAMPLES + 1) as f64;
                let mid = ModelPoint {
                    t: q.t + u * (p.t - q.t),
                    x: q.x.iter().zip(&dx).map(|(a, d)| a + u * d).collect(),
                };
                if !self.region_test(&mid) {
                    return false;
                }
            }
        }
        true
    }

    /// Closed-form null distance where one is known, `None` otherwise.
    ///
    /// Known cases: causally related pairs (time difference); constant warps
    /// over a convex domain (`max(|Δt|, c·d_h)`); and same-level pairs of the
    /// linear warp on a circle, where the cheapest chain runs down the two past
    /// light cones until they meet (or until the bottom of the window, then
    /// along it).
    pub fn null_dist_oracle(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Option<f64>> {
        self.require(p)?;
        self.require(q)?;
        let (lo, _) = self.window;
        Ok(self.oracle_within(p, q, lo))
    }

    /// Null distance of the strip `s <= τ <= t` (times in cosmological-time
    /// units), computed with the strip's own chains.
    pub fn strip_null_dist_oracle(
        &self,
        p: &ModelPoint,
        q: &ModelPoint,
        s: f64,
        t: f64,
    ) -> Result<Option<f64>> {
        self.require(p)?;
        self.require(q)?;
        if !(s <= t) {
            return Err(Error::Argument(format!("strip [{s}, {t}] has s > t")));
        }
        let (tp, tq) = (self.eval_tau(p)?, self.eval_tau(q)?);
        if tp < s || tp > t || tq < s || tq > t {
            return Err(Error::Domain("points outside the strip".into()));
        }
        let bottom = self.window.0 + s;
        Ok(self.oracle_within(p, q, bottom))
    }

    fn oracle_within(&self, p: &ModelPoint, q: &ModelPoint, bottom: f64) -> Option<f64> {
        if self.causal_unchecked(p, q) {
            return Some(p.t - q.t);
        }
        if self.causal_unchecked(q, p) {
            return Some(q.t - p.t);
        }
        let convex = !matches!(self.region, Some(Region::PastOfRing { .. }));
        match self.warp {
            Warp::Const { c } if convex => {
                Some((p.t - q.t).abs().max(c * self.spatial.distance(&p.x, &q.x)))
            }
            Warp::Linear if matches!(self.spatial, Spatial::Circle { .. }) && (p.t - q.t).abs() <= CAUSAL_SLACK => {
                let level = 0.5 * (p.t + q.t);
                let sep = self.spatial.distance(&p.x, &q.x);
                Some(linear_same_level(level, sep, bottom))
            }
            _ => None,
        }
    }

    /// Lorentzian length of the straight coordinate segment from `q` up to
    /// `p`, by the midpoint rule with `n_quad` panels. Spacelike stretches
    /// of the segment contribute zero.
    pub fn proper_time_segment(&self, p: &ModelPoint, q: &ModelPoint, n_quad: usize) -> Result<f64> {
        if !self.is_causal(p, q)? {
            return Err(Error::Precondition(format!(
                "({}, {:?}) is not in the causal past of ({}, {:?})",
                q.t, q.x, p.t, p.x
            )));
        }
        Ok(self.proper_unchecked(p, q, n_quad.max(1)))
    }

    pub(crate) fn proper_unchecked(&self, p: &ModelPoint, q: &ModelPoint, n_quad: usize) -> f64 {
        let dt = p.t - q.t;
        let dx2: f64 = self
            .spatial
            .displacement(&q.x, &p.x)
            .iter()
            .map(|d| d * d)
            .sum();
        if dx2 == 0.0 {
            return dt;
        }
        if let Warp::Const { c } = self.warp {
            return (dt * dt - c * c * dx2).max(0.0).sqrt();
        }
        let h = 1.0 / n_quad as f64;
        (0..n_quad)
            .map(|k| {
                let t = q.t + (k as f64 + 0.5) * h * dt;
                let f = self.warp.value(t);
                (dt * dt - f * f * dx2).max(0.0).sqrt()
            })
            .sum::<f64>()
            * h
    }

    /// Region membership; only meaningful for `minkowski_region` models.
    pub fn region_contains(&self, p: &ModelPoint) -> Result<bool> {
        if self.kind != ModelKind::MinkowskiRegion {
            return Err(Error::Argument("region_contains needs a minkowski_region model".into()));
        }
        Ok(self.contains(p))
    }

    /// Upper bound on the null-distance diameter of a Minkowski region.
    ///
    /// For the ring region the bound is an over-estimate: half the outer
    /// circumference plus the annulus width plus the window height.
    pub fn region_diameter_bound(&self) -> Result<f64> {
        let (lo, hi) = self.window;
        match (&self.kind, &self.region) {
            (ModelKind::MinkowskiRegion, Some(Region::Strip)) => {
                let (dim, a, b) = match self.spatial {
                    Spatial::Euclidean { dim, lo, hi } => (dim, lo, hi),
                    _ => unreachable!("checked at construction"),
                };
                Ok((hi - lo).max((b - a) * (dim as f64).sqrt()))
            }
            (ModelKind::MinkowskiRegion, Some(Region::PastOfPoint { t, .. })) => {
                Ok((hi - lo).abs() + 2.0 * (t - lo))
            }
            (ModelKind::MinkowskiRegion, Some(Region::PastOfRing { radius, tau_max })) => {
                Ok(tau_max + PI * (radius + 3.0 * tau_max) + 6.0 * tau_max)
            }
            _ => Err(Error::Argument("region_diameter_bound needs a minkowski_region model".into())),
        }
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            schema: MODEL_SCHEMA.into(),
            kind: self.kind,
            spatial: self.spatial.clone(),
            warp: self.warp,
            window: [self.window.0, self.window.1],
            region: self.region.clone(),
        }
    }

    pub fn from_json(doc: ModelJson) -> Result<Self> {
        if doc.schema != MODEL_SCHEMA {
            return Err(Error::Structural(format!(
                "schema {:?}, expected {MODEL_SCHEMA:?}",
                doc.schema
            )));
        }
        Self::new(doc.kind, doc.spatial, doc.warp, (doc.window[0], doc.window[1]), doc.region)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Null distance between two points at warped time `level` on a circle with
/// warp `f(t) = t`, spatial separation `sep`, when chains may not go below
/// `bottom`.
///
/// A light ray descending from `level` to `s` sweeps the angle `ln(level/s)`,
/// and moving along the slice `t = s` costs `s` per radian. Dropping both
/// endpoints to `s` and crossing the remaining gap costs
/// `2(level - s) + s(sep - 2 ln(level/s))`, which decreases in `s` until the
/// two cones meet at `s = level·e^{-sep/2}`; there the cost is
/// `2·level·(1 - e^{-sep/2})`.
pub fn linear_same_level(level: f64, sep: f64, bottom: f64) -> f64 {
    let meet = level * (-sep / 2.0).exp();
    if bottom <= meet {
        2.0 * level * (1.0 - (-sep / 2.0).exp())
    } else {
        let s = bottom;
        2.0 * (level - s) + s * (sep - 2.0 * (level / s).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn circle_const() -> SpacetimeModel {
        SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))
            .unwrap()
    }

    fn circle_linear() -> SpacetimeModel {
        SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.3)).unwrap()
    }

    fn past_of_point() -> SpacetimeModel {
        SpacetimeModel::minkowski(
            Spatial::Euclidean { dim: 1, lo: -1.0, hi: 1.0 },
            (0.2, 0.9),
            Region::PastOfPoint { t: 1.0, x: vec![0.0] },
        )
        .unwrap()
    }

    #[test]
    fn tau_is_shifted_time() {
        assert_eq!(circle_const().eval_tau(&ModelPoint::new(0.7, [1.0])).unwrap(), 0.7);
        let m = past_of_point();
        assert!((m.eval_tau(&ModelPoint::new(0.5, [0.1])).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(circle_const().eval_tau(&ModelPoint::new(0.0, [0.0])).unwrap(), 0.0);
        assert!(circle_const().eval_tau(&ModelPoint::new(1.5, [0.0])).is_err());
        assert!(circle_linear().eval_tau(&ModelPoint::new(0.0, [0.0])).is_err());
    }

    #[test]
    fn linear_warp_past_cone() {
        let m = circle_linear();
        let p = ModelPoint::new(1.0, [0.0]);
        // 0.5 <= e^{-0.6} = 0.5488
        assert!(m.is_causal(&p, &ModelPoint::new(0.5, [0.6])).unwrap());
        assert!(!m.is_causal(&p, &ModelPoint::new(0.56, [0.6])).unwrap());
        assert!(m.is_causal(&p, &p).unwrap());
    }

    #[test]
    fn minkowski_outside_cone() {
        let m = SpacetimeModel::minkowski(
            Spatial::Euclidean { dim: 1, lo: -1.0, hi: 1.0 },
            (0.0, 1.0),
            Region::Strip,
        )
        .unwrap();
        assert!(!m.is_causal(&ModelPoint::new(0.5, [0.0]), &ModelPoint::new(0.2, [0.4])).unwrap());
        assert!(m.is_causal(&ModelPoint::new(0.5, [0.0]), &ModelPoint::new(0.2, [0.3])).unwrap());
    }

    #[test]
    fn product_oracle() {
        let m = circle_const();
        let d = m
            .null_dist_oracle(&ModelPoint::new(0.2, [0.0]), &ModelPoint::new(0.7, [FRAC_PI_2]))
            .unwrap()
            .unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        // causal pair: the time gap
        let d = m
            .null_dist_oracle(&ModelPoint::new(0.7, [0.3]), &ModelPoint::new(0.2, [0.0]))
            .unwrap()
            .unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn linear_warp_antipodal_values() {
        let m = circle_linear();
        let p = ModelPoint::new(1.0, [0.0]);
        let q = ModelPoint::new(1.0, [PI]);
        let ambient = m.null_dist_oracle(&p, &q).unwrap().unwrap();
        assert!((ambient - 2.0 * (1.0 - (-FRAC_PI_2).exp())).abs() < 1e-14);
        let strip = m.strip_null_dist_oracle(&p, &q, 0.5, 1.2).unwrap().unwrap();
        assert!((strip - (1.0 + 0.5 * (PI - 2.0 * 2f64.ln()))).abs() < 1e-14);
        assert!(strip > ambient);
    }

    #[test]
    fn linear_same_level_is_continuous_and_monotone() {
        let meet = (-FRAC_PI_2).exp();
        let below = linear_same_level(1.0, PI, meet - 1e-9);
        let above = linear_same_level(1.0, PI, meet + 1e-9);
        assert!((below - above).abs() < 1e-8);
        let mut last = linear_same_level(1.0, PI, meet);
        for k in 1..20 {
            let s = meet + (1.0 - meet) * k as f64 / 20.0;
            let v = linear_same_level(1.0, PI, s);
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn proper_time_examples() {
        let m = circle_const();
        let top = ModelPoint::new(0.7, [1.0]);
        assert!((m.proper_time_segment(&top, &ModelPoint::new(0.2, [1.0]), 64).unwrap() - 0.5).abs() < 1e-15);
        assert!(m.proper_time_segment(&top, &ModelPoint::new(0.2, [0.5]), 64).unwrap().abs() < 1e-7);
        assert!((m.proper_time_segment(&top, &ModelPoint::new(0.2, [0.7]), 64).unwrap() - 0.4).abs() < 1e-12);
        assert!(matches!(
            m.proper_time_segment(&top, &ModelPoint::new(0.2, [0.0]), 64),
            Err(Error::Precondition(_))
        ));
        // comoving in a non-constant warp
        let lin = circle_linear();
        let v = lin
            .proper_time_segment(&ModelPoint::new(1.0, [2.0]), &ModelPoint::new(0.5, [2.0]), 64)
            .unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn sinusoidal_reach_matches_closed_form() {
        let (a, omega) = (0.5, 2.0 * PI);
        let w = Warp::Sinusoidal { a, omega };
        // antiderivative of 1/(1 + a sin(ωt)) for |a| < 1
        let k = (1.0 - a * a).sqrt();
        let anti = |t: f64| {
            let u = omega * t;
            2.0 / (omega * k) * (((u / 2.0).tan() + a) / k).atan()
        };
        let v = w.reach(0.1, 0.4);
        assert!((v - (anti(0.4) - anti(0.1))).abs() < 1e-11);
    }

    #[test]
    fn region_predicates() {
        let m = past_of_point();
        assert!(m.region_contains(&ModelPoint::new(0.5, [0.4])).unwrap());
        assert!(!m.region_contains(&ModelPoint::new(0.5, [0.6])).unwrap());
        assert!((m.region_diameter_bound().unwrap() - 2.3).abs() < 1e-12);

        let ring = SpacetimeModel::minkowski(
            Spatial::Euclidean { dim: 2, lo: -14.0, hi: 14.0 },
            (0.0, 1.0),
            Region::PastOfRing { radius: 10.0, tau_max: 1.0 },
        )
        .unwrap();
        assert!(ring.region_contains(&ModelPoint::new(0.5, [10.2, 0.0])).unwrap());
        assert!(!ring.region_contains(&ModelPoint::new(0.5, [0.0, 0.0])).unwrap());
        assert!(ring.region_diameter_bound().unwrap() > 2.0 * 13.0);
        assert!(circle_const().region_contains(&ModelPoint::new(0.5, [0.0])).is_err());
    }

    #[test]
    fn invalid_models_rejected() {
        let circle = Spatial::Circle { circumference: 1.0 };
        assert!(SpacetimeModel::warped(circle.clone(), Warp::Const { c: 0.0 }, (0.0, 1.0)).is_err());
        assert!(SpacetimeModel::warped(circle.clone(), Warp::OneMinusT, (0.0, 1.0)).is_err());
        assert!(SpacetimeModel::warped(circle.clone(), Warp::Sinusoidal { a: 1.0, omega: 2.0 * PI }, (0.0, 1.0)).is_err());
        assert!(SpacetimeModel::warped(circle.clone(), Warp::Sinusoidal { a: 1.0, omega: 2.0 * PI }, (0.0, 0.5)).is_ok());
        assert!(SpacetimeModel::warped(circle, Warp::Linear, (0.5, 0.2)).is_err());
        assert!(SpacetimeModel::minkowski(Spatial::Circle { circumference: 1.0 }, (0.0, 1.0), Region::Strip).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let m = past_of_point();
        let text = serde_json::to_string(&m.to_json()).unwrap();
        assert!(text.contains("\"past_of_point\""));
        let back = SpacetimeModel::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
