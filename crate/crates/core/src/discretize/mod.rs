//! Sampling models into causal graphs.
//!
//! A [`CausalGraph`] stores, for every sampled node, the nodes in its causal
//! past that lie within a coordinate window. Shortest paths over these edges
//! (weight `|Δτ|`) give the discrete null distance; longest paths with
//! proper-time weights give the discrete cosmological time.

mod augment;
mod cosmo;
mod paths;

pub use augment::{augment_big_bang, mark_initial_set, BigBangGuard, InitialSetReport, BB_GUARD_RATIO, BB_ID};
pub use cosmo::{cosmological_time, generator, CosmoTime};
pub use paths::{
    null_distance_between, null_distance_matrix, null_distances_from, strip_null_distance,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::ops::Add;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::{ModelJson, ModelPoint, SpacetimeModel, DEFAULT_N_QUAD};

pub const CGRAPH_SCHEMA: &str = "cgraph-v1";

/// Default edge window, in grid cells.
pub const DEFAULT_WINDOW_CELLS: f64 = 4.0;

/// Regular product grid over a time range and the spatial domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nt: usize,
    /// Points per spatial axis; a single entry is used for every axis.
    pub nx: Vec<usize>,
    /// Sub-range of the model window to sample; the whole window if `None`.
    pub t_range: Option<(f64, f64)>,
    /// Uniform jitter as a fraction of the cell size (0 for a regular grid).
    pub jitter: f64,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(nt: usize, nx: usize) -> Self {
        Self {
            nt,
            nx: vec![nx],
            t_range: None,
            jitter: 0.0,
            seed: 0,
        }
    }

    pub fn with_t_range(mut self, lo: f64, hi: f64) -> Self {
        self.t_range = Some((lo, hi));
        self
    }

    pub fn with_jitter(mut self, jitter: f64, seed: u64) -> Self {
        self.jitter = jitter;
        self.seed = seed;
        self
    }

    fn axis_counts(&self, dim: usize) -> Result<Vec<usize>> {
        match self.nx.len() {
            1 => Ok(vec![self.nx[0]; dim]),
            k if k == dim => Ok(self.nx.clone()),
            k => Err(Error::Argument(format!("{k} spatial counts for dimension {dim}"))),
        }
    }

    /// Time slices and per-axis spatial coordinates of the unjittered grid.
    fn axes(&self, model: &SpacetimeModel) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let counts = self.axis_counts(model.spatial().dim())?;
        if self.nt < 2 || counts.iter().any(|&c| c < 2) {
            return Err(Error::Argument("nt and nx must be at least 2".into()));
        }
        let (wlo, whi) = model.window();
        let (lo, hi) = self.t_range.unwrap_or((wlo, whi));
        if !(lo < hi) || lo < wlo || hi > whi {
            return Err(Error::Argument(format!(
                "degenerate sampling range ({lo}, {hi}) for window ({wlo}, {whi})"
            )));
        }
        let nt = self.nt;
        let times: Vec<f64> = if model.is_big_bang() && lo == 0.0 {
            // never sample the singular slice
            (0..nt).map(|j| hi * (j + 1) as f64 / nt as f64).collect()
        } else {
            (0..nt)
                .map(|j| {
                    if j + 1 == nt {
                        hi
                    } else {
                        lo + (hi - lo) * j as f64 / (nt - 1) as f64
                    }
                })
                .collect()
        };
        let spatial = model.spatial();
        let bounds = spatial_bounds(spatial);
        let axes = counts
            .iter()
            .zip(bounds)
            .map(|(&c, (a, b, periodic))| {
                if periodic {
                    (0..c).map(|k| a + (b - a) * k as f64 / c as f64).collect()
                } else {
                    (0..c)
                        .map(|k| if k + 1 == c { b } else { a + (b - a) * k as f64 / (c - 1) as f64 })
                        .collect()
                }
            })
            .collect();
        Ok((times, axes))
    }
}

fn spatial_bounds(spatial: &crate::models::Spatial) -> Vec<(f64, f64, bool)> {
    use crate::models::Spatial;
    match *spatial {
        Spatial::Circle { circumference } => vec![(0.0, circumference, true)],
        Spatial::FlatTorus { l1, l2 } => vec![(0.0, l1, true), (0.0, l2, true)],
        Spatial::Euclidean { dim, lo, hi } => vec![(lo, hi, false); dim],
    }
}

fn cell_size(axis: &[f64], bound: (f64, f64, bool)) -> f64 {
    let (a, b, periodic) = bound;
    let n = axis.len() as f64;
    if periodic {
        (b - a) / n
    } else {
        (b - a) / (n - 1.0)
    }
}

/// Regular grid, time-major. Region models keep only points inside the region.
pub fn sample_grid(model: &SpacetimeModel, nt: usize, nx: usize) -> Result<Vec<ModelPoint>> {
    sample(model, &GridSpec::new(nt, nx))
}

pub fn sample(model: &SpacetimeModel, spec: &GridSpec) -> Result<Vec<ModelPoint>> {
    let (times, axes) = spec.axes(model)?;
    let bounds = spatial_bounds(model.spatial());
    let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let cells: Vec<f64> = axes.iter().zip(&bounds).map(|(a, &b)| cell_size(a, b)).collect();
    let (t_lo, t_hi) = (times[0], times[times.len() - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut jitter = |scale: f64| {
        if spec.jitter > 0.0 {
            rng.gen_range(-0.5..0.5) * spec.jitter * scale
        } else {
            0.0
        }
    };

    let mut out = Vec::new();
    let per_slice: usize = axes.iter().map(Vec::len).product();
    for &t in &times {
        for flat in 0..per_slice {
            let mut rem = flat;
            let mut x = vec![0.0; axes.len()];
            for k in (0..axes.len()).rev() {
                x[k] = axes[k][rem % axes[k].len()];
                rem /= axes[k].len();
            }
            let mut tj = t + jitter(dt);
            tj = tj.clamp(t_lo, t_hi);
            for (k, v) in x.iter_mut().enumerate() {
                let (a, b, periodic) = bounds[k];
                *v += jitter(cells[k]);
                *v = if periodic { a + (*v - a).rem_euclid(b - a) } else { v.clamp(a, b) };
            }
            let p = ModelPoint { t: tj, x };
            if model.contains(&p) {
                out.push(p);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Argument("grid has no points inside the model domain".into()));
    }
    Ok(out)
}

/// Diameter of one grid cell: `sqrt(dt² + Σ dx_k²)`.
pub fn cell_diameter(model: &SpacetimeModel, spec: &GridSpec) -> Result<f64> {
    let (times, axes) = spec.axes(model)?;
    let bounds = spatial_bounds(model.spatial());
    let dt = times[1] - times[0];
    Ok(axes
        .iter()
        .zip(bounds)
        .map(|(a, b)| cell_size(a, b).powi(2))
        .sum::<f64>()
        .add(dt * dt)
        .sqrt())
}

/// `DEFAULT_WINDOW_CELLS` cell diameters.
pub fn default_window(model: &SpacetimeModel, spec: &GridSpec) -> Result<f64> {
    Ok(DEFAULT_WINDOW_CELLS * cell_diameter(model, spec)?)
}

/// Sampled nodes with causal edges `q → p` for `q ∈ J⁻(p)`, `τ(q) < τ(p)`,
/// within a sup-norm coordinate window.
#[derive(Debug, Clone)]
pub struct CausalGraph {
    model: SpacetimeModel,
    nodes: Vec<ModelPoint>,
    tau: Vec<f64>,
    window_radius: f64,
    // incoming edges of node p: pred_idx[pred_off[p]..pred_off[p+1]]
    pred_off: Vec<usize>,
    pred_idx: Vec<u32>,
    pred_proper: Vec<f64>,
    succ_off: Vec<usize>,
    succ_idx: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub null_weight: f64,
    pub proper_weight: f64,
}

pub fn build_causal_graph(
    model: &SpacetimeModel,
    nodes: Vec<ModelPoint>,
    window_radius: f64,
) -> Result<CausalGraph> {
    build_causal_graph_with(model, nodes, window_radius, DEFAULT_N_QUAD)
}

pub fn build_causal_graph_with(
    model: &SpacetimeModel,
    nodes: Vec<ModelPoint>,
    window_radius: f64,
    n_quad: usize,
) -> Result<CausalGraph> {
    if !(window_radius > 0.0 && window_radius.is_finite()) {
        return Err(Error::Argument(format!("window radius {window_radius} must be > 0")));
    }
    if nodes.len() > u32::MAX as usize {
        return Err(Error::Capability("too many nodes".into()));
    }
    let tau = nodes.iter().map(|p| model.eval_tau(p)).collect::<Result<Vec<_>>>()?;

    let index = BucketIndex::new(model, &nodes, window_radius);
    let preds: Vec<Vec<(u32, f64)>> = (0..nodes.len())
        .into_par_iter()
        .map(|p| {
            let mut out: Vec<(u32, f64)> = Vec::new();
            index.for_each_near(&nodes[p], |q| {
                let (a, b) = (&nodes[p], &nodes[q]);
                if b.t < a.t && index.within(a, b) && model.causal_unchecked(a, b) {
                    out.push((q as u32, model.proper_unchecked(a, b, n_quad.max(1))));
                }
            });
            out.sort_unstable_by_key(|e| e.0);
            out
        })
        .collect();

    let n = nodes.len();
    let mut pred_off = Vec::with_capacity(n + 1);
    pred_off.push(0);
    let total: usize = preds.iter().map(Vec::len).sum();
    let mut pred_idx = Vec::with_capacity(total);
    let mut pred_proper = Vec::with_capacity(total);
    let mut out_degree = vec![0usize; n];
    for list in &preds {
        for &(q, w) in list {
            pred_idx.push(q);
            pred_proper.push(w);
            out_degree[q as usize] += 1;
        }
        pred_off.push(pred_idx.len());
    }
    drop(preds);
    let mut succ_off = Vec::with_capacity(n + 1);
    succ_off.push(0);
    for d in &out_degree {
        succ_off.push(succ_off.last().unwrap() + d);
    }
    let mut fill = succ_off[..n].to_vec();
    let mut succ_idx = vec![0u32; total];
    for p in 0..n {
        for &q in &pred_idx[pred_off[p]..pred_off[p + 1]] {
            succ_idx[fill[q as usize]] = p as u32;
            fill[q as usize] += 1;
        }
    }
    Ok(CausalGraph {
        model: model.clone(),
        nodes,
        tau,
        window_radius,
        pred_off,
        pred_idx,
        pred_proper,
        succ_off,
        succ_idx,
    })
}

/// Grid model, graph, and the spec that produced them in one call.
pub fn sample_graph(model: &SpacetimeModel, spec: &GridSpec, window_radius: Option<f64>) -> Result<CausalGraph> {
    let window = match window_radius {
        Some(w) => w,
        None => default_window(model, spec)?,
    };
    build_causal_graph(model, sample(model, spec)?, window)
}

impl CausalGraph {
    pub fn model(&self) -> &SpacetimeModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ModelPoint] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &ModelPoint {
        &self.nodes[i]
    }

    pub fn tau(&self, i: usize) -> f64 {
        self.tau[i]
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn edge_count(&self) -> usize {
        self.pred_idx.len()
    }

    /// Edges into `p`, as `(q, proper_weight)`.
    pub fn preds(&self, p: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.pred_off[p]..self.pred_off[p + 1];
        self.pred_idx[r.clone()]
            .iter()
            .zip(&self.pred_proper[r])
            .map(|(&q, &w)| (q as usize, w))
    }

    pub fn succs(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ_idx[self.succ_off[q]..self.succ_off[q + 1]]
            .iter()
            .map(|&p| p as usize)
    }

    /// Causal neighbors in either direction.
    pub(crate) fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.pred_idx[self.pred_off[v]..self.pred_off[v + 1]]
            .iter()
            .map(|&q| q as usize)
            .chain(self.succs(v))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.len()).flat_map(move |p| {
            self.preds(p).map(move |(q, w)| Edge {
                from: q,
                to: p,
                null_weight: self.tau[p] - self.tau[q],
                proper_weight: w,
            })
        })
    }

    /// Index of the node closest to `p` in the sup norm over `(t, x)`.
    pub fn nearest(&self, p: &ModelPoint) -> usize {
        let spatial = self.model.spatial();
        let key = |q: &ModelPoint| {
            spatial
                .displacement(&p.x, &q.x)
                .iter()
                .fold((q.t - p.t).abs(), |m, d| m.max(d.abs()))
        };
        (0..self.len())
            .min_by(|&a, &b| key(&self.nodes[a]).total_cmp(&key(&self.nodes[b])).then(a.cmp(&b)))
            .expect("graphs are nonempty")
    }

    pub fn ids(&self) -> Vec<String> {
        (0..self.len()).map(|i| format!("n{i}")).collect()
    }

    pub fn to_json(&self) -> CGraphJson {
        let ids = self.ids();
        CGraphJson {
            schema: CGRAPH_SCHEMA.into(),
            model: self.model.to_json(),
            window: self.window_radius,
            nodes: self
                .nodes
                .iter()
                .zip(&self.tau)
                .zip(&ids)
                .map(|((p, &tau), id)| NodeJson {
                    id: id.clone(),
                    t: p.t,
                    x: p.x.clone(),
                    tau,
                })
                .collect(),
            edges: self
                .edges()
                .map(|e| EdgeJson {
                    from: ids[e.from].clone(),
                    to: ids[e.to].clone(),
                    w_null: e.null_weight,
                    w_proper: e.proper_weight,
                })
                .collect(),
        }
    }

    /// Rebuilds the graph from its export, keeping the stored edge set.
    pub fn from_json(doc: CGraphJson) -> Result<Self> {
        if doc.schema != CGRAPH_SCHEMA {
            return Err(Error::Structural(format!("schema {:?}, expected {CGRAPH_SCHEMA:?}", doc.schema)));
        }
        let model = SpacetimeModel::from_json(doc.model)?;
        let pos: HashMap<&str, usize> =
            doc.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let nodes: Vec<ModelPoint> = doc.nodes.iter().map(|n| ModelPoint::new(n.t, n.x.clone())).collect();
        let tau: Vec<f64> = doc.nodes.iter().map(|n| n.tau).collect();
        let n = nodes.len();
        let mut preds: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for e in &doc.edges {
            let lookup = |id: &str| {
                pos.get(id)
                    .copied()
                    .ok_or_else(|| Error::Structural(format!("edge endpoint {id:?} unknown")))
            };
            let (q, p) = (lookup(&e.from)?, lookup(&e.to)?);
            preds[p].push((q as u32, e.w_proper));
        }
        let mut pred_off = vec![0];
        let mut pred_idx = Vec::new();
        let mut pred_proper = Vec::new();
        let mut out_degree = vec![0usize; n];
        for list in &mut preds {
            list.sort_unstable_by_key(|e| e.0);
            for &(q, w) in list.iter() {
                pred_idx.push(q);
                pred_proper.push(w);
                out_degree[q as usize] += 1;
            }
            pred_off.push(pred_idx.len());
        }
        let mut succ_off = vec![0];
        for d in &out_degree {
            succ_off.push(succ_off.last().unwrap() + d);
        }
        let mut fill = succ_off[..n].to_vec();
        let mut succ_idx = vec![0u32; pred_idx.len()];
        for p in 0..n {
            for &q in &pred_idx[pred_off[p]..pred_off[p + 1]] {
                succ_idx[fill[q as usize]] = p as u32;
                fill[q as usize] += 1;
            }
        }
        Ok(Self {
            model,
            nodes,
            tau,
            window_radius: doc.window,
            pred_off,
            pred_idx,
            pred_proper,
            succ_off,
            succ_idx,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        crate::json::write_pretty(path, &self.to_json(), force)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CGraphJson {
    pub schema: String,
    pub model: ModelJson,
    pub window: f64,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: String,
    pub t: f64,
    pub x: Vec<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    pub w_null: f64,
    pub w_proper: f64,
}

/// Uniform buckets of side `radius` over `(t, x)`, wrapping periodic axes.
struct BucketIndex {
    radius: f64,
    origin: Vec<f64>,
    // bucket count per axis for periodic axes, None otherwise
    wrap: Vec<Option<(f64, i64)>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    spatial: crate::models::Spatial,
}

impl BucketIndex {
    fn new(model: &SpacetimeModel, nodes: &[ModelPoint], radius: f64) -> Self {
        let mut wrap = vec![None];
        for period in model.spatial().periods() {
            wrap.push(period.map(|l| (l, ((l / radius).floor() as i64).max(1))));
        }
        let dims = wrap.len();
        let mut origin = vec![f64::INFINITY; dims];
        for p in nodes {
            origin[0] = origin[0].min(p.t);
            for (k, &v) in p.x.iter().enumerate() {
                origin[k + 1] = origin[k + 1].min(v);
            }
        }
        let mut index = Self {
            radius,
            origin,
            wrap,
            buckets: HashMap::new(),
            spatial: model.spatial().clone(),
        };
        for (i, p) in nodes.iter().enumerate() {
            let key = index.key(p);
            index.buckets.entry(key).or_default().push(i);
        }
        index
    }

    fn coord(p: &ModelPoint, k: usize) -> f64 {
        if k == 0 {
            p.t
        } else {
            p.x[k - 1]
        }
    }

    fn key(&self, p: &ModelPoint) -> Vec<i64> {
        (0..self.wrap.len())
            .map(|k| {
                let v = Self::coord(p, k);
                match self.wrap[k] {
                    Some((l, nb)) => (((v.rem_euclid(l)) / l * nb as f64).floor() as i64).min(nb - 1),
                    None => ((v - self.origin[k]) / self.radius).floor() as i64,
                }
            })
            .collect()
    }

    fn for_each_near(&self, p: &ModelPoint, mut f: impl FnMut(usize)) {
        let center = self.key(p);
        let offsets: Vec<Vec<i64>> = (0..center.len())
            .map(|k| {
                let mut v: Vec<i64> = (-1..=1)
                    .map(|d| match self.wrap[k] {
                        Some((_, nb)) => (center[k] + d).rem_euclid(nb),
                        None => center[k] + d,
                    })
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let mut key = vec![0i64; center.len()];
        let mut counters = vec![0usize; center.len()];
        loop {
            for k in 0..key.len() {
                key[k] = offsets[k][counters[k]];
            }
            if let Some(list) = self.buckets.get(&key) {
                list.iter().for_each(|&i| f(i));
            }
            let mut k = 0;
            loop {
                if k == counters.len() {
                    return;
                }
                counters[k] += 1;
                if counters[k] < offsets[k].len() {
                    break;
                }
                counters[k] = 0;
                k += 1;
            }
        }
    }

    fn within(&self, a: &ModelPoint, b: &ModelPoint) -> bool {
        let r = self.radius * (1.0 + 1e-12);
        (a.t - b.t).abs() <= r && self.spatial.displacement(&a.x, &b.x).iter().all(|d| d.abs() <= r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Region, Spatial, Warp};
    use std::f64::consts::TAU;

    fn const_circle() -> SpacetimeModel {
        SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0)).unwrap()
    }

    #[test]
    fn grid_counts() {
        assert_eq!(sample_grid(&const_circle(), 4, 4).unwrap().len(), 16);
        let cone = SpacetimeModel::minkowski(
            Spatial::Euclidean { dim: 1, lo: -1.0, hi: 1.0 },
            (0.2, 0.9),
            Region::PastOfPoint { t: 1.0, x: vec![0.0] },
        )
        .unwrap();
        assert!(sample_grid(&cone, 8, 8).unwrap().len() < 64);
        assert!(sample_grid(&const_circle(), 1, 4).is_err());
    }

    #[test]
    fn big_bang_grid_skips_the_singular_slice() {
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.0)).unwrap();
        let pts = sample_grid(&m, 8, 4).unwrap();
        let lowest = pts.iter().map(|p| p.t).fold(f64::INFINITY, f64::min);
        assert_eq!(lowest, 0.125);
        assert_eq!(pts.iter().map(|p| p.t).fold(0.0, f64::max), 1.0);
    }

    #[test]
    fn level_count_on_eight_grid() {
        let pts = sample_grid(&const_circle(), 8, 8).unwrap();
        // 8 slices over [0, 1] have spacing 1/7; pick one that exists
        let t = pts[8 * 3].t;
        assert_eq!(pts.iter().filter(|p| (p.t - t).abs() <= 0.01).count(), 8);
    }

    #[test]
    fn edge_weights() {
        let m = const_circle();
        let nodes = vec![
            ModelPoint::new(0.25, [1.0]),
            ModelPoint::new(0.5, [1.0]),
            ModelPoint::new(0.5, [1.25]),
            ModelPoint::new(0.5, [2.0]),
        ];
        let g = build_causal_graph(&m, nodes, 1.0).unwrap();
        let edges: Vec<Edge> = g.edges().collect();
        assert_eq!(edges.len(), 2);
        let comoving = edges.iter().find(|e| e.to == 1).unwrap();
        assert_eq!(comoving.null_weight, 0.25);
        assert_eq!(comoving.proper_weight, 0.25);
        let null = edges.iter().find(|e| e.to == 2).unwrap();
        assert_eq!(null.null_weight, 0.25);
        assert!(null.proper_weight.abs() < 1e-6);
    }

    #[test]
    fn window_limits_edges() {
        let m = const_circle();
        let nodes = vec![ModelPoint::new(0.0, [0.0]), ModelPoint::new(1.0, [0.0])];
        assert_eq!(build_causal_graph(&m, nodes.clone(), 0.5).unwrap().edge_count(), 0);
        assert_eq!(build_causal_graph(&m, nodes, 1.0).unwrap().edge_count(), 1);
    }

    #[test]
    fn bucketed_edges_match_brute_force() {
        let m = SpacetimeModel::warped(
            Spatial::FlatTorus { l1: 1.0, l2: 0.7 },
            Warp::Sinusoidal { a: 0.3, omega: 5.0 },
            (0.0, 1.0),
        )
        .unwrap();
        let spec = GridSpec { nt: 6, nx: vec![5, 4], t_range: None, jitter: 0.3, seed: 7 };
        let nodes = sample(&m, &spec).unwrap();
        let r = 0.3;
        let g = build_causal_graph(&m, nodes.clone(), r).unwrap();
        let mut expected = 0;
        for a in &nodes {
            for b in &nodes {
                let close = (a.t - b.t).abs() <= r
                    && m.spatial().displacement(&a.x, &b.x).iter().all(|d| d.abs() <= r);
                if b.t < a.t && close && m.is_causal(a, b).unwrap() {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.edge_count(), expected);
    }

    #[test]
    fn graph_json_round_trip() {
        let m = const_circle();
        let g = sample_graph(&m, &GridSpec::new(4, 6), None).unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back = CausalGraph::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.edge_count(), g.edge_count());
        assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}
