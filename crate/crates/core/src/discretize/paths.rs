use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::CausalGraph;
use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over causal edges in both directions, weight `|Δτ|`. Nodes
/// outside `allowed` are never entered. Stops early once `target` settles.
fn dijkstra(g: &CausalGraph, source: usize, allowed: Option<&[bool]>, target: Option<usize>) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    let tau = g.taus();
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if Some(u) == target {
            break;
        }
        for v in g.neighbors(u) {
            if allowed.is_some_and(|a| !a[v]) {
                continue;
            }
            let nd = d + (tau[v] - tau[u]).abs();
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist
}

fn strip_mask(g: &CausalGraph, s: f64, t: f64) -> Result<Vec<bool>> {
    if !(s <= t) {
        return Err(Error::Argument(format!("strip [{s}, {t}] has s > t")));
    }
    Ok(g.taus().iter().map(|&x| x >= s && x <= t).collect())
}

/// Discrete null distance between two nodes, optionally inside the strip
/// `s <= τ <= t`.
pub fn null_distance_between(g: &CausalGraph, a: usize, b: usize, strip: Option<(f64, f64)>) -> Result<f64> {
    let mask = strip.map(|(s, t)| strip_mask(g, s, t)).transpose()?;
    if let Some(m) = &mask {
        if !m[a] || !m[b] {
            return Err(Error::Argument("endpoints outside the strip".into()));
        }
    }
    let d = dijkstra(g, a, mask.as_deref(), Some(b))[b];
    if d.is_infinite() {
        return Err(Error::Disconnected { from: format!("n{a}"), to: format!("n{b}") });
    }
    Ok(d)
}

/// Single-source discrete null distances; unreachable nodes are `+inf`.
pub fn null_distances_from(g: &CausalGraph, source: usize, strip: Option<(f64, f64)>) -> Result<Vec<f64>> {
    let mask = strip.map(|(s, t)| strip_mask(g, s, t)).transpose()?;
    Ok(dijkstra(g, source, mask.as_deref(), None))
}

fn matrix_on(g: &CausalGraph, keep: &[usize], mask: Option<&[bool]>) -> Result<Vec<f64>> {
    let k = keep.len();
    let rows: Vec<Vec<f64>> = keep
        .par_iter()
        .map(|&src| {
            let full = dijkstra(g, src, mask, None);
            keep.iter().map(|&j| full[j]).collect()
        })
        .collect();
    let mut dist = vec![0.0; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let v = rows[i][j].min(rows[j][i]);
            if v.is_infinite() {
                return Err(Error::Disconnected { from: format!("n{}", keep[i]), to: format!("n{}", keep[j]) });
            }
            dist[i * k + j] = v;
            dist[j * k + i] = v;
        }
    }
    Ok(dist)
}

/// All-pairs discrete null distance as a timed metric space (ids `n<i>`).
pub fn null_distance_matrix(g: &CausalGraph) -> Result<TimedMetricSpace> {
    let keep: Vec<usize> = (0..g.len()).collect();
    let dist = matrix_on(g, &keep, None)?;
    Ok(TimedMetricSpace::new(g.ids(), g.taus().to_vec(), dist)?
        .with_meta("source", "null_distance_matrix")
        .with_meta("window", g.window_radius()))
}

/// Null distance of the strip `s <= τ <= t` computed with chains that stay
/// inside the strip, time shifted by `-s`.
pub fn strip_null_distance(g: &CausalGraph, s: f64, t: f64) -> Result<TimedMetricSpace> {
    let mask = strip_mask(g, s, t)?;
    let keep: Vec<usize> = (0..g.len()).filter(|&i| mask[i]).collect();
    if keep.is_empty() {
        return Err(Error::Argument(format!("strip [{s}, {t}] contains no nodes")));
    }
    let dist = matrix_on(g, &keep, Some(&mask))?;
    let ids = g.ids();
    let space = TimedMetricSpace::new(
        keep.iter().map(|&i| ids[i].clone()).collect(),
        keep.iter().map(|&i| g.tau(i)).collect(),
        dist,
    )?
    .with_meta("source", "strip_null_distance")
    .with_meta("window", g.window_radius());
    space.restrict_strip(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_causal_graph, sample_graph, GridSpec};
    use crate::models::{ModelPoint, SpacetimeModel, Spatial, Warp};
    use crate::space::DISCRETE_TOL;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn const_circle() -> SpacetimeModel {
        SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0)).unwrap()
    }

    #[test]
    fn product_formula_on_fine_grid() {
        let m = const_circle();
        let g = sample_graph(&m, &GridSpec::new(41, 64), None).unwrap();
        let a = g.nearest(&ModelPoint::new(0.2, [0.0]));
        let b = g.nearest(&ModelPoint::new(0.7, [FRAC_PI_2]));
        let d = null_distance_between(&g, a, b, None).unwrap();
        let exact = m.null_dist_oracle(g.node(a), g.node(b)).unwrap().unwrap();
        // slope quantization of near-null edges costs a few percent here
        assert!((d - exact).abs() < 0.15, "{d} vs {exact}");
        assert!(d >= exact - 1e-12);
        assert!((exact - FRAC_PI_2).abs() < 0.05);
    }

    #[test]
    fn causal_pair_is_time_gap() {
        let m = const_circle();
        let g = sample_graph(&m, &GridSpec::new(9, 16), None).unwrap();
        let a = g.nearest(&ModelPoint::new(0.0, [0.0]));
        let b = g.nearest(&ModelPoint::new(1.0, [0.0]));
        let d = null_distance_between(&g, a, b, None).unwrap();
        assert!((d - (g.tau(b) - g.tau(a))).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_a_valid_space() {
        let g = sample_graph(&const_circle(), &GridSpec::new(6, 8), None).unwrap();
        let s = null_distance_matrix(&g).unwrap();
        assert!(s.validate(DISCRETE_TOL).is_valid(), "{}", s.validate(DISCRETE_TOL).summary());
    }

    #[test]
    fn full_strip_equals_ambient() {
        let g = sample_graph(&const_circle(), &GridSpec::new(6, 8), None).unwrap();
        let ambient = null_distance_matrix(&g).unwrap();
        let strip = strip_null_distance(&g, 0.0, 1.0).unwrap();
        assert_eq!(ambient.dist_matrix(), strip.dist_matrix());
        assert_eq!(ambient.taus(), strip.taus());
    }

    #[test]
    fn strip_never_shortens() {
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.0)).unwrap();
        let g = sample_graph(&m, &GridSpec::new(10, 12), None).unwrap();
        let ambient = null_distance_matrix(&g).unwrap().restrict_strip(0.45, 1.0).unwrap();
        let strip = strip_null_distance(&g, 0.45, 1.0).unwrap();
        assert_eq!(ambient.ids(), strip.ids());
        for (a, b) in ambient.dist_matrix().iter().zip(strip.dist_matrix()) {
            assert!(b >= a);
        }
        assert!(strip.dist_matrix().iter().zip(ambient.dist_matrix()).any(|(b, a)| b > a));
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        let m = const_circle();
        let nodes = vec![ModelPoint::new(0.0, [0.0]), ModelPoint::new(0.1, [3.0])];
        let g = build_causal_graph(&m, nodes, 0.5).unwrap();
        assert!(matches!(null_distance_matrix(&g), Err(Error::Disconnected { .. })));
    }
}
