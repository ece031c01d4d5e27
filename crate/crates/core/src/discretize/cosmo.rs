use super::CausalGraph;
use crate::error::{Error, Result};

/// Relative slack under which two chain lengths count as tied.
const TIE: f64 = 1e-12;

/// Longest-chain time of every node, with the predecessor realizing it.
#[derive(Debug, Clone, PartialEq)]
pub struct CosmoTime {
    pub values: Vec<f64>,
    pub parent: Vec<Option<usize>>,
}

/// Discrete cosmological time: the longest proper-time chain ending at each
/// node, starting from any node without predecessors (which get 0).
///
/// Ties between predecessors are broken by smallest spatial distance, then
/// lowest index, and the value is taken along the chosen predecessor so that
/// generators telescope exactly.
pub fn cosmological_time(g: &CausalGraph) -> Result<CosmoTime> {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.node(a).t.total_cmp(&g.node(b).t).then(a.cmp(&b)));
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let spatial = g.model().spatial();
    let mut values = vec![0.0; n];
    let mut parent = vec![None; n];
    for &p in &order {
        let mut best = f64::NEG_INFINITY;
        for (q, w) in g.preds(p) {
            if rank[q] >= rank[p] {
                return Err(Error::Internal(format!("causal edge n{q} -> n{p} does not increase time")));
            }
            best = best.max(values[q] + w);
        }
        if best == f64::NEG_INFINITY {
            continue;
        }
        let slack = TIE * (1.0 + best.abs());
        let here = &g.node(p).x;
        let chosen = g
            .preds(p)
            .filter(|&(q, w)| values[q] + w >= best - slack)
            .min_by(|&(a, _), &(b, _)| {
                spatial
                    .distance(here, &g.node(a).x)
                    .total_cmp(&spatial.distance(here, &g.node(b).x))
                    .then(a.cmp(&b))
            })
            .expect("at least one predecessor attains the maximum");
        values[p] = values[chosen.0] + chosen.1;
        parent[p] = Some(chosen.0);
    }
    Ok(CosmoTime { values, parent })
}

/// The chain of maximizing predecessors from `node` down to a node without
/// predecessors, `node` first.
pub fn generator(cosmo: &CosmoTime, node: usize) -> Vec<usize> {
    let mut chain = vec![node];
    let mut at = node;
    while let Some(q) = cosmo.parent[at] {
        chain.push(q);
        at = q;
    }
    chain
}
