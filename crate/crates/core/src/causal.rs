//! The causal order a timed metric space encodes: `q` lies in the causal past
//! of `p` exactly when the time gap equals the distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

/// `related(p, q)` means `q ∈ J⁻(p)`, equivalently `p ∈ J⁺(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalRelation {
    n: usize,
    pairs: Vec<bool>,
    eps: f64,
}

impl CausalRelation {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn related(&self, p: usize, q: usize) -> bool {
        self.pairs[p * self.n + q]
    }

    /// Number of ordered related pairs, diagonal included.
    pub fn count(&self) -> usize {
        self.pairs.iter().filter(|&&b| b).count()
    }
}

/// `R(p, q)` iff `τ(p) - τ(q) >= 0` and `|d(p, q) - (τ(p) - τ(q))| <= eps`.
pub fn causal_relation(space: &TimedMetricSpace, eps: f64) -> Result<CausalRelation> {
    if !(eps >= 0.0) {
        return Err(Error::Argument(format!("eps {eps} must be >= 0")));
    }
    let n = space.len();
    let mut pairs = vec![false; n * n];
    for p in 0..n {
        for q in 0..n {
            let gap = space.tau(p) - space.tau(q);
            pairs[p * n + q] = gap >= 0.0 && (space.dist(p, q) - gap).abs() <= eps;
        }
    }
    Ok(CausalRelation { n, pairs, eps })
}

/// How often a relation matches a reference predicate over ordered pairs
/// `p != q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub pairs: usize,
    pub agree: usize,
    pub fraction: f64,
}

pub fn agreement(rel: &CausalRelation, mut reference: impl FnMut(usize, usize) -> Result<bool>) -> Result<Agreement> {
    let n = rel.len();
    let mut agree = 0;
    for p in 0..n {
        for q in (0..n).filter(|&q| q != p) {
            if rel.related(p, q) == reference(p, q)? {
                agree += 1;
            }
        }
    }
    let pairs = n * n.saturating_sub(1);
    let fraction = if pairs == 0 { 1.0 } else { agree as f64 / pairs as f64 };
    Ok(Agreement { pairs, agree, fraction })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub violations: usize,
    /// First offending tuple found, in `(p, q[, r])` order.
    pub counterexample: Option<Vec<usize>>,
}

impl AxiomCheck {
    fn record(&mut self, at: &[usize]) {
        self.violations += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(at.to_vec());
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalAxiomsReport {
    pub eps: f64,
    pub reflexivity: AxiomCheck,
    pub transitivity: AxiomCheck,
    pub antisymmetry: AxiomCheck,
}

impl CausalAxiomsReport {
    /// At `eps = 0` every axiom must hold; with a positive tolerance the
    /// relation is only approximately transitive and violations are
    /// informational.
    pub fn ok(&self) -> bool {
        let all = self.reflexivity.passed() && self.transitivity.passed() && self.antisymmetry.passed();
        all || self.eps > 0.0
    }

    pub fn all_passed(&self) -> bool {
        self.reflexivity.passed() && self.transitivity.passed() && self.antisymmetry.passed()
    }
}

pub fn check_causal_axioms(rel: &CausalRelation, space: &TimedMetricSpace) -> CausalAxiomsReport {
    let n = rel.len();
    let mut reflexivity = AxiomCheck::default();
    let mut transitivity = AxiomCheck::default();
    let mut antisymmetry = AxiomCheck::default();
    for p in 0..n {
        if !rel.related(p, p) {
            reflexivity.record(&[p]);
        }
        for q in 0..n {
            if q == p || !rel.related(p, q) {
                continue;
            }
            if rel.related(q, p) {
                // Equal times at distance zero cannot occur in a definite space.
                let degenerate = space.tau(p) == space.tau(q) && space.dist(p, q) == 0.0;
                if p < q && !degenerate {
                    antisymmetry.record(&[p, q]);
                }
            }
            for r in 0..n {
                if r != q && rel.related(q, r) && !rel.related(p, r) {
                    transitivity.record(&[p, q, r]);
                }
            }
        }
    }
    CausalAxiomsReport {
        eps: rel.eps(),
        reflexivity,
        transitivity,
        antisymmetry,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::TimedMetricSpace;

    fn product_points(pts: &[(f64, f64)]) -> TimedMetricSpace {
        TimedMetricSpace::from_fn(
            TimedMetricSpace::default_ids(pts.len()),
            pts.iter().map(|p| p.0).collect(),
            |i, j| {
                let dx = (pts[i].1 - pts[j].1).abs();
                let dx = dx.min(std::f64::consts::TAU - dx);
                (pts[i].0 - pts[j].0).abs().max(dx)
            },
        )
        .unwrap()
    }

    #[test]
    fn product_model_pairs() {
        use std::f64::consts::FRAC_PI_2;
        let s = product_points(&[(0.7, 0.3), (0.2, 0.0), (0.7, FRAC_PI_2)]);
        let r = causal_relation(&s, 0.0).unwrap();
        assert!(r.related(0, 1));
        assert!(!r.related(1, 0));
        assert!(!r.related(2, 1));
        assert!((0..3).all(|i| r.related(i, i)));
    }

    #[test]
    fn agreement_counts_off_diagonal_pairs() {
        let s = product_points(&[(0.0, 0.0), (1.0, 0.0), (1.0, 2.0)]);
        let rel = causal_relation(&s, 0.0).unwrap();
        let same = agreement(&rel, |p, q| Ok(rel.related(p, q))).unwrap();
        assert_eq!((same.pairs, same.agree, same.fraction), (6, 6, 1.0));
        let none = agreement(&rel, |_, _| Ok(false)).unwrap();
        assert_eq!(none.agree, 6 - (rel.count() - 3));
    }

    #[test]
    fn negative_eps_rejected() {
        let s = product_points(&[(0.0, 0.0)]);
        assert!(causal_relation(&s, -1e-3).is_err());
    }

    #[test]
    fn single_point_passes() {
        let s = product_points(&[(0.0, 0.0)]);
        let r = causal_relation(&s, 0.0).unwrap();
        assert!(check_causal_axioms(&r, &s).all_passed());
    }

    #[test]
    fn eps_relation_reports_without_failing() {
        // noisy slice-to-slice distances make the eps relation non-transitive
        let pts: Vec<(f64, f64)> = (0..4)
            .flat_map(|t| (0..4).map(move |x| (t as f64 * 0.1, x as f64 * 0.09)))
            .collect();
        let s = product_points(&pts);
        let r = causal_relation(&s, 0.1).unwrap();
        let report = check_causal_axioms(&r, &s);
        assert!(report.transitivity.violations > 0);
        assert!(report.ok());
        assert!(!report.all_passed());
    }
}
