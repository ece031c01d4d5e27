//! Certified lower/upper bounds for Gromov-Hausdorff-type distances between
//! timed metric spaces.
//!
//! Every operation minimizes an objective over correspondences (relations
//! with surjective projections). Small inputs are enumerated exhaustively;
//! larger inputs get an annealing search whose best correspondence is a
//! certified upper bound, paired with projection lower bounds.

mod levels;
mod search;

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::json::inf_f64;
use crate::space::TimedMetricSpace;
use search::{Kind, Problem, Solution};

pub use levels::{level_lp_gh, level_sup_gh, lp_normalized, strip_lp_gh, strip_sup_gh, LevelBins, StripGrid};

pub const BOUND_SCHEMA: &str = "bound-v1";
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_BUDGET: u64 = 10_000;
pub const DEFAULT_EXACT_MAX_N: usize = 4;
/// Exhaustive search refuses inputs larger than this.
pub const HARD_EXACT_MAX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    LocalSearch,
    Gluing,
    ProjectionLb,
}

/// Relation between the points of two spaces whose projections are both
/// surjective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>, n: usize, m: usize) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Argument("correspondence is empty".into()));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut hx = vec![false; n];
        let mut hy = vec![false; m];
        for &(a, b) in &pairs {
            if a >= n || b >= m {
                return Err(Error::Argument(format!("pair ({a}, {b}) out of range {n}x{m}")));
            }
            hx[a] = true;
            hy[b] = true;
        }
        if hx.contains(&false) || hy.contains(&false) {
            return Err(Error::Argument("correspondence is not surjective on both sides".into()));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn transposed(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    /// `max |d_X(x, x') - d_Y(y, y')|` over pairs of related pairs.
    pub fn distortion(&self, x: &TimedMetricSpace, y: &TimedMetricSpace) -> f64 {
        Problem::new(x, y, Kind::Gh).distortion(&self.pairs)
    }

    /// Timed-Hausdorff objective of this correspondence.
    pub fn tau_h_cost(&self, x: &TimedMetricSpace, y: &TimedMetricSpace) -> f64 {
        Problem::new(x, y, Kind::TauH).eval(&self.pairs).0
    }
}

/// Certified interval `lower <= d <= upper` with provenance of the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBound {
    pub schema: String,
    pub op: String,
    #[serde(with = "inf_f64")]
    pub lower: f64,
    #[serde(with = "inf_f64")]
    pub upper: f64,
    pub method: Vec<Method>,
    /// Index pairs (x, y) of the correspondence realizing `upper`.
    pub witness_pairs: Option<Vec<(usize, usize)>>,
    pub seed: u64,
    pub evals: u64,
    /// Content hashes of the two inputs, in call order.
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DistanceBound {
    fn new(op: &str, lower: f64, upper: f64, method: Vec<Method>, seed: u64) -> Self {
        Self {
            schema: BOUND_SCHEMA.into(),
            op: op.into(),
            lower,
            upper,
            method,
            witness_pairs: None,
            seed,
            evals: 0,
            inputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn constant(op: &str, value: f64, seed: u64) -> Self {
        Self::new(op, value, value, vec![Method::Brute], seed)
    }

    pub fn is_exact(&self) -> bool {
        self.method == [Method::Brute]
    }

    pub fn width(&self) -> f64 {
        if self.upper == self.lower {
            0.0
        } else {
            self.upper - self.lower
        }
    }

    pub fn witness(&self, x: &TimedMetricSpace, y: &TimedMetricSpace) -> Option<Result<Correspondence>> {
        self.witness_pairs.as_ref().map(|p| Correspondence::new(p.clone(), x.len(), y.len()))
    }

    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        crate::json::write_pretty(path, self, force)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if doc.schema != BOUND_SCHEMA {
            return Err(Error::Structural(format!("schema {:?}, expected {BOUND_SCHEMA:?}", doc.schema)));
        }
        Ok(doc)
    }

    fn transpose(mut self) -> Self {
        if let Some(p) = &mut self.witness_pairs {
            *p = p.iter().map(|&(a, b)| (b, a)).collect();
            p.sort_unstable();
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Inputs with at most this many points on both sides are enumerated.
    pub exact_max_n: usize,
    /// Objective evaluations allowed to the annealing search.
    pub budget: u64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { exact_max_n: DEFAULT_EXACT_MAX_N, budget: DEFAULT_BUDGET, seed: DEFAULT_SEED, restarts: 4 }
    }
}

impl SearchOptions {
    pub fn with_exact_max_n(mut self, n: usize) -> Self {
        self.exact_max_n = n;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn check(&self) -> Result<Vec<String>> {
        if self.budget == 0 {
            return Err(Error::Argument("search budget must be positive".into()));
        }
        if self.exact_max_n > HARD_EXACT_MAX_N {
            return Err(Error::Capability(format!(
                "exact_max_n {} exceeds the enumeration limit {HARD_EXACT_MAX_N}",
                self.exact_max_n
            )));
        }
        Ok(if self.exact_max_n > DEFAULT_EXACT_MAX_N {
            vec![format!("exact_max_n {} may enumerate slowly", self.exact_max_n)]
        } else {
            Vec::new()
        })
    }
}

/// Hausdorff distance between two finite sets of reals.
fn hausdorff_reals(a: &[f64], b: &[f64]) -> f64 {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let one_sided = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|&v| {
                let k = q.partition_point(|&w| w < v);
                let mut best = f64::INFINITY;
                if k < q.len() {
                    best = best.min(q[k] - v);
                }
                if k > 0 {
                    best = best.min(v - q[k - 1]);
                }
                best
            })
            .fold(0.0, f64::max)
    };
    one_sided(&a, &b).max(one_sided(&b, &a))
}

fn distance_values(s: &TimedMetricSpace) -> Vec<f64> {
    let n = s.len();
    let mut v = vec![0.0];
    for i in 0..n {
        v.extend_from_slice(&s.row(i)[i + 1..]);
    }
    v
}

fn eccentricities(s: &TimedMetricSpace) -> Vec<f64> {
    (0..s.len()).map(|i| s.row(i).iter().copied().fold(0.0, f64::max)).collect()
}

/// Lower bound on the Gromov-Hausdorff distance of nonempty spaces: half
/// the largest of the diameter gap and the Hausdorff distances between
/// distance-value sets and between eccentricity sets. Each of these is at
/// most the distortion of any correspondence.
pub fn gh_lower_bound(x: &TimedMetricSpace, y: &TimedMetricSpace) -> f64 {
    let diam = (x.diameter() - y.diameter()).abs();
    let values = hausdorff_reals(&distance_values(x), &distance_values(y));
    let ecc = hausdorff_reals(&eccentricities(x), &eccentricities(y));
    diam.max(values).max(ecc) / 2.0
}

/// Hausdorff distance between the sets of time values.
pub fn tau_lower_bound(x: &TimedMetricSpace, y: &TimedMetricSpace) -> f64 {
    hausdorff_reals(x.taus(), y.taus())
}

/// Orders the inputs by content hash so that `op(X, Y)` and `op(Y, X)` run
/// the identical computation.
fn canonical<'a>(
    x: &'a TimedMetricSpace,
    y: &'a TimedMetricSpace,
) -> (&'a TimedMetricSpace, &'a TimedMetricSpace, bool, Vec<String>) {
    let (hx, hy) = (x.content_hash(), y.content_hash());
    let inputs = vec![hx.clone(), hy.clone()];
    if hy < hx {
        (y, x, true, inputs)
    } else {
        (x, y, false, inputs)
    }
}

fn run(
    op: &str,
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    kind: Kind,
    opts: &SearchOptions,
    lower_of: impl Fn(&TimedMetricSpace, &TimedMetricSpace) -> f64,
) -> Result<DistanceBound> {
    let notes = opts.check()?;
    let (a, b, swapped, inputs) = canonical(x, y);
    let problem = Problem::new(a, b, kind);
    let exact = a.len().max(b.len()) <= opts.exact_max_n;
    let sol: Solution = if exact { problem.exact() } else { problem.search(opts.budget, opts.seed, opts.restarts) };
    let gluing = matches!(kind, Kind::Bb | Kind::Fd);
    let mut bound = if sol.exact && !gluing {
        DistanceBound::new(op, sol.value, sol.value, vec![Method::Brute], opts.seed)
    } else {
        let lower = lower_of(a, b).min(sol.value);
        let mut method = vec![if gluing {
            Method::Gluing
        } else {
            Method::LocalSearch
        }];
        if gluing && sol.exact {
            method.insert(0, Method::Brute);
        }
        method.push(Method::ProjectionLb);
        DistanceBound::new(op, lower, sol.value, method, opts.seed)
    };
    bound.witness_pairs = Some(sol.pairs);
    bound.evals = sol.evals;
    bound.inputs = inputs;
    bound.notes = notes;
    if !sol.searched {
        bound.notes.push("fixed candidate correspondences only; input too large for search".into());
    }
    Ok(if swapped { bound.transpose() } else { bound })
}

fn require_nonempty(op: &str, x: &TimedMetricSpace, y: &TimedMetricSpace) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Argument(format!("{op} needs nonempty inputs")));
    }
    Ok(())
}

/// Empty-vs-nonempty is `+inf`, empty-vs-empty is 0.
fn empty_policy(op: &str, x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions) -> Option<DistanceBound> {
    match (x.is_empty(), y.is_empty()) {
        (false, false) => None,
        (true, true) => Some(DistanceBound::constant(op, 0.0, opts.seed)),
        _ => Some(DistanceBound::constant(op, f64::INFINITY, opts.seed)),
    }
}

/// Gromov-Hausdorff distance, `½ inf_R dis(R)`.
pub fn gh(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions) -> Result<DistanceBound> {
    opts.check()?;
    if let Some(b) = empty_policy("gh", x, y, opts) {
        return Ok(b);
    }
    run("gh", x, y, Kind::Gh, opts, gh_lower_bound)
}

/// GH distance of the underlying metric spaces; τ is ignored.
pub fn timeless_sgh(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions) -> Result<DistanceBound> {
    let mut b = gh(x, y, opts)?;
    b.op = "timeless".into();
    Ok(b)
}

/// Hausdorff distance between Kuratowski images indexed by a common
/// correspondence, minimized over correspondences.
pub fn kappa_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions) -> Result<DistanceBound> {
    require_nonempty("kappa_gh", x, y)?;
    run("kappa_gh", x, y, Kind::Kappa, opts, gh_lower_bound)
}

/// Timed-Hausdorff distance: the Kuratowski cost with `|τ(x) - τ(y)|` as
/// an extra coordinate.
pub fn tau_h(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions) -> Result<DistanceBound> {
    require_nonempty("tau_h", x, y)?;
    run("tau_h", x, y, Kind::TauH, opts, |a, b| gh_lower_bound(a, b).max(tau_lower_bound(a, b)))
}

fn check_flag(s: &TimedMetricSpace, what: &str, present: bool, tol: f64) -> Result<()> {
    if !present {
        return Err(Error::Precondition(format!("input has no {what}")));
    }
    let report = s.validate(tol);
    if !report.is_valid() {
        return Err(Error::Precondition(format!("{what} invariant fails: {}", report.summary())));
    }
    Ok(())
}

/// Big-bang pointed distance, bounded above by gluing along a
/// correspondence: Hausdorff term plus the distance between basepoints.
pub fn bb_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions, tol: f64) -> Result<DistanceBound> {
    check_flag(x, "basepoint", x.basepoint().is_some(), tol)?;
    check_flag(y, "basepoint", y.basepoint().is_some(), tol)?;
    run("bb_gh", x, y, Kind::Bb, opts, |a, b| gh_lower_bound(a, b).max(tau_lower_bound(a, b)))
}

/// Future-developed distance, bounded above by gluing along a
/// correspondence: Hausdorff term plus the Hausdorff distance between the
/// initial sets.
pub fn fd_hh(x: &TimedMetricSpace, y: &TimedMetricSpace, opts: &SearchOptions, tol: f64) -> Result<DistanceBound> {
    check_flag(x, "initial set", x.initial_set().is_some(), tol)?;
    check_flag(y, "initial set", y.initial_set().is_some(), tol)?;
    run("fd_hh", x, y, Kind::Fd, opts, |a, b| gh_lower_bound(a, b).max(tau_lower_bound(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two(d: f64, tau: [f64; 2]) -> TimedMetricSpace {
        TimedMetricSpace::from_fn(TimedMetricSpace::default_ids(2), tau.to_vec(), |_, _| d).unwrap()
    }

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    fn sup_grid(points: &[[f64; 2]], tau_axis: usize) -> TimedMetricSpace {
        let ids = points.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
        let tau = points.iter().map(|p| p[tau_axis]).collect();
        TimedMetricSpace::from_fn(ids, tau, |i, j| {
            (points[i][0] - points[j][0]).abs().max((points[i][1] - points[j][1]).abs())
        })
        .unwrap()
    }

    fn t_to_x() -> (TimedMetricSpace, TimedMetricSpace) {
        let pts: Vec<[f64; 2]> = (0..2).flat_map(|a| (0..3).map(move |b| [a as f64, b as f64])).collect();
        let x = sup_grid(&pts, 0);
        let tr: Vec<[f64; 2]> = pts.iter().map(|p| [p[1], p[0]]).collect();
        (x, sup_grid(&tr, 0))
    }

    #[test]
    fn two_point_gh() {
        let b = gh(&two(1.0, [0.0, 1.0]), &two(3.0, [0.0, 1.0]), &opts()).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
        assert!(b.is_exact());
    }

    #[test]
    fn one_point_is_half_diameter() {
        let one = TimedMetricSpace::new(vec!["o".into()], vec![0.0], vec![0.0]).unwrap();
        let b = gh(&two(3.0, [0.0, 1.0]), &one, &opts()).unwrap();
        assert_eq!(b.upper, 1.5);
    }

    #[test]
    fn empty_policy_values() {
        let e = TimedMetricSpace::empty();
        let x = two(1.0, [0.0, 1.0]);
        assert_eq!(gh(&e, &e, &opts()).unwrap().upper, 0.0);
        let b = gh(&e, &x, &opts()).unwrap();
        assert!(b.lower.is_infinite() && b.upper.is_infinite());
        assert!(kappa_gh(&e, &x, &opts()).is_err());
        assert!(tau_h(&x, &e, &opts()).is_err());
    }

    #[test]
    fn kappa_on_two_points() {
        let b = kappa_gh(&two(1.0, [0.0, 1.0]), &two(3.0, [0.0, 1.0]), &opts()).unwrap();
        assert!(b.upper >= 1.0 && b.upper <= 2.0, "{b:?}");
    }

    #[test]
    fn tau_h_two_points() {
        let x = two(1.0, [0.0, 1.0]);
        let y = two(1.0, [0.0, 0.5]);
        let b = tau_h(&x, &y, &opts()).unwrap();
        assert!(tau_lower_bound(&x, &y) >= 0.5);
        assert_eq!(b.upper, 0.5);
        assert_eq!(b.lower, 0.5);
    }

    #[test]
    fn t_to_x_values() {
        let (x, y) = t_to_x();
        assert_eq!(x.len(), 6);
        let exact = SearchOptions::default().with_exact_max_n(6);
        let t = timeless_sgh(&x, &y, &exact).unwrap();
        assert_eq!((t.lower, t.upper), (0.0, 0.0));
        let h = tau_h(&x, &y, &exact).unwrap();
        assert_eq!((h.lower, h.upper), (1.0, 1.0));
        let searched = tau_h(&x, &y, &opts()).unwrap();
        assert_eq!((searched.lower, searched.upper), (1.0, 1.0));
        assert!(!searched.is_exact());
    }

    #[test]
    fn symmetric_intervals() {
        let (x, y) = t_to_x();
        let a = tau_h(&x, &y, &opts()).unwrap();
        let b = tau_h(&y, &x, &opts()).unwrap();
        assert_eq!((a.lower, a.upper), (b.lower, b.upper));
        let wa = a.witness(&x, &y).unwrap().unwrap();
        let wb = b.witness(&y, &x).unwrap().unwrap();
        assert_eq!(wa.transposed(), wb);
        assert_eq!(a.inputs, vec![x.content_hash(), y.content_hash()]);
        assert_eq!(b.inputs, vec![y.content_hash(), x.content_hash()]);
    }

    #[test]
    fn relabeled_copy_is_zero() {
        let (x, _) = t_to_x();
        let perm = [3, 0, 5, 1, 4, 2];
        let y = x.permuted(&perm).unwrap().with_ids(TimedMetricSpace::default_ids(6)).unwrap();
        for f in [gh, kappa_gh, tau_h] {
            let b = f(&x, &y, &opts()).unwrap();
            assert!(b.upper <= 1e-12, "{b:?}");
        }
    }

    #[test]
    fn witness_is_a_correspondence() {
        let (x, y) = t_to_x();
        let b = tau_h(&x, &y, &opts()).unwrap();
        let w = b.witness(&x, &y).unwrap().unwrap();
        assert_eq!(w.tau_h_cost(&x, &y), b.upper);
    }

    #[test]
    fn bad_options() {
        let x = two(1.0, [0.0, 1.0]);
        assert!(matches!(gh(&x, &x, &opts().with_budget(0)), Err(Error::Argument(_))));
        assert!(matches!(gh(&x, &x, &opts().with_exact_max_n(7)), Err(Error::Capability(_))));
        assert!(!gh(&x, &x, &opts().with_exact_max_n(5)).unwrap().notes.is_empty());
    }

    fn pointed(d: f64, tau: f64) -> TimedMetricSpace {
        // basepoint b and two points at time tau, distance d apart
        TimedMetricSpace::new(
            vec!["b".into(), "u".into(), "v".into()],
            vec![0.0, tau, tau],
            vec![0.0, tau, tau, tau, 0.0, d, tau, d, 0.0],
        )
        .unwrap()
        .with_basepoint(0)
        .unwrap()
    }

    #[test]
    fn bb_zero_on_copies_and_positive_on_scaling() {
        let x = pointed(1.0, 1.0);
        let y = x.permuted(&[2, 0, 1]).unwrap();
        let b = bb_gh(&x, &y, &opts(), 1e-9).unwrap();
        assert!(b.upper <= 1e-12, "{b:?}");
        let z = pointed(1.5, 1.5);
        let b = bb_gh(&x, &z, &opts(), 1e-9).unwrap();
        assert!(b.lower >= 0.5 - 1e-12, "{b:?}");
        assert!(b.lower <= b.upper);
        assert!(matches!(bb_gh(&x, &x.clone().without_flags(), &opts(), 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn fd_zero_on_copies() {
        let s = sup_grid(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]], 0);
        let s = s.with_initial_set(vec![0, 1]).unwrap();
        let b = fd_hh(&s, &s.permuted(&[3, 1, 2, 0]).unwrap(), &opts(), 1e-9).unwrap();
        assert!(b.upper <= 1e-12, "{b:?}");
        assert!(matches!(fd_hh(&s, &s.clone().without_flags(), &opts(), 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn bound_json_round_trip() {
        let e = TimedMetricSpace::empty();
        let b = gh(&e, &two(1.0, [0.0, 1.0]), &opts()).unwrap();
        let text = serde_json::to_string(&b).unwrap();
        assert!(text.contains("\"inf\""));
        let back: DistanceBound = serde_json::from_str(&text).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn reals_hausdorff() {
        assert_eq!(hausdorff_reals(&[0.0, 1.0], &[0.0, 1.0, 2.0]), 1.0);
        assert_eq!(hausdorff_reals(&[0.5], &[0.5]), 0.0);
    }
}
