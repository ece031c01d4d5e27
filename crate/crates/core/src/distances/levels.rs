//! Level-set and strip variants: GH between slices of the time function.

use super::{gh, DistanceBound, Method, SearchOptions};
use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

fn joint_range(x: &TimedMetricSpace, y: &TimedMetricSpace) -> Result<(f64, f64)> {
    match (x.tau_range(), y.tau_range()) {
        (Some((a, b)), Some((c, d))) => Ok((a.min(c), b.max(d))),
        (Some(r), None) | (None, Some(r)) => Ok(r),
        (None, None) => Err(Error::Argument("both inputs are empty".into())),
    }
}

/// Level bins: the slice `|τ - c| <= half_width` around each center, and
/// the integration weight `width` each bin carries in the ℓp sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBins {
    pub centers: Vec<f64>,
    pub half_width: f64,
    pub width: f64,
}

impl LevelBins {
    pub fn new(centers: Vec<f64>, half_width: f64, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Argument("no bins".into()));
        }
        if !(half_width >= 0.0) || !(width > 0.0) || centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument(format!("bad bins: half_width {half_width}, width {width}")));
        }
        Ok(Self { centers, half_width, width })
    }

    /// `count` equal bins tiling the joint time range.
    pub fn covering(x: &TimedMetricSpace, y: &TimedMetricSpace, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Argument("no bins".into()));
        }
        let (lo, hi) = joint_range(x, y)?;
        let w = (hi - lo) / count as f64;
        let centers = (0..count).map(|k| lo + (k as f64 + 0.5) * w).collect();
        // slack keeps the range endpoints inside the outer bins
        let half = w / 2.0 + 1e-12 * (1.0 + hi.abs());
        Self::new(centers, half, if w > 0.0 { w } else { 1.0 })
    }

    /// One bin per distinct time value (merged within `tol`), with width
    /// `range / count` (1 for a single level).
    pub fn levels(x: &TimedMetricSpace, y: &TimedMetricSpace, tol: f64) -> Result<Self> {
        let mut all: Vec<f64> = x.taus().iter().chain(y.taus()).copied().collect();
        all.sort_by(f64::total_cmp);
        let mut centers: Vec<f64> = Vec::new();
        for t in all {
            if centers.last().map_or(true, |&c| t - c > tol) {
                centers.push(t);
            }
        }
        let (lo, hi) = joint_range(x, y)?;
        let w = if hi > lo { (hi - lo) / centers.len() as f64 } else { 1.0 };
        Self::new(centers, tol, w)
    }

    fn check_cover(&self, x: &TimedMetricSpace, y: &TimedMetricSpace) -> Result<()> {
        for &t in x.taus().iter().chain(y.taus()) {
            if !self.centers.iter().any(|&c| (t - c).abs() <= self.half_width) {
                return Err(Error::Argument(format!("bins do not cover τ = {t}")));
            }
        }
        Ok(())
    }
}

/// `(s, t)` pairs with `s <= t` and the area weight each carries in the ℓp
/// double sum.
#[derive(Debug, Clone, PartialEq)]
pub struct StripGrid {
    pub pairs: Vec<(f64, f64)>,
    pub weight: f64,
}

impl StripGrid {
    pub fn new(pairs: Vec<(f64, f64)>, weight: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Argument("empty strip grid".into()));
        }
        if let Some(&(s, t)) = pairs.iter().find(|(s, t)| !(s <= t)) {
            return Err(Error::Argument(format!("strip pair ({s}, {t}) has s > t")));
        }
        if !(weight > 0.0) {
            return Err(Error::Argument(format!("strip weight {weight} must be positive")));
        }
        Ok(Self { pairs, weight })
    }

    /// All pairs `s <= t` from `count + 1` equally spaced times spanning the
    /// joint range, weight `h²`.
    pub fn regular(x: &TimedMetricSpace, y: &TimedMetricSpace, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Argument("empty strip grid".into()));
        }
        let (lo, hi) = joint_range(x, y)?;
        let h = (hi - lo) / count as f64;
        let at = |k: usize| if k == count { hi } else { lo + k as f64 * h };
        let pairs = (0..=count).flat_map(|i| (i..=count).map(move |j| (at(i), at(j)))).collect();
        Self::new(pairs, if h > 0.0 { h * h } else { 1.0 })
    }
}

struct Slices {
    lower: Vec<f64>,
    upper: Vec<f64>,
    methods: Vec<Method>,
    evals: u64,
}

fn slice_bounds(
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    opts: &SearchOptions,
    cut: impl Fn(&TimedMetricSpace, usize) -> Result<TimedMetricSpace>,
    count: usize,
) -> Result<Slices> {
    let mut out = Slices { lower: Vec::new(), upper: Vec::new(), methods: Vec::new(), evals: 0 };
    for k in 0..count {
        let b = gh(&cut(x, k)?, &cut(y, k)?, opts)?;
        out.lower.push(b.lower);
        out.upper.push(b.upper);
        out.evals += b.evals;
        for m in b.method {
            if !out.methods.contains(&m) {
                out.methods.push(m);
            }
        }
    }
    if out.methods.len() > 1 {
        out.methods.retain(|&m| m != Method::Brute);
    }
    Ok(out)
}

fn finish(op: &str, x: &TimedMetricSpace, y: &TimedMetricSpace, lower: f64, upper: f64, s: Slices, opts: &SearchOptions) -> DistanceBound {
    let mut b = DistanceBound::new(op, lower, upper, s.methods, opts.seed);
    b.evals = s.evals;
    b.inputs = vec![x.content_hash(), y.content_hash()];
    b
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn lp_sum(v: &[f64], p: f64, weight: f64) -> f64 {
    v.iter().map(|g| weight * g.powf(p)).sum()
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Argument(format!("p = {p} must be a finite real >= 1")));
    }
    Ok(())
}

/// `sup` over bins of the GH distance between level slices. An empty slice
/// on one side only contributes `+inf`.
pub fn level_sup_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, bins: &LevelBins, opts: &SearchOptions) -> Result<DistanceBound> {
    bins.check_cover(x, y)?;
    let s = slice_bounds(x, y, opts, |sp, k| sp.restrict_level(bins.centers[k], bins.half_width), bins.centers.len())?;
    Ok(finish("level_sup", x, y, max_of(&s.lower), max_of(&s.upper), s, opts))
}

/// `Σ width · gh^p` over bins, with no p-th root.
pub fn level_lp_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, p: f64, bins: &LevelBins, opts: &SearchOptions) -> Result<DistanceBound> {
    check_p(p)?;
    bins.check_cover(x, y)?;
    let s = slice_bounds(x, y, opts, |sp, k| sp.restrict_level(bins.centers[k], bins.half_width), bins.centers.len())?;
    let (lo, hi) = (lp_sum(&s.lower, p, bins.width), lp_sum(&s.upper, p, bins.width));
    Ok(finish("level_lp", x, y, lo, hi, s, opts))
}

/// `sup` over grid pairs of the GH distance between strips `s <= τ <= t`,
/// restricted with ambient distances.
pub fn strip_sup_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, grid: &StripGrid, opts: &SearchOptions) -> Result<DistanceBound> {
    let s = slice_bounds(x, y, opts, |sp, k| sp.restrict_strip(grid.pairs[k].0, grid.pairs[k].1), grid.pairs.len())?;
    Ok(finish("strip_sup", x, y, max_of(&s.lower), max_of(&s.upper), s, opts))
}

/// `Σ weight · gh^p` over grid pairs, with no p-th root.
pub fn strip_lp_gh(x: &TimedMetricSpace, y: &TimedMetricSpace, p: f64, grid: &StripGrid, opts: &SearchOptions) -> Result<DistanceBound> {
    check_p(p)?;
    let s = slice_bounds(x, y, opts, |sp, k| sp.restrict_strip(grid.pairs[k].0, grid.pairs[k].1), grid.pairs.len())?;
    let (lo, hi) = (lp_sum(&s.lower, p, grid.weight), lp_sum(&s.upper, p, grid.weight));
    Ok(finish("strip_lp", x, y, lo, hi, s, opts))
}

/// Normalized form `(value / total_weight)^(1/p)` of an ℓp bound.
pub fn lp_normalized(bound: &DistanceBound, p: f64, total_weight: f64) -> Result<DistanceBound> {
    check_p(p)?;
    if !(total_weight > 0.0) {
        return Err(Error::Argument(format!("total weight {total_weight} must be positive")));
    }
    let mut b = bound.clone();
    b.lower = (b.lower / total_weight).powf(1.0 / p);
    b.upper = (b.upper / total_weight).powf(1.0 / p);
    b.notes.push(format!("normalized: (sum / {total_weight})^(1/{p})"));
    Ok(b)
}
