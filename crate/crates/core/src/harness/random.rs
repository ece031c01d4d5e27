//! Random timed metric spaces that are valid by construction.
//!
//! Points live in a plane with the sup metric and `τ` equal to (a multiple
//! of at most 1 of) the first coordinate, so the Lipschitz and triangle
//! conditions hold exactly.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::discretize::{augment_big_bang, mark_initial_set, BB_GUARD_RATIO};
use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

/// Distinct integer points, used where exact ties (and hence nontrivial
/// isometries) are wanted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub points: Vec<[i64; 2]>,
    pub side: i64,
}

impl Lattice {
    pub fn random<R: Rng>(rng: &mut R, n: usize, side: i64) -> Self {
        assert!(n as i64 <= side * side, "lattice too small");
        let mut all: Vec<[i64; 2]> = (0..side).flat_map(|a| (0..side).map(move |b| [a, b])).collect();
        all.shuffle(rng);
        all.truncate(n);
        Self { points: all, side }
    }

    /// Mirror image in the spatial axis; time is untouched.
    pub fn reflected(&self) -> Self {
        let points = self.points.iter().map(|p| [p[0], self.side - 1 - p[1]]).collect();
        Self { points, side: self.side }
    }

    /// The space with `τ = x₀ + offset` and distances scaled by `scale`.
    pub fn space(&self, offset: f64, scale: f64) -> TimedMetricSpace {
        let pts = &self.points;
        let tau = pts.iter().map(|p| scale * (p[0] as f64 + offset)).collect();
        TimedMetricSpace::from_fn(TimedMetricSpace::default_ids(pts.len()), tau, |i, j| {
            scale * (pts[i][0] - pts[j][0]).abs().max((pts[i][1] - pts[j][1]).abs()) as f64
        })
        .expect("lattice spaces are well formed")
    }
}

/// Continuous points in the unit square, `τ = c · x₀` with `c ∈ [0.5, 1]`.
pub fn random_box_space<R: Rng>(rng: &mut R, n: usize) -> TimedMetricSpace {
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let c = rng.gen_range(0.5..=1.0);
    let tau = pts.iter().map(|p| c * p[0]).collect();
    TimedMetricSpace::from_fn(TimedMetricSpace::default_ids(n), tau, |i, j| {
        (pts[i][0] - pts[j][0]).abs().max((pts[i][1] - pts[j][1]).abs())
    })
    .expect("box spaces are well formed")
}

/// Random reordering with fresh ids `q<i>`; flags travel with their points.
pub fn relabeled<R: Rng>(space: &TimedMetricSpace, rng: &mut R) -> TimedMetricSpace {
    let mut perm: Vec<usize> = (0..space.len()).collect();
    perm.shuffle(rng);
    let ids = (0..space.len()).map(|i| format!("q{i}")).collect();
    space.permuted(&perm).and_then(|s| s.with_ids(ids)).expect("permutation of a valid space")
}

/// `τ ↦ max τ - τ`, flags dropped.
pub fn time_flipped(space: &TimedMetricSpace) -> TimedMetricSpace {
    let hi = space.tau_range().map_or(0.0, |r| r.1);
    let tau = space.taus().iter().map(|t| hi - t).collect();
    TimedMetricSpace::new(space.ids().to_vec(), tau, space.dist_matrix().to_vec()).expect("same shape")
}

/// Smallest triangle slack `d(i,k) + d(k,j) - d(i,j)` over all `k`.
fn slack(space: &TimedMetricSpace, i: usize, j: usize) -> f64 {
    (0..space.len())
        .filter(|&k| k != i && k != j)
        .map(|k| space.dist(i, k) + space.dist(k, j) - space.dist(i, j))
        .fold(f64::INFINITY, f64::min)
}

/// Raises one distance by `delta` where the triangle inequality leaves room;
/// when no pair has that much slack, raises every distance from the point
/// of largest eccentricity instead (always valid). Returns the copy and the
/// pairs changed.
pub fn inflated(space: &TimedMetricSpace, delta: f64) -> Result<(TimedMetricSpace, Vec<(usize, usize)>)> {
    let n = space.len();
    if n < 2 {
        return Err(Error::Argument("need two points to inflate a distance".into()));
    }
    let best = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (slack(space, i, j), i, j))
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)).then(b.2.cmp(&a.2)))
        .expect("n >= 2");
    let mut dist = space.dist_matrix().to_vec();
    let changed = if best.0 >= delta {
        let (_, i, j) = best;
        dist[i * n + j] += delta;
        dist[j * n + i] += delta;
        vec![(i, j)]
    } else {
        let far = (0..n)
            .max_by(|&a, &b| {
                let ea = space.row(a).iter().copied().fold(0.0, f64::max);
                let eb = space.row(b).iter().copied().fold(0.0, f64::max);
                ea.total_cmp(&eb).then(b.cmp(&a))
            })
            .expect("n >= 2");
        let mut changed = Vec::new();
        for k in (0..n).filter(|&k| k != far) {
            dist[far * n + k] += delta;
            dist[k * n + far] += delta;
            changed.push((far.min(k), far.max(k)));
        }
        changed
    };
    Ok((TimedMetricSpace::new(space.ids().to_vec(), space.taus().to_vec(), dist)?, changed))
}

/// Lattice points at times `x₀ + 1` with the big-bang point appended.
pub fn big_bang_space(lattice: &Lattice, scale: f64) -> Result<TimedMetricSpace> {
    let base = lattice.space(1.0, scale);
    Ok(augment_big_bang(&base, BB_GUARD_RATIO, 1e-9, 1e-9)?.0)
}

/// Lattice points closed under projection to the bottom row, `τ = x₀`,
/// with the bottom row as initial set. `None` when the closure would exceed
/// `n_max` points.
pub fn future_developed_lattice<R: Rng>(rng: &mut R, n: usize, n_max: usize, side: i64) -> Option<Lattice> {
    let mut l = Lattice::random(rng, n, side);
    let feet: Vec<[i64; 2]> = l.points.iter().map(|p| [0, p[1]]).collect();
    for f in feet {
        if !l.points.contains(&f) {
            l.points.push(f);
        }
    }
    (l.points.len() <= n_max).then_some(l)
}

pub fn future_developed_space(lattice: &Lattice) -> Result<TimedMetricSpace> {
    Ok(mark_initial_set(&lattice.space(0.0, 1.0), 1e-12, 1e-9)?.0)
}
