use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

pub const BB_ID: &str = "p_BB";

/// Heuristic check that a space looks like it emanates from a single point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigBangGuard {
    /// Diameter of the points at minimal time.
    pub min_level_diameter: f64,
    pub diameter: f64,
    /// Flag when `min_level_diameter > ratio * diameter`.
    pub ratio: f64,
    pub flagged: bool,
    /// Pairs whose distance shrank to `τ(x) + τ(y)` by passing through the new point.
    pub shortcut_pairs: usize,
}

/// Default `ratio` for [`augment_big_bang`].
pub const BB_GUARD_RATIO: f64 = 0.25;

/// Adds the point `p_BB` with `τ = 0` and `d(p_BB, x) = τ(x)`, makes it the
/// basepoint, and validates the result.
///
/// Chains may pass through the new point, so every distance becomes
/// `min(d(x, y), τ(x) + τ(y))`; the count of shortened pairs is reported.
/// `level_tol` decides which points share the minimal time for the guard.
pub fn augment_big_bang(
    space: &TimedMetricSpace,
    ratio: f64,
    level_tol: f64,
    tol: f64,
) -> Result<(TimedMetricSpace, BigBangGuard)> {
    let n = space.len();
    if n == 0 {
        return Err(Error::Argument("cannot augment an empty space".into()));
    }
    if space.index_of(BB_ID).is_some() {
        return Err(Error::Argument(format!("space already has a point named {BB_ID}")));
    }
    let m = n + 1;
    let mut dist = vec![0.0; m * m];
    let mut shortcut_pairs = 0;
    for i in 0..n {
        for j in 0..n {
            let through = space.tau(i) + space.tau(j);
            let d = space.dist(i, j);
            if i < j && through < d {
                shortcut_pairs += 1;
            }
            dist[i * m + j] = if i == j { 0.0 } else { d.min(through) };
        }
        dist[i * m + n] = space.tau(i);
        dist[n * m + i] = space.tau(i);
    }
    let mut ids = space.ids().to_vec();
    ids.push(BB_ID.to_string());
    let mut tau = space.taus().to_vec();
    tau.push(0.0);
    let mut out = TimedMetricSpace::new(ids, tau, dist)?.with_basepoint(n)?;
    for (k, v) in space.meta() {
        out.set_meta(k.clone(), v.clone());
    }
    // measured on the augmented distances, which may route through p_BB
    let (lo, _) = space.tau_range().expect("nonempty");
    let bottom: Vec<usize> = (0..n).filter(|&i| space.tau(i) <= lo + level_tol).collect();
    let min_level_diameter = bottom
        .iter()
        .flat_map(|&i| bottom.iter().map(move |&j| (i, j)))
        .map(|(i, j)| out.dist(i, j))
        .fold(0.0, f64::max);
    let diameter = out.diameter();
    let report = out.validate(tol);
    if !report.is_valid() {
        return Err(Error::Validation(format!(
            "augmented space is not big-bang-like: {}",
            report.summary()
        )));
    }
    let guard = BigBangGuard {
        min_level_diameter,
        diameter,
        ratio,
        flagged: min_level_diameter > ratio * diameter,
        shortcut_pairs,
    };
    out.set_meta("big_bang_guard", serde_json::to_value(&guard)?);
    Ok((out, guard))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialSetReport {
    pub size: usize,
    /// `max_p |τ(p) - min_{q ∈ M} d(p, q)|`.
    pub worst_residual: f64,
    pub residual_tol: f64,
    pub holds: bool,
}

/// Marks `{x : τ(x) <= tol}` as the initial set and measures how well
/// `τ(p) = min_{q ∈ M} d(p, q)` holds, against `tol + slack`.
pub fn mark_initial_set(
    space: &TimedMetricSpace,
    tol: f64,
    slack: f64,
) -> Result<(TimedMetricSpace, InitialSetReport)> {
    let members: Vec<usize> = (0..space.len()).filter(|&i| space.tau(i) <= tol).collect();
    if members.is_empty() {
        return Err(Error::Argument(format!("no point has τ <= {tol}")));
    }
    let worst_residual = (0..space.len())
        .map(|p| {
            let to_m = members.iter().map(|&q| space.dist(p, q)).fold(f64::INFINITY, f64::min);
            (space.tau(p) - to_m).abs()
        })
        .fold(0.0, f64::max);
    let residual_tol = tol + slack;
    let report = InitialSetReport {
        size: members.len(),
        worst_residual,
        residual_tol,
        holds: worst_residual <= residual_tol,
    };
    let out = space
        .clone()
        .with_initial_set(members)?
        .with_meta("initial_set_report", serde_json::to_value(&report)?);
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{null_distance_matrix, sample_graph, strip_null_distance, GridSpec};
    use crate::models::{SpacetimeModel, Spatial, Warp};
    use crate::space::DISCRETE_TOL;
    use std::f64::consts::TAU;

    #[test]
    fn linear_grid_augments_cleanly() {
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.0)).unwrap();
        let g = sample_graph(&m, &GridSpec::new(8, 12), None).unwrap();
        let s = null_distance_matrix(&g).unwrap();
        let (bb, guard) = augment_big_bang(&s, BB_GUARD_RATIO, 1e-9, DISCRETE_TOL).unwrap();
        assert_eq!(bb.len(), s.len() + 1);
        let b = bb.basepoint().unwrap();
        assert_eq!(bb.tau(b), 0.0);
        assert!(!guard.flagged, "{guard:?}");
    }

    #[test]
    fn const_warp_is_flagged() {
        // sample away from t = 0 so every time is positive
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: 1.0 }, Warp::Const { c: 1.0 }, (0.0, 1.0))
            .unwrap();
        let g = sample_graph(&m, &GridSpec::new(6, 8).with_t_range(0.5, 1.0), None).unwrap();
        let s = null_distance_matrix(&g).unwrap();
        let (bb, guard) = augment_big_bang(&s, BB_GUARD_RATIO, 1e-9, DISCRETE_TOL).unwrap();
        assert!(bb.validate(DISCRETE_TOL).is_valid());
        assert!(guard.flagged);
    }

    #[test]
    fn single_point() {
        let s = TimedMetricSpace::new(vec!["a".into()], vec![0.4], vec![0.0]).unwrap();
        let (bb, _) = augment_big_bang(&s, BB_GUARD_RATIO, 1e-9, 1e-9).unwrap();
        assert_eq!(bb.dist(0, 1), 0.4);
        assert_eq!(bb.basepoint(), Some(1));
    }

    #[test]
    fn zero_time_input_fails_validation() {
        let s = TimedMetricSpace::new(vec!["a".into()], vec![0.0], vec![0.0]).unwrap();
        assert!(matches!(augment_big_bang(&s, BB_GUARD_RATIO, 1e-9, 1e-9), Err(Error::Validation(_))));
    }

    #[test]
    fn initial_sets() {
        let m = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))
            .unwrap();
        let g = sample_graph(&m, &GridSpec::new(6, 16), None).unwrap();
        let s = null_distance_matrix(&g).unwrap();
        let (marked, report) = mark_initial_set(&s, 1e-12, 1e-9).unwrap();
        assert_eq!(report.size, 16);
        assert!(report.holds && report.worst_residual < 1e-12);
        assert!(marked.validate(DISCRETE_TOL).is_valid());

        let lin = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.0)).unwrap();
        let lin = null_distance_matrix(&sample_graph(&lin, &GridSpec::new(8, 12), None).unwrap()).unwrap();
        let (bb, _) = augment_big_bang(&lin, BB_GUARD_RATIO, 1e-9, DISCRETE_TOL).unwrap();
        let (bb, _) = mark_initial_set(&bb, 0.0, 1e-9).unwrap();
        assert_eq!(bb.initial_set(), Some(&[bb.basepoint().unwrap()][..]));

        let strip = strip_null_distance(&g, 0.4, 1.0).unwrap();
        let (strip, report) = mark_initial_set(&strip, 1e-12, 1e-9).unwrap();
        let bottom = strip.initial_set().unwrap();
        assert_eq!(bottom.len(), 16);
        assert!(bottom.iter().all(|&i| strip.tau(i) == 0.0));
        assert!(report.holds);
    }
}
