//! Exhaustive search for distance- and time-preserving bijections.
//!
//! This is the ground truth the definiteness checks compare against, so it is
//! deliberately a plain backtracking search with no heuristics beyond pruning
//! on time mismatch.

use crate::error::{Error, Result};
use crate::space::TimedMetricSpace;

pub const MAX_ISOMETRY_N: usize = 10;

/// Returns `F` with `F[i]` the image in `y` of point `i` of `x`, such that
/// time and all distances agree within `tol`, or `None` if no such bijection
/// exists.
pub fn find_time_isometry(
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    tol: f64,
) -> Result<Option<Vec<usize>>> {
    search(x, y, tol, false)
}

/// Like [`find_time_isometry`], and additionally maps basepoint to basepoint
/// and initial set onto initial set.
pub fn find_flagged_time_isometry(
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    tol: f64,
) -> Result<Option<Vec<usize>>> {
    search(x, y, tol, true)
}

fn search(
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    tol: f64,
    flags: bool,
) -> Result<Option<Vec<usize>>> {
    if !(tol >= 0.0) {
        return Err(Error::Argument(format!("tol {tol} must be >= 0")));
    }
    if x.len() != y.len() {
        return Ok(None);
    }
    let n = x.len();
    if n > MAX_ISOMETRY_N {
        return Err(Error::Capability(format!(
            "isometry search limited to {MAX_ISOMETRY_N} points, got {n}"
        )));
    }
    if flags {
        if x.basepoint().is_some() != y.basepoint().is_some()
            || x.initial_set().map(<[usize]>::len) != y.initial_set().map(<[usize]>::len)
        {
            return Ok(None);
        }
    }

    let flag_of = |s: &TimedMetricSpace, i: usize| -> (bool, bool) {
        (
            s.basepoint() == Some(i),
            s.initial_set().is_some_and(|m| m.contains(&i)),
        )
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x.tau(a).total_cmp(&x.tau(b)).then(a.cmp(&b)));

    // Candidate images for each source point, nearest in time first.
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut c: Vec<usize> = (0..n)
                .filter(|&j| (x.tau(i) - y.tau(j)).abs() <= tol)
                .filter(|&j| !flags || flag_of(x, i) == flag_of(y, j))
                .collect();
            c.sort_by(|&a, &b| {
                (x.tau(i) - y.tau(a))
                    .abs()
                    .total_cmp(&(x.tau(i) - y.tau(b)).abs())
                    .then(a.cmp(&b))
            });
            c
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }

    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(0, &order, &candidates, x, y, tol, &mut image, &mut used) {
        Ok(Some(image))
    } else {
        Ok(None)
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    depth: usize,
    order: &[usize],
    candidates: &[Vec<usize>],
    x: &TimedMetricSpace,
    y: &TimedMetricSpace,
    tol: f64,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let i = order[depth];
    for &j in &candidates[i] {
        if used[j] {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&k| (x.dist(i, k) - y.dist(j, image[k])).abs() <= tol);
        if !consistent {
            continue;
        }
        image[i] = j;
        used[j] = true;
        if extend(depth + 1, order, candidates, x, y, tol, image, used) {
            return true;
        }
        used[j] = false;
        image[i] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(tau: &[f64], upper: &[f64]) -> TimedMetricSpace {
        let n = tau.len();
        let mut it = upper.iter();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        TimedMetricSpace::new(TimedMetricSpace::default_ids(n), tau.to_vec(), dist).unwrap()
    }

    #[test]
    fn relabeled_copy_is_found() {
        let x = line(&[0.0, 1.0, 1.5, 0.2], &[1.1, 1.6, 0.4, 0.7, 0.9, 1.4]);
        let y = x.permuted(&[3, 1, 0, 2]).unwrap();
        let f = find_time_isometry(&x, &y, 1e-12).unwrap().unwrap();
        for a in 0..4 {
            assert_eq!(x.tau(a), y.tau(f[a]));
            for b in 0..4 {
                assert_eq!(x.dist(a, b), y.dist(f[a], f[b]));
            }
        }
    }

    #[test]
    fn perturbed_distance_is_rejected() {
        let tol = 1e-9;
        let x = line(&[0.0, 1.0, 1.5], &[1.1, 1.6, 0.6]);
        let mut dist = x.dist_matrix().to_vec();
        dist[1] += 10.0 * tol;
        dist[3] += 10.0 * tol;
        let y = TimedMetricSpace::new(x.ids().to_vec(), x.taus().to_vec(), dist).unwrap();
        assert_eq!(find_time_isometry(&x, &y, tol).unwrap(), None);
    }

    #[test]
    fn size_guards() {
        let a = line(&[0.0], &[]);
        let b = line(&[0.0, 1.0], &[1.0]);
        assert_eq!(find_time_isometry(&a, &b, 0.0).unwrap(), None);
        let big = TimedMetricSpace::from_fn(
            TimedMetricSpace::default_ids(11),
            vec![0.0; 11],
            |_, _| 1.0,
        )
        .unwrap();
        assert!(matches!(
            find_time_isometry(&big, &big, 0.0),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn flags_restrict_the_bijection() {
        // only the identity preserves distances, and it does not carry
        // {0} onto {1}
        let x = line(&[0.0, 0.0, 1.0], &[2.0, 1.0, 1.5]).with_initial_set(vec![0]).unwrap();
        let y = x.clone().with_initial_set(vec![1]).unwrap();
        assert!(find_time_isometry(&x, &y, 1e-12).unwrap().is_some());
        assert!(find_flagged_time_isometry(&x, &x, 1e-12).unwrap().is_some());
        assert!(find_flagged_time_isometry(&x, &y, 1e-12).unwrap().is_none());
    }
}
