//! Counterexample pairs shipped as checked-in JSON, plus the constructions
//! that produced them.

use crate::error::Result;
use crate::space::TimedMetricSpace;

#[derive(Debug, Clone)]
pub struct FixturePair {
    pub name: &'static str,
    pub x: TimedMetricSpace,
    pub y: TimedMetricSpace,
}

const FILES: [(&str, &str, &str); 3] = [
    ("t_to_x", include_str!("../../fixtures/t_to_x.x.json"), include_str!("../../fixtures/t_to_x.y.json")),
    ("flip_t", include_str!("../../fixtures/flip_t.x.json"), include_str!("../../fixtures/flip_t.y.json")),
    (
        "levels_match",
        include_str!("../../fixtures/levels_match.x.json"),
        include_str!("../../fixtures/levels_match.y.json"),
    ),
];

fn parse(text: &str) -> Result<TimedMetricSpace> {
    TimedMetricSpace::from_json(serde_json::from_str(text)?)
}

/// The shipped fixture called `name`.
pub fn load(name: &str) -> Option<FixturePair> {
    FILES.iter().find(|f| f.0 == name).map(|&(name, x, y)| FixturePair {
        name,
        x: parse(x).expect("shipped fixture parses"),
        y: parse(y).expect("shipped fixture parses"),
    })
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|f| f.0)
}

fn sup_points(points: &[[f64; 2]], tau_axis: usize) -> TimedMetricSpace {
    let ids = points.iter().map(|p| format!("p{}_{}", p[0], p[1])).collect();
    let tau = points.iter().map(|p| p[tau_axis]).collect();
    TimedMetricSpace::from_fn(ids, tau, |i, j| {
        (points[i][0] - points[j][0]).abs().max((points[i][1] - points[j][1]).abs())
    })
    .expect("grid is well formed")
}

/// The grid `{0,1} × {0,1,2}` with the sup metric, timed by the first
/// coordinate in `x` and by the second in `y`. The transpose is an isometry
/// of the underlying metric spaces but the time ranges differ.
pub fn build_t_to_x() -> FixturePair {
    let pts: Vec<[f64; 2]> = (0..2).flat_map(|a| (0..3).map(move |b| [a as f64, b as f64])).collect();
    FixturePair { name: "t_to_x", x: sup_points(&pts, 0), y: sup_points(&pts, 1) }
}

/// The chain at positions 0, 1, 3 on a line with `τ` = position, and the
/// same chain with `τ` reversed. The chain has no nontrivial isometry.
pub fn build_flip_t() -> FixturePair {
    let pos = [0.0, 1.0, 3.0];
    let ids: Vec<String> = (0..3).map(|i| format!("c{i}")).collect();
    let x = TimedMetricSpace::from_fn(ids.clone(), pos.to_vec(), |i, j| (pos[i] - pos[j]).abs()).unwrap();
    let flipped = pos.iter().map(|p| 3.0 - p).collect();
    let y = TimedMetricSpace::from_fn(ids, flipped, |i, j| (pos[i] - pos[j]).abs()).unwrap();
    FixturePair { name: "flip_t", x, y }
}

/// Two four-point spaces with two levels each. Levels are isometric pairs at
/// distance 2; the cross distances are `{1, 1, 2, 2}` in `x` and `{1, 2, 2, 2}`
/// in `y`, so no global isometry exists.
pub fn build_levels_match() -> FixturePair {
    let ids: Vec<String> = ["a0", "b0", "a1", "b1"].iter().map(|s| s.to_string()).collect();
    let tau = vec![0.0, 0.0, 1.0, 1.0];
    let dx = vec![0., 2., 1., 2., 2., 0., 2., 1., 1., 2., 0., 2., 2., 1., 2., 0.];
    let dy = vec![0., 2., 1., 2., 2., 0., 2., 2., 1., 2., 0., 2., 2., 2., 2., 0.];
    FixturePair {
        name: "levels_match",
        x: TimedMetricSpace::new(ids.clone(), tau.clone(), dx).unwrap(),
        y: TimedMetricSpace::new(ids, tau, dy).unwrap(),
    }
}

pub fn build(name: &str) -> Option<FixturePair> {
    match name {
        "t_to_x" => Some(build_t_to_x()),
        "flip_t" => Some(build_flip_t()),
        "levels_match" => Some(build_levels_match()),
        _ => None,
    }
}
