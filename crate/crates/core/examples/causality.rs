//! Recover the causal order from distances and time alone, and compare it
//! with the model's light cones.

use std::f64::consts::TAU;
use stmc::causal::{agreement, causal_relation, check_causal_axioms};
use stmc::discretize::{null_distance_matrix, sample_graph, GridSpec};
use stmc::models::{SpacetimeModel, Spatial, Warp};

fn main() -> stmc::Result<()> {
    let model = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))?;
    let g = sample_graph(&model, &GridSpec::new(24, 24), None)?;
    let space = null_distance_matrix(&g)?;
    for eps in [0.0, 1e-9, 0.02] {
        let rel = causal_relation(&space, eps)?;
        let axioms = check_causal_axioms(&rel, &space);
        let agree = agreement(&rel, |p, q| model.is_causal(g.node(p), g.node(q)))?;
        println!(
            "eps {eps:<6} related {:>7}  transitivity violations {:>5}  agreement with light cones {:.5}",
            rel.count(),
            axioms.transitivity.violations,
            agree.fraction
        );
    }
    Ok(())
}
