//! Sample a model on a grid, build its causal graph and compare the discrete
//! null distance with the closed form.

use std::f64::consts::TAU;
use stmc::discretize::{cell_diameter, null_distance_matrix, sample_graph, GridSpec, DEFAULT_WINDOW_CELLS};
use stmc::models::{SpacetimeModel, Spatial, Warp};

fn main() -> stmc::Result<()> {
    let model = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))?;
    for n in [16, 32, 64] {
        let spec = GridSpec::new(n, n);
        let g = sample_graph(&model, &spec, Some(DEFAULT_WINDOW_CELLS * cell_diameter(&model, &spec)?))?;
        let space = null_distance_matrix(&g)?;
        let mut worst: f64 = 0.0;
        for i in (0..g.len()).step_by(7) {
            for j in (0..g.len()).step_by(11) {
                if let Some(exact) = model.null_dist_oracle(g.node(i), g.node(j))? {
                    worst = worst.max((space.dist(i, j) - exact).abs());
                }
            }
        }
        println!(
            "{n:>3}x{n:<3} nodes {:>5} edges {:>7} diameter {:.4}  max |d - max(|dt|, d_circle)| = {worst:.4}",
            g.len(),
            g.edge_count(),
            space.diameter()
        );
    }
    let dir = std::env::temp_dir().join("stmc-example");
    let spec = GridSpec::new(12, 12);
    let g = sample_graph(&model, &spec, None)?;
    null_distance_matrix(&g)?.save(&dir.join("space.json"), true)?;
    g.save(&dir.join("graph.json"), true)?;
    println!("wrote tms-v1 and cgraph-v1 to {}", dir.display());
    Ok(())
}
