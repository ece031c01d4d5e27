//! Longest-path cosmological time, generators, and the two ways of marking
//! the beginning: a big-bang point or an initial set.

use std::f64::consts::TAU;
use stmc::discretize::{
    augment_big_bang, cosmological_time, generator, mark_initial_set, null_distance_matrix, sample_graph, GridSpec,
    BB_GUARD_RATIO,
};
use stmc::models::{ModelPoint, SpacetimeModel, Spatial, Warp};

fn main() -> stmc::Result<()> {
    let flat = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))?;
    for n in [16, 32, 64] {
        let g = sample_graph(&flat, &GridSpec::new(n, n), None)?;
        let cosmo = cosmological_time(&g)?;
        let err = (0..g.len()).map(|i| (cosmo.values[i] - g.node(i).t).abs()).fold(0.0, f64::max);
        println!("{n}x{n}: max |tau_hat - t| = {err:.2e}");
    }

    let g = sample_graph(&flat, &GridSpec::new(16, 16), None)?;
    let cosmo = cosmological_time(&g)?;
    let top = g.nearest(&ModelPoint::new(1.0, vec![1.0]));
    let chain = generator(&cosmo, top);
    println!("generator from n{top}: {} nodes, reaching t = {:.3}", chain.len(), g.node(*chain.last().unwrap()).t);

    let expanding = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.0))?;
    let space = null_distance_matrix(&sample_graph(&expanding, &GridSpec::new(12, 12), None)?)?;
    let (bb, guard) = augment_big_bang(&space, BB_GUARD_RATIO, 1e-9, 1e-9)?;
    println!(
        "big bang: {} -> {} points, basepoint {:?}, {} shortcut pairs, guard flagged {}",
        space.len(),
        bb.len(),
        bb.basepoint().map(|i| bb.id(i)),
        guard.shortcut_pairs,
        guard.flagged
    );

    let slab = null_distance_matrix(&sample_graph(&flat, &GridSpec::new(8, 8), None)?)?;
    let (fd, report) = mark_initial_set(&slab, 1e-12, 1e-9)?;
    println!("initial set: {} points, residual {:.2e}, holds {}", fd.initial_set().unwrap().len(), report.worst_residual, report.holds);
    Ok(())
}
