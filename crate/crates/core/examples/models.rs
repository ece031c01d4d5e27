//! The model catalog: warped products and Minkowski regions, their time
//! function, causal predicate and closed-form null distances.

use std::f64::consts::{PI, TAU};
use stmc::models::{ModelPoint, Region, SpacetimeModel, Spatial, Warp};

fn main() -> stmc::Result<()> {
    let cylinder = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Const { c: 1.0 }, (0.0, 1.0))?;
    let (p, q) = (ModelPoint::new(0.8, vec![0.0]), ModelPoint::new(0.2, vec![0.5]));
    println!("flat cylinder: tau(p) = {}", cylinder.eval_tau(&p)?);
    println!("  q in the past of p: {}", cylinder.is_causal(&p, &q)?);
    println!("  null distance oracle: {:?}", cylinder.null_dist_oracle(&p, &q)?);
    let far = ModelPoint::new(0.5, vec![2.0]);
    println!("  spacelike pair: {:?} (= max(|dt|, d))", cylinder.null_dist_oracle(&p, &far)?);

    let big_bang = SpacetimeModel::warped(Spatial::Circle { circumference: TAU }, Warp::Linear, (0.0, 1.3))?;
    let (a, b) = (ModelPoint::new(1.0, vec![0.0]), ModelPoint::new(1.0, vec![PI]));
    println!("linear warp, big bang: {}", big_bang.is_big_bang());
    println!("  antipodal pair at t = 1: ambient {:?}", big_bang.null_dist_oracle(&a, &b)?);
    println!("  same pair, strip [0.5, 1.2]: {:?}", big_bang.strip_null_dist_oracle(&a, &b, 0.5, 1.2)?);

    let wobble = SpacetimeModel::warped(Spatial::Circle { circumference: 1.0 }, Warp::Sinusoidal { a: 0.5, omega: TAU }, (0.0, 0.5))?;
    println!("sinusoidal warp f(0.25) = {}, light reach over [0, 0.5] = {:.6}", wobble.warp().value(0.25), wobble.warp().reach(0.0, 0.5));

    let cone = SpacetimeModel::minkowski(
        Spatial::Euclidean { dim: 1, lo: -1.0, hi: 1.0 },
        (0.0, 1.0),
        Region::PastOfPoint { t: 1.0, x: vec![0.0] },
    )?;
    println!("past of (1, 0): contains (0.5, 0.4) = {}, (0.5, 0.6) = {}",
        cone.contains(&ModelPoint::new(0.5, vec![0.4])),
        cone.contains(&ModelPoint::new(0.5, vec![0.6])));
    println!("model-v1: {}", serde_json::to_string(&cone.to_json()).unwrap());
    Ok(())
}
