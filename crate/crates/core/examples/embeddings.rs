//! Kuratowski and timed Kuratowski embeddings into sup-norm coordinates.

use stmc::embed::{hausdorff_sup, kuratowski, timed_kuratowski};
use stmc::harness::fixtures;

fn main() -> stmc::Result<()> {
    let pair = fixtures::load("t_to_x").expect("shipped fixture");
    let order: Vec<String> = pair.x.ids().to_vec();
    let kx = kuratowski(&pair.x, &order)?;
    let ky = kuratowski(&pair.y, &order)?;
    println!("untimed clouds: dim {}, Hausdorff {}", kx.dim(), hausdorff_sup(&kx, &ky)?);
    let tx = timed_kuratowski(&pair.x, &order)?;
    let ty = timed_kuratowski(&pair.y, &order)?;
    println!("timed clouds:   dim {}, Hausdorff {}", tx.dim(), hausdorff_sup(&tx, &ty)?);
    for i in 0..pair.x.len() {
        println!("  {} -> {:?}", pair.x.id(i), tx.point(i));
    }
    let mut worst: f64 = 0.0;
    for i in 0..pair.x.len() {
        for j in 0..pair.x.len() {
            worst = worst.max((tx.sup_dist(i, j) - pair.x.dist(i, j)).abs());
        }
    }
    println!("distance preservation error: {worst}");
    let path = std::env::temp_dir().join("stmc-example").join("cloud.json");
    tx.save(&path, true)?;
    println!("wrote cloud-v1 to {}", path.display());
    Ok(())
}
