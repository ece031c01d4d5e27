//! Certified bounds for the distances between timed metric spaces, on the
//! shipped counterexample fixtures and on a pair too large for enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stmc::distances::{
    gh, kappa_gh, level_sup_gh, strip_sup_gh, tau_h, timeless_sgh, DistanceBound, LevelBins, SearchOptions, StripGrid,
};
use stmc::harness::fixtures;
use stmc::harness::random::{random_box_space, relabeled};

fn show(name: &str, b: &DistanceBound) {
    println!("  {name:<10} [{:.4}, {:.4}] exact {} via {:?}", b.lower, b.upper, b.is_exact(), b.method);
}

fn main() -> stmc::Result<()> {
    let opts = SearchOptions::default().with_exact_max_n(6);
    for name in fixtures::names() {
        let p = fixtures::load(name).unwrap();
        println!("{name}:");
        show("gh", &gh(&p.x, &p.y, &opts)?);
        show("kappa", &kappa_gh(&p.x, &p.y, &opts)?);
        show("timeless", &timeless_sgh(&p.x, &p.y, &opts)?);
        show("tau_h", &tau_h(&p.x, &p.y, &opts)?);
        show("level_sup", &level_sup_gh(&p.x, &p.y, &LevelBins::levels(&p.x, &p.y, 1e-9)?, &opts)?);
        show("strip_sup", &strip_sup_gh(&p.x, &p.y, &StripGrid::regular(&p.x, &p.y, 2)?, &opts)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = random_box_space(&mut rng, 12);
    let y = relabeled(&x, &mut rng);
    let b = tau_h(&x, &y, &SearchOptions::default().with_budget(20_000))?;
    println!("12 points vs a relabeled copy:");
    show("tau_h", &b);
    if let Some(w) = b.witness(&x, &y) {
        println!("  witness has {} pairs", w?.pairs().len());
    }
    println!("{}", serde_json::to_string(&b).unwrap());
    Ok(())
}
