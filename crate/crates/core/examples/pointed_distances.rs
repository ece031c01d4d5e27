//! Big-bang pointed and future-developed distances, which need a basepoint
//! or an initial set on both inputs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stmc::distances::{bb_gh, fd_hh, SearchOptions};
use stmc::harness::random::{big_bang_space, future_developed_lattice, future_developed_space, Lattice};

fn main() -> stmc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = SearchOptions::default().with_exact_max_n(5);
    let l = Lattice::random(&mut rng, 3, 3);
    let x = big_bang_space(&l, 1.0)?;
    let mirrored = big_bang_space(&l.reflected(), 1.0)?;
    let scaled = big_bang_space(&l, 1.5)?;
    println!("bb_gh mirror image: {:?}", bb_gh(&x, &mirrored, &opts, 1e-9)?.upper);
    println!("bb_gh scaled copy:  {:?}", bb_gh(&x, &scaled, &opts, 1e-9)?.upper);

    let fd = loop {
        if let Some(l) = future_developed_lattice(&mut rng, 2, 5, 3) {
            break l;
        }
    };
    let a = future_developed_space(&fd)?;
    let b = future_developed_space(&fd.reflected())?;
    println!("fd_hh mirror image: {:?}", fd_hh(&a, &b, &opts, 1e-9)?.upper);
    match bb_gh(&a, &a.clone().without_flags(), &opts, 1e-9) {
        Err(e) => println!("without a basepoint: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
