use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stmc::distances::{gh, gh_lower_bound, kappa_gh, tau_h, tau_lower_bound, timeless_sgh, SearchOptions};
use stmc::embed::{hausdorff_sup, kuratowski, timed_kuratowski};
use stmc::harness::random::{random_box_space, relabeled, Lattice};
use stmc::TimedMetricSpace;

fn space(seed: u64, n: usize, lattice: bool) -> TimedMetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if lattice {
        Lattice::random(&mut rng, n, 3).space(0.0, 1.0)
    } else {
        random_box_space(&mut rng, n)
    }
}

fn exact() -> SearchOptions {
    SearchOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn bounds_are_ordered_and_symmetric(a in any::<u64>(), b in any::<u64>(), n in 1usize..=4, m in 1usize..=4, lat in any::<bool>()) {
        let (x, y) = (space(a, n, lat), space(b, m, lat));
        for op in [gh, kappa_gh, tau_h, timeless_sgh] {
            let xy = op(&x, &y, &exact()).unwrap();
            let yx = op(&y, &x, &exact()).unwrap();
            prop_assert!(xy.lower <= xy.upper + 1e-12);
            prop_assert!(xy.is_exact());
            prop_assert!((xy.upper - yx.upper).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_values_obey_the_triangle_inequality(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), n in 1usize..=3) {
        let (x, y, z) = (space(a, n, false), space(b, n, false), space(c, n, false));
        for op in [gh, tau_h] {
            let xz = op(&x, &z, &exact()).unwrap().upper;
            let xy = op(&x, &y, &exact()).unwrap().upper;
            let yz = op(&y, &z, &exact()).unwrap().upper;
            prop_assert!(xz <= xy + yz + 1e-12, "{} > {} + {}", xz, xy, yz);
        }
    }

    #[test]
    fn cheap_lower_bounds_are_lower_bounds(a in any::<u64>(), b in any::<u64>(), n in 1usize..=4, m in 1usize..=4) {
        let (x, y) = (space(a, n, false), space(b, m, false));
        prop_assert!(gh_lower_bound(&x, &y) <= gh(&x, &y, &exact()).unwrap().upper + 1e-12);
        let th = tau_h(&x, &y, &exact()).unwrap().upper;
        prop_assert!(tau_lower_bound(&x, &y) <= th + 1e-12);
    }

    #[test]
    fn kappa_sandwich(a in any::<u64>(), b in any::<u64>(), n in 1usize..=4, m in 1usize..=4) {
        let (x, y) = (space(a, n, true), space(b, m, false));
        let g = gh(&x, &y, &exact()).unwrap().upper;
        let k = kappa_gh(&x, &y, &exact()).unwrap().upper;
        prop_assert!(g <= k + 1e-9 && k <= 2.0 * g + 1e-9);
    }

    #[test]
    fn relabeling_costs_nothing(a in any::<u64>(), n in 1usize..=5) {
        let x = space(a, n, true);
        let y = relabeled(&x, &mut ChaCha8Rng::seed_from_u64(a ^ 1));
        let opts = exact().with_exact_max_n(5);
        prop_assert!(tau_h(&x, &y, &opts).unwrap().upper <= 1e-12);
    }

    #[test]
    fn embeddings_preserve_distance(a in any::<u64>(), n in 1usize..=8, extra in 0usize..4) {
        let x = space(a, n, false);
        let mut rng = ChaCha8Rng::seed_from_u64(a);
        let mut order: Vec<String> = x.ids().to_vec();
        for _ in 0..extra {
            let dup = order.choose(&mut rng).unwrap().clone();
            order.push(dup);
        }
        order.shuffle(&mut rng);
        let plain = kuratowski(&x, &order).unwrap();
        let timed = timed_kuratowski(&x, &order).unwrap();
        for i in 0..n {
            prop_assert_eq!(timed.point(i)[0], x.tau(i));
            for j in 0..n {
                prop_assert!((plain.sup_dist(i, j) - x.dist(i, j)).abs() <= 1e-12);
                prop_assert!((timed.sup_dist(i, j) - x.dist(i, j)).abs() <= 1e-12);
            }
        }
        prop_assert_eq!(hausdorff_sup(&timed, &timed).unwrap(), 0.0);
    }

    #[test]
    fn space_json_round_trips(a in any::<u64>(), n in 0usize..=6) {
        let x = space(a, n.max(1), false);
        let back = TimedMetricSpace::from_json(serde_json::from_str(&serde_json::to_string(&x.to_json()).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(back.dist_matrix(), x.dist_matrix());
        prop_assert_eq!(back.taus(), x.taus());
        prop_assert_eq!(back.content_hash(), x.content_hash());
    }
}
