//! Checks B4's consensus-set answer against exhaustive MAP search on random
//! small matrices.

use plausel::strategies::brute_force_map;
use plausel::{sample_instance, select_b4, B4Hyperparams, GenerativeParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
    let params = GenerativeParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, total) = (0, 200);
    for _ in 0..total {
        let inst = sample_instance(&params, 6, 10, true, &mut rng).unwrap();
        let fast = select_b4(&inst.matrix, &hyper);
        let exact = brute_force_map(&inst.matrix, &hyper).unwrap();
        if fast.chosen == exact.x_hat.ones_indices() {
            agree += 1;
        } else {
            println!("mismatch: {:?} vs {:?}", fast.chosen, exact.x_hat.ones_indices());
        }
    }
    println!("B4 matched the exhaustive MAP on {agree}/{total} matrices (6 x 10)");
}
