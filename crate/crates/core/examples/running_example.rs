//! Every strategy on the four-solution, five-test running example.

use plausel::{
    partition_consensus_sets, select_b4, select_codet, select_maxpass, select_mbr_exec,
    select_random, B4Hyperparams, PassingMatrix,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let e = PassingMatrix::new(&[
        [1, 1, 1, 0, 0],
        [1, 1, 1, 0, 0],
        [0, 1, 1, 1, 1],
        [0, 0, 1, 1, 0],
    ])
    .expect("rectangular 0/1 matrix");

    println!("consensus sets:");
    for (k, set) in partition_consensus_sets(&e).iter().enumerate() {
        println!(
            "  {k}: solutions {:?}, passes {:?}",
            set.solution_indices,
            set.test_signature.ones_indices()
        );
    }

    let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
    let b4 = select_b4(&e, &hyper);
    let logs = b4.per_set_scores.as_ref().unwrap();
    println!("\nB4 log posterior per set:");
    for (k, s) in logs.iter().enumerate() {
        println!("  {k}: {s:.4} (exp {:.4e})", s.exp());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!();
    for result in [
        b4,
        select_codet(&e),
        select_mbr_exec(&e),
        select_maxpass(&e),
        select_random(&e, &mut rng),
    ] {
        println!("{:>8}: {:?}", result.strategy.name(), result.chosen);
    }
}
