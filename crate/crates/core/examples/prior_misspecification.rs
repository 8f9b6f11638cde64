//! Posterior error caused by assuming Beta priors when the true priors are
//! mixtures, compared with the total-variation bound.

use plausel::special::Quadrature;
use plausel::theory::{BetaComponent, PriorSpec};
use plausel::{check_theorem1_bound, select_b4, B4Hyperparams, PassingMatrix, TruePriors};

fn main() {
    // The bound scales with 1 / P(E), so it only says something when the
    // observed matrix is likely under the prior. The true prior on theta_y
    // mixes the assumed Beta(10, 1) with a Beta(2, 2) component of weight w.
    let e = PassingMatrix::new(&[[1, 1], [1, 1], [1, 1]]).unwrap();
    let assumed = B4Hyperparams::b4(10.0, 10.0).unwrap();
    let chosen = select_b4(&e, &assumed);
    let x_hat = chosen.chosen_labels(e.n_solutions());
    let y_hat = chosen.chosen_set.as_ref().unwrap().test_signature.clone();

    let mut truth = TruePriors::from_hyperparams(&assumed).unwrap();
    println!("{:>6} {:>12} {:>12} {:>10}", "weight", "delta", "bound", "P(E)");
    for w in [0.0, 0.001, 0.01, 0.1, 0.5] {
        truth.theta_y = PriorSpec::mixture(vec![
            BetaComponent { weight: 1.0 - w, alpha: 10.0, beta: 1.0 },
            BetaComponent { weight: w, alpha: 2.0, beta: 2.0 },
        ])
        .unwrap();
        let r = check_theorem1_bound(&e, &x_hat, &y_hat, &truth, &assumed, &Quadrature::default())
            .unwrap();
        println!("{w:>6} {:>12.4e} {:>12.4e} {:>10.4e}", r.delta, r.bound, r.p_e);
        assert!(r.satisfied);
    }
}
