//! Closed-form error predictions for MaxPass and CodeT.

use plausel::theory::{codet_error_prob, maxpass_accuracy_estimate, theta_prime};
use plausel::validation::{codet_curve, CODET_FAVORABLE, CODET_N_GRID, CODET_UNFAVORABLE};
use plausel::LabelVector;

fn main() {
    println!("MaxPass accuracy at theta_1 = 0.5, theta_0 = 0.1, 20 correct / 40 incorrect tests:");
    for n_x_bar in [1, 10, 100, 1000, 10_000] {
        let acc = maxpass_accuracy_estimate(0.5, 0.1, 20, 40, n_x_bar).unwrap();
        println!("  {n_x_bar:>6} incorrect solutions: {acc:.4}");
    }

    let y = LabelVector::from_bits(&[1, 1, 1, 0, 0]).unwrap();
    let y_hat = LabelVector::from_bits(&[0, 1, 1, 1, 1]).unwrap();
    let tp = theta_prime(0.2, 0.4, 0.1, &y, &y_hat).unwrap();
    println!("\nprobability an incorrect solution yields {:?}: {tp:.3e}", y_hat.to_bits());
    let p = codet_error_prob(0.2, tp, 10, y.count_ones(), y_hat.count_ones()).unwrap();
    println!("CodeT error at N = 10: {p:.3e}");

    for (name, point) in [("favorable", CODET_FAVORABLE), ("unfavorable", CODET_UNFAVORABLE)] {
        let curve = codet_curve(point).unwrap();
        println!("\nCodeT error, {name} point {point:?}:");
        for (n, p) in CODET_N_GRID.iter().zip(curve) {
            println!("  N = {n:>6}: {p:.4e}");
        }
    }
}
