//! Seeded Monte Carlo comparison of the strategies while the share of
//! correct solutions grows.

use plausel::{sweep, ExperimentConfig, SweepAxis};

fn main() {
    let base = ExperimentConfig {
        trials: 4000,
        ..ExperimentConfig::default()
    };
    let values = [0.05, 0.1, 0.2, 0.4, 0.8];
    let reports = sweep(&base, SweepAxis::ThetaX, &values).expect("valid sweep");

    print!("{:>8}", "theta_x");
    for o in &reports[0].outcomes {
        print!("{:>12}", o.strategy);
    }
    println!();
    for (v, report) in values.iter().zip(&reports) {
        print!("{v:>8}");
        for o in &report.outcomes {
            print!("{:>12}", format!("{:.3}±{:.3}", o.mean_pass_at_1, o.std_err));
        }
        println!();
    }
}
