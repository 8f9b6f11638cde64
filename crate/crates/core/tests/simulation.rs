use plausel::simulator::{
    run_experiment, run_experiment_with_threads, sample_instance, sweep, trial_rng,
    ExperimentConfig, GenerativeParams, SweepAxis,
};
use plausel::strategies::StrategySpec;

#[test]
fn correct_rows_always_equal_truth() {
    let params = GenerativeParams::default();
    let mut rng = trial_rng(17, 0);
    for _ in 0..10_000 {
        let inst = sample_instance(&params, 10, 30, true, &mut rng).unwrap();
        assert!(inst.x.count_ones() >= 1);
        for i in inst.x.ones_indices() {
            assert_eq!(inst.matrix.row(i), inst.y.as_slice());
        }
    }
}

#[test]
fn cell_rates_match_parameters() {
    let params = GenerativeParams::new(0.2, 0.3, 0.4, 0.1).unwrap();
    let mut rng = trial_rng(23, 0);
    let (mut on_correct, mut n_correct) = (0u64, 0u64);
    let (mut on_incorrect, mut n_incorrect) = (0u64, 0u64);
    let (mut y_ones, mut y_total) = (0u64, 0u64);
    // 4000 instances of 10 x 30 is 1.2 million cells
    for _ in 0..4000 {
        let inst = sample_instance(&params, 10, 30, true, &mut rng).unwrap();
        y_ones += inst.y.count_ones() as u64;
        y_total += 30;
        for i in (0..10).filter(|&i| !inst.x.get(i)) {
            for j in 0..30 {
                let e = u64::from(inst.matrix.get(i, j));
                if inst.y.get(j) {
                    on_correct += e;
                    n_correct += 1;
                } else {
                    on_incorrect += e;
                    n_incorrect += 1;
                }
            }
        }
    }
    let within = |hits: u64, total: u64, p: f64| {
        let rate = hits as f64 / total as f64;
        let sigma = (p * (1.0 - p) / total as f64).sqrt();
        assert!((rate - p).abs() <= 3.0 * sigma, "{rate} vs {p} (sigma {sigma})");
    };
    within(on_correct, n_correct, 0.4);
    within(on_incorrect, n_incorrect, 0.1);
    within(y_ones, y_total, 0.3);
}

#[test]
fn reports_are_bit_identical_across_runs_and_threads() {
    let config = ExperimentConfig {
        trials: 2_000,
        seed: 5,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    let c = run_experiment_with_threads(&config, 1).unwrap();
    let d = run_experiment_with_threads(&config, 7).unwrap();
    for other in [&b, &c, &d] {
        assert_eq!(a.config, other.config);
        for (x, y) in a.outcomes.iter().zip(&other.outcomes) {
            assert_eq!(x.strategy, y.strategy);
            assert_eq!(x.mean_pass_at_1.to_bits(), y.mean_pass_at_1.to_bits());
            assert_eq!(x.std_err.to_bits(), y.std_err.to_bits());
        }
    }
}

#[test]
fn different_seeds_give_different_runs() {
    let mk = |seed| ExperimentConfig {
        trials: 500,
        seed,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&mk(1)).unwrap();
    let b = run_experiment(&mk(2)).unwrap();
    assert_ne!(a.outcomes, b.outcomes);
}

#[test]
fn unconditioned_random_matches_theta_x() {
    let config = ExperimentConfig {
        params: GenerativeParams::new(0.05, 0.3, 0.4, 0.1).unwrap(),
        n_solutions: 3,
        trials: 3_000,
        require_correct_solution: false,
        strategies: vec![StrategySpec::Random],
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&config).unwrap();
    let random = report.outcome("random").unwrap().mean_pass_at_1;
    // unconditioned, Random's expected Pass@1 is theta_x
    assert!((random - 0.05).abs() < 0.015, "{random}");
}

#[test]
fn means_stay_in_unit_interval_and_std_err_matches_definition() {
    let reports = sweep(
        &ExperimentConfig {
            trials: 400,
            ..ExperimentConfig::default()
        },
        SweepAxis::ThetaX,
        &[0.05, 0.5, 0.95],
    )
    .unwrap();
    for r in &reports {
        for o in &r.outcomes {
            assert!((0.0..=1.0).contains(&o.mean_pass_at_1));
            assert!(o.std_err >= 0.0 && o.std_err <= 0.5 / (o.trials as f64 - 1.0).sqrt());
        }
    }
}

#[test]
fn duplicate_b4_entries_get_distinct_labels() {
    let config = ExperimentConfig {
        trials: 50,
        strategies: vec![
            serde_json::from_str(r#"{"name": "b4", "beta0": 1}"#).unwrap(),
            serde_json::from_str(r#"{"name": "b4", "beta0": 1000}"#).unwrap(),
        ],
        ..ExperimentConfig::default()
    };
    let labels = config.strategy_labels();
    assert_ne!(labels[0], labels[1]);
    assert!(labels.iter().all(|l| l.starts_with("b4(")));
    let report = run_experiment(&config).unwrap();
    assert_eq!(report.outcomes.len(), 2);
}
