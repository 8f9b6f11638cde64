//! Synthetic passing matrices and Monte Carlo strategy comparison.
//!
//! An instance is drawn from four rates: each solution is correct with
//! probability `theta_x`, each test with `theta_y`. A correct solution passes
//! exactly the correct tests. An incorrect solution passes each correct test
//! with probability `theta_1` and each incorrect test with `theta_0`,
//! independently.
//!
//! Trials are independent. Trial `t` draws from its own ChaCha stream
//! (`seed`, stream `t`), and per-trial results are reduced in trial order, so a
//! report depends only on the configuration and never on the thread count.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{pass_at_1, LabelVector, PassingMatrix};
use crate::strategies::{B4Hyperparams, StrategyError, StrategySpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{name} = {value} is not a probability")]
    Probability { name: &'static str, value: f64 },
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("invalid value {value} for sweep axis {axis}")]
    AxisValue { axis: SweepAxis, value: f64 },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// The four latent rates of the generative process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerativeParams {
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_1: f64,
    pub theta_0: f64,
}

impl Default for GenerativeParams {
    fn default() -> Self {
        Self {
            theta_x: 0.2,
            theta_y: 0.3,
            theta_1: 0.4,
            theta_0: 0.1,
        }
    }
}

impl GenerativeParams {
    pub fn new(theta_x: f64, theta_y: f64, theta_1: f64, theta_0: f64) -> Result<Self, SimError> {
        let p = Self {
            theta_x,
            theta_y,
            theta_1,
            theta_0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in [
            ("theta_x", self.theta_x),
            ("theta_y", self.theta_y),
            ("theta_1", self.theta_1),
            ("theta_0", self.theta_0),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::Probability { name, value });
            }
        }
        Ok(())
    }
}

/// One sampled problem: ground truth and the observed matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub x: LabelVector,
    pub y: LabelVector,
    pub matrix: PassingMatrix,
}

/// Draws `(x, y, E)`. With `require_correct_solution`, `x` is redrawn until it
/// has at least one correct solution, which needs `theta_x > 0`.
pub fn sample_instance<R: Rng + ?Sized>(
    params: &GenerativeParams,
    n_solutions: usize,
    n_tests: usize,
    require_correct_solution: bool,
    rng: &mut R,
) -> Result<Instance, SimError> {
    params.validate()?;
    if n_solutions == 0 {
        return Err(SimError::Config("n_solutions must be at least 1".into()));
    }
    if require_correct_solution && params.theta_x == 0.0 {
        return Err(SimError::Config(
            "theta_x = 0 can never produce a correct solution".into(),
        ));
    }
    let x: Vec<bool> = loop {
        let draw: Vec<bool> = (0..n_solutions)
            .map(|_| rng.random_bool(params.theta_x))
            .collect();
        if !require_correct_solution || draw.iter().any(|&b| b) {
            break draw;
        }
    };
    let y: Vec<bool> = (0..n_tests)
        .map(|_| rng.random_bool(params.theta_y))
        .collect();
    let rows: Vec<Vec<bool>> = x
        .iter()
        .map(|&correct| {
            if correct {
                y.clone()
            } else {
                y.iter()
                    .map(|&test_ok| {
                        rng.random_bool(if test_ok {
                            params.theta_1
                        } else {
                            params.theta_0
                        })
                    })
                    .collect()
            }
        })
        .collect();
    let matrix = PassingMatrix::from_bool_rows(&rows).expect("rows are rectangular and binary");
    Ok(Instance {
        x: LabelVector::new(x),
        y: LabelVector::new(y),
        matrix,
    })
}

fn default_n_solutions() -> usize {
    10
}
fn default_n_tests() -> usize {
    30
}
fn default_trials() -> usize {
    20_000
}
fn default_true() -> bool {
    true
}
fn default_strategies() -> Vec<StrategySpec> {
    vec![
        StrategySpec::B4 {
            hyper: B4Hyperparams::default(),
        },
        StrategySpec::CodeT,
        StrategySpec::MaxPass,
        StrategySpec::MbrExec,
        StrategySpec::Random,
    ]
}

/// Settings of one Monte Carlo comparison. Every field has a default matching
/// the reference setting `N = 10`, `M = 30`, rates `(0.2, 0.3, 0.4, 0.1)`,
/// 20 000 trials and `beta0 = alpha_xy = 10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub params: GenerativeParams,
    #[serde(default = "default_n_solutions")]
    pub n_solutions: usize,
    #[serde(default = "default_n_tests")]
    pub n_tests: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<StrategySpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub require_correct_solution: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: GenerativeParams::default(),
            n_solutions: default_n_solutions(),
            n_tests: default_n_tests(),
            trials: default_trials(),
            strategies: default_strategies(),
            seed: 0,
            require_correct_solution: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.n_solutions == 0 {
            return Err(SimError::Config("n_solutions must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(SimError::Config("no strategies configured".into()));
        }
        if self.require_correct_solution && self.params.theta_x == 0.0 {
            return Err(SimError::Config(
                "theta_x = 0 with require_correct_solution never yields an instance".into(),
            ));
        }
        for s in &self.strategies {
            s.validate()?;
        }
        Ok(())
    }

    /// Display label for each configured strategy; repeated names get their
    /// hyperparameters appended.
    pub fn strategy_labels(&self) -> Vec<String> {
        let names: Vec<&str> = self.strategies.iter().map(|s| s.kind().name()).collect();
        self.strategies
            .iter()
            .zip(&names)
            .map(|(s, name)| {
                let repeated = names.iter().filter(|n| *n == name).count() > 1;
                match s {
                    StrategySpec::B4 { hyper } if repeated => format!(
                        "b4(a1={},b1={},a0={},b0={},ax={},bx={},ay={},by={})",
                        hyper.alpha1,
                        hyper.beta1,
                        hyper.alpha0,
                        hyper.beta0,
                        hyper.alphax,
                        hyper.betax,
                        hyper.alphay,
                        hyper.betay
                    ),
                    _ => name.to_string(),
                }
            })
            .collect()
    }
}

/// Mean Pass@1 of one strategy over all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: String,
    pub mean_pass_at_1: f64,
    /// Sample standard deviation over trials divided by `sqrt(trials)`.
    pub std_err: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub outcomes: Vec<StrategyOutcome>,
    pub elapsed_secs: f64,
}

impl ExperimentReport {
    pub fn outcome(&self, strategy: &str) -> Option<&StrategyOutcome> {
        self.outcomes.iter().find(|o| o.strategy == strategy)
    }
}

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(config: &ExperimentConfig, trial: u64) -> Vec<f64> {
    let mut rng = trial_rng(config.seed, trial);
    let instance = sample_instance(
        &config.params,
        config.n_solutions,
        config.n_tests,
        config.require_correct_solution,
        &mut rng,
    )
    .expect("configuration validated before the run");
    config
        .strategies
        .iter()
        .map(|s| {
            let selection = s.select(&instance.matrix, &mut rng);
            pass_at_1(&selection.chosen, &instance.x).expect("selections are non-empty")
        })
        .collect()
}

/// Runs every trial on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, SimError> {
    config.validate()?;
    let started = Instant::now();
    let per_trial: Vec<Vec<f64>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect();

    let n = per_trial.len() as f64;
    let outcomes = config
        .strategy_labels()
        .into_iter()
        .enumerate()
        .map(|(k, strategy)| {
            let mean = per_trial.iter().map(|r| r[k]).sum::<f64>() / n;
            let std_err = if per_trial.len() > 1 {
                let ss = per_trial
                    .iter()
                    .map(|r| (r[k] - mean).powi(2))
                    .sum::<f64>();
                (ss / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            StrategyOutcome {
                strategy,
                mean_pass_at_1: mean,
                std_err,
                trials: per_trial.len(),
            }
        })
        .collect();
    Ok(ExperimentReport {
        config: config.clone(),
        outcomes,
        elapsed_secs: started.elapsed().as_secs_f64(),
    })
}

/// Runs the experiment on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentReport, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))?;
    pool.install(|| run_experiment(config))
}

/// Configuration field varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "N", alias = "n")]
    NSolutions,
    #[serde(rename = "M", alias = "m")]
    NTests,
    #[serde(rename = "theta_x")]
    ThetaX,
    #[serde(rename = "theta_y")]
    ThetaY,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NSolutions => "N",
            SweepAxis::NTests => "M",
            SweepAxis::ThetaX => "theta_x",
            SweepAxis::ThetaY => "theta_y",
        }
    }

    /// Copy of `config` with this axis set to `value`.
    pub fn apply(self, config: &ExperimentConfig, value: f64) -> Result<ExperimentConfig, SimError> {
        let bad = || SimError::AxisValue { axis: self, value };
        let mut c = config.clone();
        match self {
            SweepAxis::NSolutions | SweepAxis::NTests => {
                let min = if self == SweepAxis::NSolutions { 1.0 } else { 0.0 };
                if !(value.is_finite() && value.fract() == 0.0 && value >= min) {
                    return Err(bad());
                }
                if self == SweepAxis::NSolutions {
                    c.n_solutions = value as usize;
                } else {
                    c.n_tests = value as usize;
                }
            }
            SweepAxis::ThetaX | SweepAxis::ThetaY => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(bad());
                }
                if self == SweepAxis::ThetaX {
                    c.params.theta_x = value;
                } else {
                    c.params.theta_y = value;
                }
            }
        }
        c.seed = derive_seed(config.seed, self, value);
        Ok(c)
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" | "n" => Ok(SweepAxis::NSolutions),
            "M" | "m" => Ok(SweepAxis::NTests),
            "theta_x" => Ok(SweepAxis::ThetaX),
            "theta_y" => Ok(SweepAxis::ThetaY),
            other => Err(SimError::Config(format!("unknown sweep axis {other:?}"))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one sweep point, a fixed function of `(seed, axis, value)`.
pub fn derive_seed(seed: u64, axis: SweepAxis, value: f64) -> u64 {
    let axis_tag = axis as u64 + 1;
    splitmix64(seed ^ splitmix64(axis_tag ^ splitmix64(value.to_bits())))
}

/// One report per value of `axis`, every other setting held at `config`.
pub fn sweep(
    config: &ExperimentConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<ExperimentReport>, SimError> {
    if values.is_empty() {
        return Err(SimError::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| axis.apply(config, v))
        .collect::<Result<Vec<_>, _>>()?;
    configs.iter().map(run_experiment).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::partition_consensus_sets;

    fn small_config(trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            trials,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn all_correct_rows_equal_truth() {
        let p = GenerativeParams::new(1.0, 0.3, 0.4, 0.1).unwrap();
        let mut rng = trial_rng(1, 0);
        let inst = sample_instance(&p, 6, 9, true, &mut rng).unwrap();
        assert_eq!(inst.x, LabelVector::ones(6));
        for row in inst.matrix.rows() {
            assert_eq!(row, inst.y.as_slice());
        }
    }

    #[test]
    fn indistinguishable_rates_give_one_set() {
        let p = GenerativeParams::new(0.5, 0.4, 1.0, 0.0).unwrap();
        let mut rng = trial_rng(2, 0);
        for _ in 0..50 {
            let inst = sample_instance(&p, 8, 12, true, &mut rng).unwrap();
            assert_eq!(partition_consensus_sets(&inst.matrix).len(), 1);
        }
    }

    #[test]
    fn conditional_correct_count() {
        let p = GenerativeParams::new(0.2, 0.3, 0.4, 0.1).unwrap();
        let mut rng = trial_rng(3, 0);
        let draws = 100_000;
        let total: usize = (0..draws)
            .map(|_| sample_instance(&p, 10, 0, true, &mut rng).unwrap().x.count_ones())
            .sum();
        let mean = total as f64 / draws as f64;
        let expected = 2.0 / (1.0 - 0.8f64.powi(10));
        // sd of the conditional count is about 1.2, so 3 sigma is ~0.012
        assert!((mean - expected).abs() < 0.012, "{mean} vs {expected}");
    }

    #[test]
    fn rejects_impossible_configs() {
        assert!(GenerativeParams::new(1.2, 0.3, 0.4, 0.1).is_err());
        let p = GenerativeParams::new(0.0, 0.3, 0.4, 0.1).unwrap();
        assert!(sample_instance(&p, 3, 3, true, &mut trial_rng(0, 0)).is_err());
        assert!(sample_instance(&p, 3, 3, false, &mut trial_rng(0, 0)).is_ok());
        let c = ExperimentConfig {
            trials: 0,
            ..ExperimentConfig::default()
        };
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn single_trial_is_reproducible() {
        let c = small_config(1);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert!(a.outcomes.iter().all(|o| o.std_err == 0.0 && o.trials == 1));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = small_config(500);
        let one = run_experiment_with_threads(&c, 1).unwrap();
        let four = run_experiment_with_threads(&c, 4).unwrap();
        assert_eq!(one.outcomes, four.outcomes);
    }

    #[test]
    fn everything_correct_scores_one() {
        let reports = sweep(&small_config(200), SweepAxis::ThetaX, &[1.0]).unwrap();
        for o in &reports[0].outcomes {
            assert_eq!(o.mean_pass_at_1, 1.0, "{}", o.strategy);
        }
    }

    #[test]
    fn sweep_rejects_bad_values() {
        let c = small_config(10);
        assert!(sweep(&c, SweepAxis::NSolutions, &[0.0]).is_err());
        assert!(sweep(&c, SweepAxis::NTests, &[2.5]).is_err());
        assert!(sweep(&c, SweepAxis::ThetaY, &[1.5]).is_err());
        assert!(sweep(&c, SweepAxis::ThetaY, &[]).is_err());
    }

    #[test]
    fn sweep_seeds_depend_on_axis_and_value() {
        let a = derive_seed(0, SweepAxis::NSolutions, 10.0);
        assert_eq!(a, derive_seed(0, SweepAxis::NSolutions, 10.0));
        assert_ne!(a, derive_seed(0, SweepAxis::NTests, 10.0));
        assert_ne!(a, derive_seed(0, SweepAxis::NSolutions, 20.0));
        assert_ne!(a, derive_seed(1, SweepAxis::NSolutions, 10.0));
    }

    #[test]
    fn config_defaults_from_empty_json() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"trials": 5, "strategies": [{"name": "b4", "beta0": 100}, {"name": "random"}]}"#,
        )
        .unwrap();
        assert_eq!(c.trials, 5);
        match c.strategies[0] {
            StrategySpec::B4 { hyper } => assert_eq!((hyper.beta0, hyper.alphax), (100.0, 10.0)),
            _ => panic!("expected b4"),
        }
        assert!(serde_json::from_str::<ExperimentConfig>(
            r#"{"strategies": [{"name": "codet", "beta0": 3}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"trails": 5}"#).is_err());
    }
}
