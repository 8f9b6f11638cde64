//! Bayesian selection of generated code solutions from a passing matrix.
//!
//! A passing matrix records which of `N` candidate solutions pass which of `M`
//! generated tests. Neither the solutions nor the tests are known to be
//! correct. Solutions with identical rows form consensus sets, and the B4
//! strategy ranks those sets by a closed-form log posterior built from four
//! Beta integrals. CodeT, MBR-exec, MaxPass and uniform random selection are
//! provided as baselines.
//!
//! Modules:
//!
//! * [`matrix`]: the matrix, consensus partition and per-set statistics.
//! * [`special`]: log-gamma, normal tails, binomial convolutions, quadrature.
//! * [`strategies`]: B4 and the baselines, plus an exhaustive MAP oracle.
//! * [`simulator`]: synthetic matrices and seeded parallel Monte Carlo runs.
//! * [`theory`]: error predictors for MaxPass and CodeT and the prior
//!   misspecification bound.
//! * [`validation`]: numerical check suites over [`theory`].
//! * [`io`] and [`cli`]: file formats and the `plausel` command.
//!
//! ```
//! use plausel::{select_b4, B4Hyperparams, PassingMatrix};
//!
//! let e = PassingMatrix::new(&[
//!     [1, 1, 1, 0, 0],
//!     [1, 1, 1, 0, 0],
//!     [0, 1, 1, 1, 1],
//!     [0, 0, 1, 1, 0],
//! ])
//! .unwrap();
//! let result = select_b4(&e, &B4Hyperparams::b4(10.0, 10.0).unwrap());
//! assert_eq!(result.chosen, vec![0, 1]);
//! ```

pub mod cli;
pub mod io;
pub mod matrix;
pub mod simulator;
pub mod special;
pub mod strategies;
pub mod theory;
pub mod validation;

pub use io::{load_matrix, MatrixFile, MatrixFormat};
pub use matrix::{
    consensus_stats, partition_consensus_sets, pass_at_1, ConsensusSet, ConsensusStats,
    LabelVector, MatrixError, PassingMatrix,
};
pub use simulator::{
    run_experiment, sample_instance, sweep, ExperimentConfig, ExperimentReport,
    GenerativeParams, SweepAxis,
};
pub use strategies::{
    brute_force_map, score_b4, select_b4, select_codet, select_maxpass, select_mbr_exec,
    select_random, B4Hyperparams, SelectionResult, StrategyKind, StrategySpec,
};
pub use theory::{check_theorem1_bound, BoundCheckResult, PriorSpec, TruePriors};
