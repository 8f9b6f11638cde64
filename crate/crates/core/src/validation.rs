//! Numerical checks of the theory predictors, grouped into suites.
//!
//! Each check records what it measured, the tolerance it was held to and
//! whether it passed. Suites are deterministic for a given seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{partition_consensus_sets, LabelVector, PassingMatrix};
use crate::special::{binomial_sum_tail, normal_tail_bounds, std_normal_cdf, Quadrature};
use crate::strategies::{select_b4, B4Hyperparams};
use crate::theory::{
    check_theorem1_bound, codet_error_monte_carlo, codet_error_prob, in_clt_regime,
    maxpass_accuracy_estimate, maxpass_incorrect_pass_prob, maxpass_log_failure_estimate,
    theta_prime, BetaComponent, PriorSpec, TheoryError, TruePriors,
};

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("unknown suite {0:?}; expected one of all, tails, maxpass, codet, bound")]
    UnknownSuite(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Tails,
    MaxPass,
    CodeT,
    Bound,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 4] = [Suite::Tails, Suite::MaxPass, Suite::CodeT, Suite::Bound];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Tails => "tails",
            Suite::MaxPass => "maxpass",
            Suite::CodeT => "codet",
            Suite::Bound => "bound",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = ValidationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "tails" => Ok(Suite::Tails),
            "maxpass" => Ok(Suite::MaxPass),
            "codet" => Ok(Suite::CodeT),
            "bound" => Ok(Suite::Bound),
            _ => Err(ValidationError::UnknownSuite(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// The 50 parameter points on which the MaxPass normal approximation is
/// compared with the exact convolution: `(theta_1, theta_0, n_y, n_y_bar)`.
/// All lie in the regime where both variance terms are at least 5, and the
/// first is the balanced point where the approximation equals 0.5.
pub fn maxpass_tail_grid() -> Vec<(f64, f64, usize, usize)> {
    let mut grid = vec![(0.6, 0.2, 60, 120)];
    for &theta_1 in &[0.4, 0.5, 0.6, 0.7, 0.8] {
        for &theta_0 in &[0.1, 0.2] {
            for &(n_y, n_y_bar) in &[(60, 120), (100, 100), (200, 400), (400, 200), (1000, 1000)] {
                if (theta_1, theta_0, n_y, n_y_bar) != grid[0] {
                    grid.push((theta_1, theta_0, n_y, n_y_bar));
                }
            }
        }
    }
    debug_assert_eq!(grid.len(), 50);
    grid
}

/// `(n_incorrect_pass_prob_formula, exact)` for one grid point.
pub fn maxpass_tail_pair(theta_1: f64, theta_0: f64, n_y: usize, n_y_bar: usize) -> Result<(f64, f64), TheoryError> {
    let formula = maxpass_incorrect_pass_prob(theta_1, theta_0, n_y, n_y_bar)?;
    let exact = binomial_sum_tail(n_y, theta_1, n_y_bar, theta_0, n_y)?;
    Ok((formula, exact))
}

/// Geometric grid of solution counts used for the CodeT convergence checks.
pub const CODET_N_GRID: [usize; 4] = [100, 1_000, 10_000, 100_000];

/// `(theta_x, theta_prime, n_y, n_y_hat)` where the correct set has the
/// higher expected CodeT score.
pub const CODET_FAVORABLE: (f64, f64, usize, usize) = (0.2, 0.1, 3, 5);
/// `(theta_x, theta_prime, n_y, n_y_hat)` where an incorrect set has the
/// higher expected CodeT score.
pub const CODET_UNFAVORABLE: (f64, f64, usize, usize) = (0.1, 0.142, 4, 3);

/// CodeT error predictions across [`CODET_N_GRID`].
pub fn codet_curve(point: (f64, f64, usize, usize)) -> Result<Vec<f64>, TheoryError> {
    let (theta_x, theta_prime, n_y, n_y_hat) = point;
    CODET_N_GRID
        .iter()
        .map(|&n| codet_error_prob(theta_x, theta_prime, n, n_y, n_y_hat))
        .collect()
}

/// Enumeration oracle for `theta_prime`: sums the probability of every row an
/// incorrect solution can produce, keeping those equal to `y_hat`.
pub fn theta_prime_by_enumeration(
    theta_x: f64,
    theta_1: f64,
    theta_0: f64,
    y: &LabelVector,
    y_hat: &LabelVector,
) -> f64 {
    let m = y.len();
    let mut total = 0.0;
    for row in 0u32..(1 << m) {
        let mut p = 1.0 - theta_x;
        for j in 0..m {
            let pass = row >> j & 1 == 1;
            let rate = if y.get(j) { theta_1 } else { theta_0 };
            p *= if pass { rate } else { 1.0 - rate };
        }
        let matches = (0..m).all(|j| (row >> j & 1 == 1) == y_hat.get(j));
        if matches {
            total += p;
        }
    }
    total
}

/// A random mixture of one to three Beta components with shape parameters in
/// `[1, 8]`.
pub fn random_mixture<R: Rng + ?Sized>(rng: &mut R) -> PriorSpec {
    let k = rng.random_range(1..=3);
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut components: Vec<BetaComponent> = raw
        .iter()
        .map(|w| BetaComponent {
            weight: w / total,
            alpha: rng.random_range(1.0..8.0),
            beta: rng.random_range(1.0..8.0),
        })
        .collect();
    // force an exact unit sum
    let rest: f64 = components[1..].iter().map(|c| c.weight).sum();
    components[0].weight = 1.0 - rest;
    PriorSpec::mixture(components).expect("weights and shapes are valid")
}

/// A small random problem for the prior-misspecification bound: a matrix with
/// `N + M <= 12` and some duplicated rows, the B4 choice under random assumed
/// hyperparameters, and random mixture priors.
pub struct BoundInstance {
    pub matrix: PassingMatrix,
    pub x_hat: LabelVector,
    pub y_hat: LabelVector,
    pub true_priors: TruePriors,
    pub assumed: B4Hyperparams,
}

pub fn random_bound_instance<R: Rng + ?Sized>(rng: &mut R) -> BoundInstance {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(0..=(12 - n).min(6));
    let template: Vec<bool> = (0..m).map(|_| rng.random_bool(0.5)).collect();
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|_| {
            if rng.random_bool(0.4) {
                template.clone()
            } else {
                (0..m).map(|_| rng.random_bool(0.5)).collect()
            }
        })
        .collect();
    let matrix = PassingMatrix::from_bool_rows(&rows).expect("rectangular");
    let mut h = || rng.random_range(0.0f64..20f64.ln()).exp();
    let assumed = B4Hyperparams::new(h(), h(), h(), h(), h(), h(), h(), h()).expect("positive");
    let (x_hat, y_hat) = if rng.random_bool(0.5) {
        let set = select_b4(&matrix, &assumed)
            .chosen_set
            .expect("B4 always returns a set");
        (set.solution_labels(n), set.test_signature)
    } else {
        let sets = partition_consensus_sets(&matrix);
        let set = &sets[rng.random_range(0..sets.len())];
        (set.solution_labels(n), set.test_signature.clone())
    };
    let true_priors = TruePriors {
        theta_1: random_mixture(rng),
        theta_0: random_mixture(rng),
        theta_x: random_mixture(rng),
        theta_y: random_mixture(rng),
    };
    BoundInstance {
        matrix,
        x_hat,
        y_hat,
        true_priors,
        assumed,
    }
}

fn check(suite: Suite, name: &str, measured: f64, tolerance: f64, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name: name.to_string(),
        measured,
        tolerance,
        passed,
        detail,
    }
}

fn tails_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, ValidationError> {
    let mut violations = 0;
    let mut worst_gap = f64::INFINITY;
    for _ in 0..1000 {
        let t = rng.random_range(1.0..10.0);
        let bounds = normal_tail_bounds(t).map_err(TheoryError::from)?;
        let v = std_normal_cdf(-t).map_err(TheoryError::from)?;
        if !bounds.contains(v) {
            violations += 1;
        }
        worst_gap = worst_gap.min((v - bounds.lower).min(bounds.upper - v) / v);
    }
    Ok(vec![check(
        Suite::Tails,
        "normal_tail_sandwich",
        violations as f64,
        0.0,
        violations == 0,
        format!("1000 random t in (1, 10); smallest relative margin {worst_gap:.3e}"),
    )])
}

fn maxpass_checks() -> Result<Vec<Check>, ValidationError> {
    let mut checks = Vec::new();

    let grid = maxpass_tail_grid();
    let mut worst = (0.0, grid[0]);
    for &point in &grid {
        let (t1, t0, ny, nyb) = point;
        debug_assert!(in_clt_regime(t1, t0, ny, nyb));
        let (formula, exact) = maxpass_tail_pair(t1, t0, ny, nyb)?;
        let err = (formula - exact).abs();
        if err > worst.0 {
            worst = (err, point);
        }
    }
    let (balanced_formula, balanced_exact) = maxpass_tail_pair(0.6, 0.2, 60, 120)?;
    checks.push(check(
        Suite::MaxPass,
        "incorrect_pass_prob_vs_exact",
        worst.0,
        0.02,
        worst.0 <= 0.02,
        format!(
            "max abs error over {} grid points at {:?}; balanced point formula {balanced_formula:.6} exact {balanced_exact:.6}",
            grid.len(),
            worst.1
        ),
    ));

    // accuracy in n_y with n_y_bar = n_y and five incorrect solutions
    let (t1, t0, n_x_bar) = (0.5, 0.1, 5);
    let n_grid = [5usize, 10, 20, 40, 80, 160, 320];
    let acc: Vec<f64> = n_grid
        .iter()
        .map(|&n| maxpass_accuracy_estimate(t1, t0, n, n, n_x_bar))
        .collect::<Result<_, _>>()?;
    let log_fail: Vec<f64> = n_grid
        .iter()
        .map(|&n| maxpass_log_failure_estimate(t1, t0, n, n, n_x_bar))
        .collect::<Result<_, _>>()?;
    let non_increasing = acc.windows(2).filter(|w| w[1] < w[0]).count()
        + log_fail.windows(2).filter(|w| w[1] >= w[0]).count();
    checks.push(check(
        Suite::MaxPass,
        "accuracy_increasing_in_n_y",
        non_increasing as f64,
        0.0,
        non_increasing == 0,
        format!("n_y grid {n_grid:?}; accuracy {acc:?}"),
    ));
    // asymptotic decay rate of ln(1 - accuracy) is k^2 / 2 per test
    let k = ((1.0 - t1) - t0) / (t1 * (1.0 - t1) + t0 * (1.0 - t0)).sqrt();
    let required = -0.25 * k * k;
    let worst_rate = n_grid
        .iter()
        .zip(&log_fail)
        .skip(1)
        .map(|(&n, &lf)| (lf - log_fail[0]) / (n - n_grid[0]) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(check(
        Suite::MaxPass,
        "log_failure_decays_linearly",
        worst_rate,
        required,
        worst_rate <= required,
        format!("slowest average slope of ln(1 - accuracy) from n_y = 5; required <= -k^2/4 with k = {k:.4}"),
    ));

    // accuracy in the number of incorrect solutions at the balanced point
    let mut prev = 1.0;
    let mut strictly_decreasing = true;
    for n_x_bar in 1..=50 {
        let a = maxpass_accuracy_estimate(0.6, 0.2, 60, 120, n_x_bar)?;
        strictly_decreasing &= a < prev;
        prev = a;
    }
    checks.push(check(
        Suite::MaxPass,
        "accuracy_vanishes_in_n_x_bar",
        prev,
        1e-4,
        strictly_decreasing && prev < 1e-4,
        "balanced point over n_x_bar = 1..=50; measured is the estimate at 50".into(),
    ));
    Ok(checks)
}

fn codet_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, ValidationError> {
    let mut checks = Vec::new();

    let mut worst_rel: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=10);
        let y = LabelVector::new((0..m).map(|_| rng.random_bool(0.5)).collect());
        let y_hat = LabelVector::new((0..m).map(|_| rng.random_bool(0.5)).collect());
        let (tx, t1, t0) = (rng.random(), rng.random(), rng.random());
        let closed = theta_prime(tx, t1, t0, &y, &y_hat)?;
        let oracle = theta_prime_by_enumeration(tx, t1, t0, &y, &y_hat);
        let rel = if oracle == 0.0 {
            closed.abs()
        } else {
            ((closed - oracle) / oracle).abs()
        };
        worst_rel = worst_rel.max(rel);
    }
    checks.push(check(
        Suite::CodeT,
        "theta_prime_vs_enumeration",
        worst_rel,
        1e-12,
        worst_rel <= 1e-12,
        "100 random parameterizations with M <= 10; max relative error".into(),
    ));

    let down = codet_curve(CODET_FAVORABLE)?;
    let strictly_down = down.windows(2).all(|w| w[1] < w[0]);
    let last_down = *down.last().unwrap();
    checks.push(check(
        Suite::CodeT,
        "error_vanishes_when_correct_set_favored",
        last_down,
        1e-6,
        strictly_down && last_down < 1e-6,
        format!("N grid {CODET_N_GRID:?}; error {down:?}"),
    ));

    let up = codet_curve(CODET_UNFAVORABLE)?;
    let strictly_up = up.windows(2).all(|w| w[1] > w[0]);
    let last_up = *up.last().unwrap();
    checks.push(check(
        Suite::CodeT,
        "error_approaches_one_when_incorrect_set_favored",
        last_up,
        1.0 - 1e-6,
        strictly_up && last_up > 1.0 - 1e-6,
        format!("N grid {CODET_N_GRID:?}; error {up:?}"),
    ));

    let (tx, tp, n, ny, nh) = (0.1, 0.13, 400, 4, 3);
    let mc = codet_error_monte_carlo(tx, tp, n, ny, nh, 20_000, rng)?;
    let formula = codet_error_prob(tx, tp, n, ny, nh)?;
    checks.push(check(
        Suite::CodeT,
        "error_prob_vs_monte_carlo",
        (mc - formula).abs(),
        0.02,
        (mc - formula).abs() <= 0.02,
        format!("N = {n}, 20000 trials; simulated {mc:.4}, formula {formula:.4}"),
    ));
    Ok(checks)
}

fn bound_checks(rng: &mut ChaCha8Rng) -> Result<Vec<Check>, ValidationError> {
    let quad = Quadrature::default();
    let mut unsatisfied = 0;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..100 {
        let inst = random_bound_instance(rng);
        let r = check_theorem1_bound(
            &inst.matrix,
            &inst.x_hat,
            &inst.y_hat,
            &inst.true_priors,
            &inst.assumed,
            &quad,
        )?;
        if !r.satisfied {
            unsatisfied += 1;
        }
        if r.bound > 0.0 {
            worst_ratio = worst_ratio.max(r.delta / r.bound);
        }
    }
    Ok(vec![check(
        Suite::Bound,
        "posterior_error_within_prior_bound",
        unsatisfied as f64,
        0.0,
        unsatisfied == 0,
        format!("100 random instances with N + M <= 12; largest delta / bound {worst_ratio:.3e}"),
    )])
}

/// Runs `suite` with every random draw taken from `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<ValidationReport, ValidationError> {
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::INDIVIDUAL.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for s in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        checks.extend(match s {
            Suite::Tails => tails_checks(&mut rng)?,
            Suite::MaxPass => maxpass_checks()?,
            Suite::CodeT => codet_checks(&mut rng)?,
            Suite::Bound => bound_checks(&mut rng)?,
            Suite::All => unreachable!(),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        suite,
        seed,
        checks,
        passed,
    })
}
