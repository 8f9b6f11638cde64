//! Closed-form error predictors for the heuristic strategies and a checker for
//! the prior-misspecification bound on the B4 posterior.
//!
//! The MaxPass and CodeT predictors are normal approximations. They are only
//! asymptotically exact, and the validators in [`crate::validation`] measure
//! how far they drift from exact or simulated values at finite sizes.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{ConsensusStats, LabelVector, MatrixError, PassingMatrix};
use crate::special::{log_beta, log_beta_unchecked, std_normal_cdf_unchecked, Quadrature, SpecialError};
use crate::strategies::B4Hyperparams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("{name} = {value} is not a probability")]
    Probability { name: &'static str, value: f64 },
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("variance {0} is not positive")]
    NonPositiveVariance(f64),
    #[error("label vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid prior: {0}")]
    Prior(String),
    #[error("N + M = {0} exceeds the enumeration limit of {max}", max = THEOREM1_MAX_DIM)]
    TooLarge(usize),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn check_probability(name: &'static str, value: f64) -> Result<(), TheoryError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(TheoryError::Probability { name, value })
    }
}

/// Whether both variance terms of the MaxPass approximation are at least 5.
pub fn in_clt_regime(theta_1: f64, theta_0: f64, n_y: usize, n_y_bar: usize) -> bool {
    n_y as f64 * theta_1 * (1.0 - theta_1) >= 5.0
        && n_y_bar as f64 * theta_0 * (1.0 - theta_0) >= 5.0
}

fn maxpass_z(theta_1: f64, theta_0: f64, n_y: usize, n_y_bar: usize) -> Result<f64, TheoryError> {
    check_probability("theta_1", theta_1)?;
    check_probability("theta_0", theta_0)?;
    if n_y + n_y_bar == 0 {
        return Err(TheoryError::Degenerate("no tests".into()));
    }
    let (ny, nyb) = (n_y as f64, n_y_bar as f64);
    let var = ny * theta_1 * (1.0 - theta_1) + nyb * theta_0 * (1.0 - theta_0);
    if var <= 0.0 {
        return Err(TheoryError::Degenerate(format!(
            "zero variance at theta_1 = {theta_1}, theta_0 = {theta_0}"
        )));
    }
    Ok((nyb * theta_0 - ny * (1.0 - theta_1)) / var.sqrt())
}

/// Normal approximation to the probability that one incorrect solution passes
/// at least `n_y` of the tests, when `n_y` tests are correct and `n_y_bar`
/// incorrect.
pub fn maxpass_incorrect_pass_prob(
    theta_1: f64,
    theta_0: f64,
    n_y: usize,
    n_y_bar: usize,
) -> Result<f64, TheoryError> {
    Ok(std_normal_cdf_unchecked(maxpass_z(theta_1, theta_0, n_y, n_y_bar)?))
}

/// Estimated probability that MaxPass ranks the correct solution strictly
/// first: no incorrect solution among `n_x_bar` reaches `n_y` passes.
pub fn maxpass_accuracy_estimate(
    theta_1: f64,
    theta_0: f64,
    n_y: usize,
    n_y_bar: usize,
    n_x_bar: usize,
) -> Result<f64, TheoryError> {
    let p = maxpass_incorrect_pass_prob(theta_1, theta_0, n_y, n_y_bar)?;
    Ok((1.0 - p).powf(n_x_bar as f64))
}

/// `ln(1 - accuracy)` of [`maxpass_accuracy_estimate`], accurate when the
/// failure probability is far below machine epsilon.
pub fn maxpass_log_failure_estimate(
    theta_1: f64,
    theta_0: f64,
    n_y: usize,
    n_y_bar: usize,
    n_x_bar: usize,
) -> Result<f64, TheoryError> {
    let p = maxpass_incorrect_pass_prob(theta_1, theta_0, n_y, n_y_bar)?;
    Ok((-(n_x_bar as f64 * (-p).ln_1p()).exp_m1()).ln())
}

/// Probability that an incorrect solution produces exactly the pass pattern
/// `y_hat` when the true test labels are `y`.
pub fn theta_prime(
    theta_x: f64,
    theta_1: f64,
    theta_0: f64,
    y: &LabelVector,
    y_hat: &LabelVector,
) -> Result<f64, TheoryError> {
    check_probability("theta_x", theta_x)?;
    check_probability("theta_1", theta_1)?;
    check_probability("theta_0", theta_0)?;
    if y.len() != y_hat.len() {
        return Err(TheoryError::LengthMismatch(y.len(), y_hat.len()));
    }
    let mut counts = [0u32; 4];
    for (&truth, &pass) in y.as_slice().iter().zip(y_hat.as_slice()) {
        counts[match (pass, truth) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        }] += 1;
    }
    let probs = [1.0 - theta_x, theta_1, 1.0 - theta_1, theta_0, 1.0 - theta_0];
    let exps = [1, counts[0], counts[1], counts[2], counts[3]];
    let mut log = 0.0;
    for (p, k) in probs.into_iter().zip(exps) {
        if k > 0 {
            log += k as f64 * p.ln();
        }
    }
    Ok(log.exp())
}

fn codet_moments(
    theta_x: f64,
    theta_prime: f64,
    n_y: usize,
    n_y_hat: usize,
) -> Result<(f64, f64), TheoryError> {
    check_probability("theta_x", theta_x)?;
    check_probability("theta_prime", theta_prime)?;
    if theta_x + theta_prime > 1.0 {
        return Err(TheoryError::Degenerate(format!(
            "theta_x + theta_prime = {} exceeds 1",
            theta_x + theta_prime
        )));
    }
    let (ny, nh) = (n_y as f64, n_y_hat as f64);
    let (a, b) = (theta_prime * nh, theta_x * ny);
    // equal expected scores written in decimal rarely cancel exactly
    let mean = if (a - b).abs() <= 4.0 * f64::EPSILON * (a + b) {
        0.0
    } else {
        a - b
    };
    let var = nh * nh * theta_prime * (1.0 - theta_prime) + ny * ny * theta_x * (1.0 - theta_x)
        - 2.0 * nh * ny * theta_prime * theta_x;
    Ok((mean, var))
}

/// Normal approximation to the probability that CodeT scores an incorrect
/// consensus set (pattern probability `theta_prime`, `n_y_hat` passed tests)
/// strictly above the correct set (`n_y` passed tests) among `n` solutions.
pub fn codet_error_prob(
    theta_x: f64,
    theta_prime: f64,
    n: usize,
    n_y: usize,
    n_y_hat: usize,
) -> Result<f64, TheoryError> {
    let (mean, var) = codet_moments(theta_x, theta_prime, n_y, n_y_hat)?;
    if var <= 0.0 {
        return Err(TheoryError::NonPositiveVariance(var));
    }
    if mean == 0.0 {
        return Ok(0.5);
    }
    Ok(std_normal_cdf_unchecked((n as f64).sqrt() * mean / var.sqrt()))
}

/// Simulated counterpart of [`codet_error_prob`]. Each of `n` solutions is
/// independently correct (probability `theta_x`), in the incorrect set
/// (`theta_prime`) or elsewhere; returns the fraction of `trials` in which
/// `n_incorrect * n_y_hat > n_correct * n_y`.
pub fn codet_error_monte_carlo<R: Rng + ?Sized>(
    theta_x: f64,
    theta_prime: f64,
    n: usize,
    n_y: usize,
    n_y_hat: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64, TheoryError> {
    codet_moments(theta_x, theta_prime, n_y, n_y_hat)?;
    if trials == 0 {
        return Err(TheoryError::Degenerate("zero trials".into()));
    }
    let mut errors = 0usize;
    for _ in 0..trials {
        let (mut correct, mut incorrect) = (0usize, 0usize);
        for _ in 0..n {
            let u: f64 = rng.random();
            if u < theta_x {
                correct += 1;
            } else if u < theta_x + theta_prime {
                incorrect += 1;
            }
        }
        if incorrect * n_y_hat > correct * n_y {
            errors += 1;
        }
    }
    Ok(errors as f64 / trials as f64)
}

/// One Beta component of a mixture prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaComponent {
    pub weight: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// A mixture of Beta densities on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BetaComponent>", into = "Vec<BetaComponent>")]
pub struct PriorSpec {
    components: Vec<BetaComponent>,
    log_norms: Vec<f64>,
}

impl TryFrom<Vec<BetaComponent>> for PriorSpec {
    type Error = TheoryError;

    fn try_from(components: Vec<BetaComponent>) -> Result<Self, Self::Error> {
        Self::mixture(components)
    }
}

impl From<PriorSpec> for Vec<BetaComponent> {
    fn from(p: PriorSpec) -> Self {
        p.components
    }
}

impl PriorSpec {
    /// Weights must be non-negative and sum to one within `1e-9`.
    pub fn mixture(components: Vec<BetaComponent>) -> Result<Self, TheoryError> {
        if components.is_empty() {
            return Err(TheoryError::Prior("no components".into()));
        }
        let mut total = 0.0;
        let mut log_norms = Vec::with_capacity(components.len());
        for c in &components {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(TheoryError::Prior(format!("weight {}", c.weight)));
            }
            total += c.weight;
            log_norms.push(
                log_beta(c.alpha, c.beta).map_err(|e| TheoryError::Prior(e.to_string()))?,
            );
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(TheoryError::Prior(format!("weights sum to {total}")));
        }
        Ok(Self {
            components,
            log_norms,
        })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self, TheoryError> {
        Self::mixture(vec![BetaComponent {
            weight: 1.0,
            alpha,
            beta,
        }])
    }

    pub fn components(&self) -> &[BetaComponent] {
        &self.components
    }

    pub fn density(&self, theta: f64) -> f64 {
        if !(0.0..=1.0).contains(&theta) {
            return 0.0;
        }
        self.components
            .iter()
            .zip(&self.log_norms)
            .filter(|(c, _)| c.weight > 0.0)
            .map(|(c, ln_b)| {
                let ln = (c.alpha - 1.0) * theta.ln() + (c.beta - 1.0) * (-theta).ln_1p() - ln_b;
                c.weight * ln.exp()
            })
            .sum()
    }

    /// `ln E[theta^s (1 - theta)^f]` under this prior.
    pub fn log_moment(&self, s: f64, f: f64) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_norms)
            .filter(|(c, _)| c.weight > 0.0)
            .map(|(c, ln_b)| c.weight.ln() + log_beta_unchecked(s + c.alpha, f + c.beta) - ln_b)
            .collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
    }
}

/// True priors for the four latent rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruePriors {
    pub theta_1: PriorSpec,
    pub theta_0: PriorSpec,
    pub theta_x: PriorSpec,
    pub theta_y: PriorSpec,
}

impl TruePriors {
    /// The Beta priors encoded by `hyper`.
    pub fn from_hyperparams(hyper: &B4Hyperparams) -> Result<Self, TheoryError> {
        Ok(Self {
            theta_1: PriorSpec::beta(hyper.alpha1, hyper.beta1)?,
            theta_0: PriorSpec::beta(hyper.alpha0, hyper.beta0)?,
            theta_x: PriorSpec::beta(hyper.alphax, hyper.betax)?,
            theta_y: PriorSpec::beta(hyper.alphay, hyper.betay)?,
        })
    }

    fn as_array(&self) -> [&PriorSpec; 4] {
        [&self.theta_1, &self.theta_0, &self.theta_x, &self.theta_y]
    }

    /// `ln P(E, x̂, ŷ)` for a consistent configuration with statistics `stats`.
    pub fn log_joint(&self, stats: &ConsensusStats, dims: (usize, usize)) -> f64 {
        let (n, m) = dims;
        let [p1, p0, px, py] = self.as_array();
        p1.log_moment(stats.n1 as f64, (stats.size_e1 - stats.n1) as f64)
            + p0.log_moment(stats.n0 as f64, (stats.size_e0 - stats.n0) as f64)
            + px.log_moment(stats.n_x as f64, (n - stats.n_x) as f64)
            + py.log_moment(stats.n_y as f64, (m - stats.n_y) as f64)
    }
}

/// Total variation distance per rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TotalVariation {
    pub theta_1: f64,
    pub theta_0: f64,
    pub theta_x: f64,
    pub theta_y: f64,
}

impl TotalVariation {
    pub fn sum(&self) -> f64 {
        self.theta_1 + self.theta_0 + self.theta_x + self.theta_y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckResult {
    /// `|P(x̂, ŷ | E) - P̂(E, x̂, ŷ) / P(E)|`.
    pub delta: f64,
    /// `2 / P(E)` times the summed total variation distances.
    pub bound: f64,
    /// Marginal probability of `E` under the true priors.
    pub p_e: f64,
    pub satisfied: bool,
    pub tv: TotalVariation,
    /// Consistent configurations enumerated for `P(E)`.
    pub configurations: u64,
}

/// Largest `N + M` accepted by [`check_theorem1_bound`].
pub const THEOREM1_MAX_DIM: usize = 12;

/// `0.5 * ∫ |p - q|` over `[0, 1]`.
pub fn total_variation(p: &PriorSpec, q: &PriorSpec, quad: &Quadrature) -> Result<f64, TheoryError> {
    if p == q {
        return Ok(0.0);
    }
    Ok(0.5 * quad.integrate(|t| (p.density(t) - q.density(t)).abs(), 0.0, 1.0)?)
}

/// Compares the posterior of `(x_hat, y_hat)` under `true_priors` with the
/// estimate obtained from the Beta priors in `assumed`, against the bound
/// `2 / P(E) * (TV_1 + TV_0 + TV_x + TV_y)`.
///
/// `P(E)` sums the joint over every configuration with at least one
/// predicted-correct solution whose rows all equal `ŷ`.
pub fn check_theorem1_bound(
    matrix: &PassingMatrix,
    x_hat: &LabelVector,
    y_hat: &LabelVector,
    true_priors: &TruePriors,
    assumed: &B4Hyperparams,
    quad: &Quadrature,
) -> Result<BoundCheckResult, TheoryError> {
    let (n, m) = matrix.dims();
    if n + m > THEOREM1_MAX_DIM {
        return Err(TheoryError::TooLarge(n + m));
    }
    if x_hat.len() != n {
        return Err(TheoryError::LengthMismatch(x_hat.len(), n));
    }
    if y_hat.len() != m {
        return Err(TheoryError::LengthMismatch(y_hat.len(), m));
    }
    assumed
        .validate()
        .map_err(|e| TheoryError::Prior(e.to_string()))?;
    let estimated = TruePriors::from_hyperparams(assumed)?;

    let mut log_terms = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let first = mask.trailing_zeros() as usize;
        let signature = matrix.row(first);
        let consistent = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .all(|i| matrix.row(i) == signature);
        if !consistent {
            continue;
        }
        let x = LabelVector::new((0..n).map(|i| mask & (1 << i) != 0).collect());
        let y = LabelVector::new(signature.to_vec());
        let stats = ConsensusStats::from_labels(matrix, &x, &y)?;
        log_terms.push(true_priors.log_joint(&stats, (n, m)));
    }
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_pe = max + log_terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();

    let target_consistent = x_hat.count_ones() >= 1
        && x_hat
            .ones_indices()
            .iter()
            .all(|&i| matrix.row(i) == y_hat.as_slice());
    let delta = if target_consistent {
        let stats = ConsensusStats::from_labels(matrix, x_hat, y_hat)?;
        let truth = (true_priors.log_joint(&stats, (n, m)) - ln_pe).exp();
        let approx = (estimated.log_joint(&stats, (n, m)) - ln_pe).exp();
        (truth - approx).abs()
    } else {
        0.0
    };

    let [t1, t0, tx, ty] = true_priors.as_array();
    let [e1, e0, ex, ey] = estimated.as_array();
    let tv = TotalVariation {
        theta_1: total_variation(t1, e1, quad)?,
        theta_0: total_variation(t0, e0, quad)?,
        theta_x: total_variation(tx, ex, quad)?,
        theta_y: total_variation(ty, ey, quad)?,
    };
    let bound = 2.0 * tv.sum() * (-ln_pe).exp();
    Ok(BoundCheckResult {
        delta,
        bound,
        p_e: ln_pe.exp(),
        satisfied: delta <= bound,
        tv,
        configurations: log_terms.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::binomial_sum_tail;
    use crate::strategies::score_b4;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(b: &[u8]) -> LabelVector {
        LabelVector::from_bits(b).unwrap()
    }

    #[test]
    fn maxpass_balanced_point() {
        assert_eq!(maxpass_incorrect_pass_prob(0.6, 0.2, 60, 120).unwrap(), 0.5);
        assert_eq!(maxpass_accuracy_estimate(0.6, 0.2, 60, 120, 3).unwrap(), 0.125);
        assert_eq!(maxpass_accuracy_estimate(0.6, 0.2, 60, 120, 0).unwrap(), 1.0);
    }

    #[test]
    fn maxpass_far_tail() {
        let p = maxpass_incorrect_pass_prob(0.5, 0.0, 100, 50).unwrap();
        // mean -50, sd 5
        assert!((p / 7.619853024160527e-24 - 1.0).abs() < 1e-9, "{p}");
        let ln = maxpass_log_failure_estimate(0.5, 0.0, 100, 50, 1).unwrap();
        assert!((ln - p.ln()).abs() < 1e-9);
    }

    #[test]
    fn maxpass_errors() {
        assert!(maxpass_incorrect_pass_prob(1.0, 0.0, 5, 5).is_err());
        assert!(maxpass_incorrect_pass_prob(0.5, 0.5, 0, 0).is_err());
        assert!(maxpass_incorrect_pass_prob(1.5, 0.5, 3, 3).is_err());
    }

    #[test]
    fn maxpass_vs_exact_at_balanced_point() {
        let approx = maxpass_incorrect_pass_prob(0.6, 0.2, 60, 120).unwrap();
        let exact = binomial_sum_tail(60, 0.6, 120, 0.2, 60).unwrap();
        // the uncorrected normal approximation is off by about 0.03 here
        assert!((exact - approx - 0.0314532376470239).abs() < 1e-9);
    }

    #[test]
    fn theta_prime_examples() {
        let y = bits(&[1, 1, 0]);
        let v = theta_prime(0.2, 0.4, 0.1, &y, &y).unwrap();
        assert!((v - 0.1152).abs() < 1e-15);
        assert!((theta_prime(0.3, 1.0, 0.0, &y, &y).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(theta_prime(0.3, 1.0, 0.0, &y, &bits(&[0, 1, 0])).unwrap(), 0.0);
        assert!(theta_prime(0.3, 0.5, 0.5, &y, &bits(&[1, 1])).is_err());
    }

    #[test]
    fn theta_prime_sums_to_incorrect_mass() {
        let y = bits(&[1, 0, 1, 1]);
        let total: f64 = (0..16u8)
            .map(|m| {
                let yh = LabelVector::new((0..4).map(|j| m >> j & 1 == 1).collect());
                theta_prime(0.35, 0.3, 0.6, &y, &yh).unwrap()
            })
            .sum();
        assert!((total - 0.65).abs() < 1e-14);
    }

    #[test]
    fn codet_examples() {
        assert_eq!(codet_error_prob(0.3, 0.1, 50, 1, 3).unwrap(), 0.5);
        let v = codet_error_prob(0.3, 0.1, 100, 3, 4).unwrap();
        // Phi(-5 / sqrt(2.61))
        assert!((v / 9.843223003381321e-4 - 1.0).abs() < 1e-10, "{v}");
        assert!(codet_error_prob(0.0, 0.0, 10, 2, 2).is_err());
        assert!(codet_error_prob(0.7, 0.5, 10, 2, 2).is_err());
    }

    #[test]
    fn codet_monte_carlo_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mc = codet_error_monte_carlo(0.1, 0.13, 400, 4, 3, 20_000, &mut rng).unwrap();
        let formula = codet_error_prob(0.1, 0.13, 400, 4, 3).unwrap();
        assert!((mc - formula).abs() < 0.02, "{mc} vs {formula}");
    }

    #[test]
    fn prior_validation() {
        let c = |weight, alpha, beta| BetaComponent {
            weight,
            alpha,
            beta,
        };
        assert!(PriorSpec::mixture(vec![]).is_err());
        assert!(PriorSpec::mixture(vec![c(0.5, 1.0, 1.0)]).is_err());
        assert!(PriorSpec::mixture(vec![c(1.0, 0.0, 1.0)]).is_err());
        assert!(PriorSpec::mixture(vec![c(-0.5, 1.0, 1.0), c(1.5, 1.0, 1.0)]).is_err());
        let p = PriorSpec::mixture(vec![c(0.25, 2.0, 5.0), c(0.75, 4.0, 1.5)]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<PriorSpec>(&json).unwrap(), p);
        assert!(serde_json::from_str::<PriorSpec>(r#"[{"weight":2,"alpha":1,"beta":1}]"#).is_err());
    }

    #[test]
    fn mixture_moment_matches_quadrature() {
        let p = PriorSpec::mixture(vec![
            BetaComponent {
                weight: 0.3,
                alpha: 2.0,
                beta: 7.0,
            },
            BetaComponent {
                weight: 0.7,
                alpha: 5.0,
                beta: 1.5,
            },
        ])
        .unwrap();
        let quad = Quadrature::default();
        for (s, f) in [(0.0, 0.0), (3.0, 4.0), (7.0, 1.0), (0.0, 9.0)] {
            let direct = quad
                .integrate(|t| t.powf(s) * (1.0 - t).powf(f) * p.density(t), 0.0, 1.0)
                .unwrap();
            assert!((p.log_moment(s, f).exp() - direct).abs() < 1e-9, "{s} {f}");
        }
    }

    #[test]
    fn assumed_joint_matches_b4_score() {
        let e = PassingMatrix::new(&[[1, 1, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
        let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let priors = TruePriors::from_hyperparams(&hyper).unwrap();
        let x = bits(&[1, 1, 0]);
        let y = bits(&[1, 1, 0]);
        let stats = ConsensusStats::from_labels(&e, &x, &y).unwrap();
        let normalizer = log_beta(1.0, 1.0).unwrap() * 2.0
            + log_beta(1.0, 10.0).unwrap()
            + log_beta(10.0, 1.0).unwrap() * 2.0;
        let expected = score_b4(&stats, (3, 3), &hyper) - normalizer;
        assert!((priors.log_joint(&stats, (3, 3)) - expected).abs() < 1e-12);
    }

    #[test]
    fn equal_priors_give_zero() {
        let e = PassingMatrix::new(&[[1, 1, 1], [1, 1, 1], [0, 1, 1]]).unwrap();
        let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let priors = TruePriors::from_hyperparams(&hyper).unwrap();
        let r = check_theorem1_bound(
            &e,
            &bits(&[1, 1, 0]),
            &bits(&[1, 1, 1]),
            &priors,
            &hyper,
            &Quadrature::default(),
        )
        .unwrap();
        assert_eq!((r.delta, r.bound), (0.0, 0.0));
        assert!(r.satisfied);
        // {0}, {1}, {0,1}, {2}
        assert_eq!(r.configurations, 4);
    }

    #[test]
    fn truncated_running_example_bound_holds() {
        let e = PassingMatrix::new(&[[1, 1, 1], [1, 1, 1], [0, 1, 1]]).unwrap();
        let mix = |a: f64, b: f64| {
            PriorSpec::mixture(vec![
                BetaComponent {
                    weight: 0.6,
                    alpha: a,
                    beta: b,
                },
                BetaComponent {
                    weight: 0.4,
                    alpha: 2.0,
                    beta: 2.0,
                },
            ])
            .unwrap()
        };
        let priors = TruePriors {
            theta_1: mix(1.5, 1.0),
            theta_0: mix(1.0, 6.0),
            theta_x: mix(6.0, 1.5),
            theta_y: mix(5.0, 1.0),
        };
        let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let r = check_theorem1_bound(
            &e,
            &bits(&[1, 1, 0]),
            &bits(&[1, 1, 1]),
            &priors,
            &hyper,
            &Quadrature::default(),
        )
        .unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!(r.delta > 0.0 && r.p_e > 0.0 && r.p_e < 1.0);
    }

    #[test]
    fn bound_size_guard() {
        let e = PassingMatrix::new(&[[0u8; 10], [0u8; 10], [0u8; 10]]).unwrap();
        let hyper = B4Hyperparams::default();
        let priors = TruePriors::from_hyperparams(&hyper).unwrap();
        let r = check_theorem1_bound(
            &e,
            &LabelVector::ones(3),
            &LabelVector::zeros(10),
            &priors,
            &hyper,
            &Quadrature::default(),
        );
        assert_eq!(r, Err(TheoryError::TooLarge(13)));
    }
}
