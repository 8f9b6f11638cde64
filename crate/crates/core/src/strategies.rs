//! Selection strategies over a passing matrix.
//!
//! The clustering strategies (B4, CodeT, MBR-exec) partition solutions into
//! consensus sets and pick the best-scoring set. MaxPass ranks individual rows
//! by pass count and Random picks one solution uniformly. Every clustering
//! strategy breaks ties the same way: higher score, then more solutions, then
//! earlier partition order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{
    consensus_stats, partition_consensus_sets, ConsensusSet, ConsensusStats, LabelVector,
    PassingMatrix,
};
use crate::special::log_beta_unchecked;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("hyperparameter {name} = {value} must be positive and finite")]
    Hyperparameter { name: &'static str, value: f64 },
    #[error("unknown strategy {0:?} (expected b4, codet, mbr-exec, maxpass or random)")]
    UnknownStrategy(String),
    #[error("strategy {0} takes no hyperparameters")]
    UnexpectedHyperparameters(StrategyKind),
    #[error("brute-force MAP enumerates 2^(N+M) configurations; N + M = {0} exceeds the limit of {max}", max = BRUTE_FORCE_MAX_DIM)]
    TooLarge(usize),
}

/// Beta-prior parameters for the four latent rates: `theta_1` (incorrect
/// solution passes correct test), `theta_0` (incorrect solution passes
/// incorrect test), `theta_x` and `theta_y` (solution / test is correct).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B4Hyperparams {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub alphax: f64,
    pub betax: f64,
    pub alphay: f64,
    pub betay: f64,
}

impl B4Hyperparams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha1: f64,
        beta1: f64,
        alpha0: f64,
        beta0: f64,
        alphax: f64,
        betax: f64,
        alphay: f64,
        betay: f64,
    ) -> Result<Self, StrategyError> {
        let h = Self {
            alpha1,
            beta1,
            alpha0,
            beta0,
            alphax,
            betax,
            alphay,
            betay,
        };
        h.validate()?;
        Ok(h)
    }

    /// The two-knob prior: uniform `theta_1`, `Beta(1, beta0)` for `theta_0`
    /// and `Beta(alpha_xy, 1)` for both `theta_x` and `theta_y`.
    pub fn b4(beta0: f64, alpha_xy: f64) -> Result<Self, StrategyError> {
        Self::new(1.0, 1.0, 1.0, beta0, alpha_xy, 1.0, alpha_xy, 1.0)
    }

    /// All eight parameters equal to one.
    pub fn uniform() -> Self {
        Self {
            alpha1: 1.0,
            beta1: 1.0,
            alpha0: 1.0,
            beta0: 1.0,
            alphax: 1.0,
            betax: 1.0,
            alphay: 1.0,
            betay: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        for (name, value) in [
            ("alpha1", self.alpha1),
            ("beta1", self.beta1),
            ("alpha0", self.alpha0),
            ("beta0", self.beta0),
            ("alphax", self.alphax),
            ("betax", self.betax),
            ("alphay", self.alphay),
            ("betay", self.betay),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(StrategyError::Hyperparameter { name, value });
            }
        }
        Ok(())
    }
}

impl Default for B4Hyperparams {
    fn default() -> Self {
        Self::b4(10.0, 10.0).expect("defaults are positive")
    }
}

/// Log posterior score (up to a constant shared by all configurations of one
/// matrix) of the configuration summarised by `stats`: the sum of four log
/// Beta functions.
pub fn score_b4(stats: &ConsensusStats, dims: (usize, usize), hyper: &B4Hyperparams) -> f64 {
    let (n, m) = dims;
    let h = hyper;
    let zeros_e1 = (stats.size_e1 - stats.n1) as f64;
    let zeros_e0 = (stats.size_e0 - stats.n0) as f64;
    log_beta_unchecked(stats.n1 as f64 + h.alpha1, zeros_e1 + h.beta1)
        + log_beta_unchecked(stats.n0 as f64 + h.alpha0, zeros_e0 + h.beta0)
        + log_beta_unchecked(stats.n_x as f64 + h.alphax, (n - stats.n_x) as f64 + h.betax)
        + log_beta_unchecked(stats.n_y as f64 + h.alphay, (m - stats.n_y) as f64 + h.betay)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    B4,
    #[serde(rename = "codet")]
    CodeT,
    MbrExec,
    #[serde(rename = "maxpass")]
    MaxPass,
    Random,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::B4,
        StrategyKind::CodeT,
        StrategyKind::MbrExec,
        StrategyKind::MaxPass,
        StrategyKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::B4 => "b4",
            StrategyKind::CodeT => "codet",
            StrategyKind::MbrExec => "mbr-exec",
            StrategyKind::MaxPass => "maxpass",
            StrategyKind::Random => "random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| StrategyError::UnknownStrategy(s.to_string()))
    }
}

/// Outcome of running one strategy on one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub strategy: StrategyKind,
    /// Ascending indices of the selected solutions; never empty.
    pub chosen: Vec<usize>,
    /// The winning consensus set, for clustering strategies.
    pub chosen_set: Option<ConsensusSet>,
    /// The consensus-set partition the scores refer to.
    pub partition: Vec<ConsensusSet>,
    /// One score per consensus set, aligned with `partition`. B4 scores are
    /// log posteriors; the heuristics report their raw counts. Absent for Random.
    pub per_set_scores: Option<Vec<f64>>,
}

impl SelectionResult {
    pub fn chosen_labels(&self, n_solutions: usize) -> LabelVector {
        LabelVector::from_indices(n_solutions, &self.chosen).expect("chosen indices are in range")
    }
}

/// Index of the best set: highest score, then more solutions, then earliest.
fn argmax_with_tie_break(partition: &[ConsensusSet], scores: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..partition.len() {
        let better = match scores[k].total_cmp(&scores[best]) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => partition[k].n_x() > partition[best].n_x(),
            std::cmp::Ordering::Less => false,
        };
        if better {
            best = k;
        }
    }
    best
}

fn select_clustered(
    strategy: StrategyKind,
    matrix: &PassingMatrix,
    score: impl Fn(&ConsensusSet) -> f64,
) -> SelectionResult {
    let partition = partition_consensus_sets(matrix);
    let scores: Vec<f64> = partition.iter().map(score).collect();
    let best = argmax_with_tie_break(&partition, &scores);
    let chosen_set = partition[best].clone();
    SelectionResult {
        strategy,
        chosen: chosen_set.solution_indices.clone(),
        chosen_set: Some(chosen_set),
        partition,
        per_set_scores: Some(scores),
    }
}

/// Scores every consensus set with the four-Beta posterior and returns the best.
pub fn select_b4(matrix: &PassingMatrix, hyper: &B4Hyperparams) -> SelectionResult {
    let dims = matrix.dims();
    select_clustered(StrategyKind::B4, matrix, |set| {
        let stats = consensus_stats(matrix, set).expect("partition sets are consistent");
        score_b4(&stats, dims, hyper)
    })
}

/// Scores each consensus set by `n_x * n_y`.
pub fn select_codet(matrix: &PassingMatrix) -> SelectionResult {
    select_clustered(StrategyKind::CodeT, matrix, |set| {
        (set.n_x() * set.n_y()) as f64
    })
}

/// Scores each consensus set by its number of solutions.
pub fn select_mbr_exec(matrix: &PassingMatrix) -> SelectionResult {
    select_clustered(StrategyKind::MbrExec, matrix, |set| set.n_x() as f64)
}

/// Selects every solution whose pass count is maximal.
pub fn select_maxpass(matrix: &PassingMatrix) -> SelectionResult {
    let partition = partition_consensus_sets(matrix);
    let scores: Vec<f64> = partition.iter().map(|s| s.n_y() as f64).collect();
    let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut chosen: Vec<usize> = (0..matrix.n_solutions())
        .filter(|&i| matrix.row_sum(i) as f64 == top)
        .collect();
    chosen.sort_unstable();
    SelectionResult {
        strategy: StrategyKind::MaxPass,
        chosen,
        chosen_set: None,
        partition,
        per_set_scores: Some(scores),
    }
}

/// Picks one solution uniformly at random.
pub fn select_random<R: Rng + ?Sized>(matrix: &PassingMatrix, rng: &mut R) -> SelectionResult {
    let pick = rng.random_range(0..matrix.n_solutions());
    SelectionResult {
        strategy: StrategyKind::Random,
        chosen: vec![pick],
        chosen_set: None,
        partition: Vec::new(),
        per_set_scores: None,
    }
}

/// A strategy together with its settings.
///
/// Serialized as `{"name": "b4", "beta0": 10, "alpha_xy": 10}`; any of the
/// eight individual Beta parameters may also be given and override the
/// two-knob defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StrategyRepr", into = "StrategyRepr")]
pub enum StrategySpec {
    B4 { hyper: B4Hyperparams },
    CodeT,
    MbrExec,
    MaxPass,
    Random,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyRepr {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_xy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    betax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    betay: Option<f64>,
}

impl TryFrom<StrategyRepr> for StrategySpec {
    type Error = StrategyError;

    fn try_from(r: StrategyRepr) -> Result<Self, Self::Error> {
        let kind: StrategyKind = r.name.parse()?;
        let overrides = [
            r.alpha1, r.beta1, r.alpha0, r.alphax, r.betax, r.alphay, r.betay,
        ];
        if kind != StrategyKind::B4 {
            if r.beta0.is_some() || r.alpha_xy.is_some() || overrides.iter().any(Option::is_some) {
                return Err(StrategyError::UnexpectedHyperparameters(kind));
            }
            return Ok(StrategySpec::from_kind(kind, B4Hyperparams::default()));
        }
        let mut h = B4Hyperparams::b4(r.beta0.unwrap_or(10.0), r.alpha_xy.unwrap_or(10.0))?;
        for (slot, value) in [
            (&mut h.alpha1, r.alpha1),
            (&mut h.beta1, r.beta1),
            (&mut h.alpha0, r.alpha0),
            (&mut h.alphax, r.alphax),
            (&mut h.betax, r.betax),
            (&mut h.alphay, r.alphay),
            (&mut h.betay, r.betay),
        ] {
            if let Some(v) = value {
                *slot = v;
            }
        }
        h.validate()?;
        Ok(StrategySpec::B4 { hyper: h })
    }
}

impl From<StrategySpec> for StrategyRepr {
    fn from(spec: StrategySpec) -> Self {
        let mut r = StrategyRepr {
            name: spec.kind().name().to_string(),
            ..Default::default()
        };
        if let StrategySpec::B4 { hyper: h } = spec {
            r.alpha1 = Some(h.alpha1);
            r.beta1 = Some(h.beta1);
            r.alpha0 = Some(h.alpha0);
            r.beta0 = Some(h.beta0);
            r.alphax = Some(h.alphax);
            r.betax = Some(h.betax);
            r.alphay = Some(h.alphay);
            r.betay = Some(h.betay);
        }
        r
    }
}

impl StrategySpec {
    pub fn kind(&self) -> StrategyKind {
        match self {
            StrategySpec::B4 { .. } => StrategyKind::B4,
            StrategySpec::CodeT => StrategyKind::CodeT,
            StrategySpec::MbrExec => StrategyKind::MbrExec,
            StrategySpec::MaxPass => StrategyKind::MaxPass,
            StrategySpec::Random => StrategyKind::Random,
        }
    }

    /// Spec for `kind`, using `hyper` when it is B4.
    pub fn from_kind(kind: StrategyKind, hyper: B4Hyperparams) -> Self {
        match kind {
            StrategyKind::B4 => StrategySpec::B4 { hyper },
            StrategyKind::CodeT => StrategySpec::CodeT,
            StrategyKind::MbrExec => StrategySpec::MbrExec,
            StrategyKind::MaxPass => StrategySpec::MaxPass,
            StrategyKind::Random => StrategySpec::Random,
        }
    }

    pub fn select<R: Rng + ?Sized>(&self, matrix: &PassingMatrix, rng: &mut R) -> SelectionResult {
        match self {
            StrategySpec::B4 { hyper } => select_b4(matrix, hyper),
            StrategySpec::CodeT => select_codet(matrix),
            StrategySpec::MbrExec => select_mbr_exec(matrix),
            StrategySpec::MaxPass => select_maxpass(matrix),
            StrategySpec::Random => select_random(matrix, rng),
        }
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        match self {
            StrategySpec::B4 { hyper } => hyper.validate(),
            _ => Ok(()),
        }
    }
}

/// Largest `N + M` accepted by [`brute_force_map`].
pub const BRUTE_FORCE_MAX_DIM: usize = 22;

/// Result of exhaustive MAP search.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate {
    pub x_hat: LabelVector,
    pub y_hat: LabelVector,
    pub log_posterior: f64,
    /// Number of `(x̂, ŷ)` pairs that passed the consistency filter.
    pub consistent_configurations: u64,
}

/// Exhaustive MAP search over every `(x̂, ŷ)` in `{0,1}^N x {0,1}^M` with at
/// least one predicted-correct solution. Configurations whose selected rows do
/// not all equal `ŷ` have zero likelihood and are skipped; the rest are scored
/// with [`score_b4`]. Ties follow the same rule as the clustering strategies,
/// with "earlier" meaning a smaller first selected solution.
pub fn brute_force_map(
    matrix: &PassingMatrix,
    hyper: &B4Hyperparams,
) -> Result<MapEstimate, StrategyError> {
    let (n, m) = matrix.dims();
    if n + m > BRUTE_FORCE_MAX_DIM {
        return Err(StrategyError::TooLarge(n + m));
    }
    let rows: Vec<u64> = matrix
        .rows()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(0u64, |acc, (j, &e)| acc | (u64::from(e) << j))
        })
        .collect();
    let all_tests = if m == 0 { 0 } else { u64::MAX >> (64 - m) };

    struct Best {
        score: f64,
        n_x: u32,
        first: u32,
        x_mask: u64,
        y_mask: u64,
    }
    let mut best: Option<Best> = None;
    let mut consistent = 0u64;

    for x_mask in 1u64..(1u64 << n) {
        for y_mask in 0..=all_tests {
            // P1 = 1 iff every predicted-correct row equals y_hat.
            let mut ok = true;
            let mut bits = x_mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                if rows[i] != y_mask {
                    ok = false;
                    break;
                }
                bits &= bits - 1;
            }
            if !ok {
                continue;
            }
            consistent += 1;
            let n_x = x_mask.count_ones() as usize;
            let n_y = y_mask.count_ones() as usize;
            let (mut n1, mut n0) = (0usize, 0usize);
            for (i, &row) in rows.iter().enumerate() {
                if x_mask & (1 << i) == 0 {
                    n1 += (row & y_mask).count_ones() as usize;
                    n0 += (row & !y_mask & all_tests).count_ones() as usize;
                }
            }
            let stats = ConsensusStats {
                n1,
                n0,
                size_e1: (n - n_x) * n_y,
                size_e0: (n - n_x) * (m - n_y),
                n_x,
                n_y,
            };
            let score = score_b4(&stats, (n, m), hyper);
            let candidate = Best {
                score,
                n_x: n_x as u32,
                first: x_mask.trailing_zeros(),
                x_mask,
                y_mask,
            };
            let replace = match &best {
                None => true,
                Some(b) => match score.total_cmp(&b.score) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => {
                        (candidate.n_x, std::cmp::Reverse(candidate.first))
                            > (b.n_x, std::cmp::Reverse(b.first))
                    }
                },
            };
            if replace {
                best = Some(candidate);
            }
            // Only y_hat equal to the shared row can pass the filter.
            break;
        }
    }

    let best = best.expect("the all-rows-equal filter admits every singleton");
    let x_hat = LabelVector::new((0..n).map(|i| best.x_mask & (1 << i) != 0).collect());
    let y_hat = LabelVector::new((0..m).map(|j| best.y_mask & (1 << j) != 0).collect());
    Ok(MapEstimate {
        x_hat,
        y_hat,
        log_posterior: best.score,
        consistent_configurations: consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn running_example() -> PassingMatrix {
        PassingMatrix::new(&[
            [1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0],
            [0, 1, 1, 1, 1],
            [0, 0, 1, 1, 0],
        ])
        .unwrap()
    }

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() <= rel
    }

    #[test]
    fn hyperparameters_must_be_positive() {
        assert!(B4Hyperparams::b4(0.0, 10.0).is_err());
        assert!(B4Hyperparams::b4(10.0, f64::NAN).is_err());
        assert!(B4Hyperparams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0).is_err());
        let h = B4Hyperparams::b4(10.0, 3.0).unwrap();
        assert_eq!((h.alpha1, h.beta1, h.alpha0, h.beta0), (1.0, 1.0, 1.0, 10.0));
        assert_eq!((h.alphax, h.betax, h.alphay, h.betay), (3.0, 1.0, 3.0, 1.0));
    }

    #[test]
    fn running_example_scores() {
        let e = running_example();
        let hyper = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let sets = partition_consensus_sets(&e);
        let expected = [1.20e-12, 1.15e-13, 1.24e-15];
        for (set, want) in sets.iter().zip(expected) {
            let stats = consensus_stats(&e, set).unwrap();
            let got = score_b4(&stats, e.dims(), &hyper).exp();
            assert!(rel_close(got, want, 0.01), "{got} vs {want}");
        }
        let r = select_b4(&e, &hyper);
        assert_eq!(r.chosen, vec![0, 1]);
        assert_eq!(r.per_set_scores.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn b4_single_set_ignores_hyperparameters() {
        let e = PassingMatrix::new(&[[1u8, 0], [1, 0], [1, 0]]).unwrap();
        for h in [B4Hyperparams::uniform(), B4Hyperparams::b4(1e4, 0.5).unwrap()] {
            assert_eq!(select_b4(&e, &h).chosen, vec![0, 1, 2]);
        }
    }

    #[test]
    fn b4_prefers_the_passing_row() {
        let e = PassingMatrix::new(&[[1u8], [0]]).unwrap();
        let h = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let r = select_b4(&e, &h);
        assert_eq!(r.chosen, vec![0]);
        let scores = r.per_set_scores.unwrap();
        // Frozen from an independent log-Beta evaluation of both configurations.
        assert!((scores[0] - -10.276_429_468_938_733).abs() < 1e-9);
        assert!((scores[1] - -14.283_762_654_171_202).abs() < 1e-9);
    }

    #[test]
    fn codet_examples() {
        let r = select_codet(&running_example());
        assert_eq!(r.per_set_scores.unwrap(), vec![6.0, 4.0, 2.0]);
        assert_eq!(r.chosen, vec![0, 1]);

        let zeros = PassingMatrix::new(&[[0u8, 0], [0, 0], [0, 0]]).unwrap();
        let r = select_codet(&zeros);
        assert_eq!(r.chosen, vec![0, 1, 2]);
        assert_eq!(r.per_set_scores.unwrap(), vec![0.0]);

        // 2 solutions x 2 tests against 4 solutions x 1 test: tie on 4.
        let e = PassingMatrix::new(&[
            [1u8, 1, 0],
            [1, 1, 0],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
            [0, 0, 1],
        ])
        .unwrap();
        let r = select_codet(&e);
        assert_eq!(r.per_set_scores.unwrap(), vec![4.0, 4.0]);
        assert_eq!(r.chosen, vec![2, 3, 4, 5]);
    }

    #[test]
    fn mbr_exec_examples() {
        let r = select_mbr_exec(&running_example());
        assert_eq!(r.per_set_scores.unwrap(), vec![2.0, 1.0, 1.0]);
        assert_eq!(r.chosen, vec![0, 1]);

        let distinct = PassingMatrix::new(&[[0u8, 1], [1, 0], [1, 1]]).unwrap();
        assert_eq!(select_mbr_exec(&distinct).chosen, vec![0]);

        let e = PassingMatrix::new(&[[0u8, 1], [1, 0], [0, 1], [1, 0], [0, 1], [1, 0]]).unwrap();
        assert_eq!(select_mbr_exec(&e).chosen, vec![0, 2, 4]);
    }

    #[test]
    fn maxpass_examples() {
        assert_eq!(select_maxpass(&running_example()).chosen, vec![2]);

        let rows: [[u8; 0]; 3] = [[], [], []];
        let empty = PassingMatrix::new(&rows).unwrap();
        assert_eq!(select_maxpass(&empty).chosen, vec![0, 1, 2]);

        let e = PassingMatrix::new(&[
            [1u8, 1, 1, 1, 1, 0],
            [0, 1, 1, 1, 1, 1],
            [1, 1, 0, 0, 0, 0],
        ])
        .unwrap();
        assert_eq!(select_maxpass(&e).chosen, vec![0, 1]);
    }

    #[test]
    fn random_is_seeded() {
        let one = PassingMatrix::new(&[[1u8, 0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(select_random(&one, &mut rng).chosen, vec![0]);

        let e = running_example();
        let a = select_random(&e, &mut ChaCha8Rng::seed_from_u64(42));
        let b = select_random(&e, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.chosen, b.chosen);
        assert!(a.per_set_scores.is_none());
    }

    #[test]
    fn random_is_uniform() {
        let e = running_example();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0u32; 4];
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[select_random(&e, &mut rng).chosen[0]] += 1;
        }
        for c in counts {
            let freq = f64::from(c) / f64::from(draws);
            assert!((freq - 0.25).abs() < 0.002, "{freq}");
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.name().parse::<StrategyKind>().unwrap(), k);
        }
        assert!("best".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn brute_force_matches_running_example() {
        let e = running_example();
        let h = B4Hyperparams::b4(10.0, 10.0).unwrap();
        let map = brute_force_map(&e, &h).unwrap();
        let b4 = select_b4(&e, &h);
        assert_eq!(map.x_hat, b4.chosen_labels(4));
        assert_eq!(map.y_hat, b4.chosen_set.unwrap().test_signature);
        let best = b4.per_set_scores.unwrap()[0];
        assert!((map.log_posterior - best).abs() < 1e-12);
    }

    #[test]
    fn brute_force_single_cell() {
        let e = PassingMatrix::new(&[[1u8]]).unwrap();
        let map = brute_force_map(&e, &B4Hyperparams::default()).unwrap();
        assert_eq!(map.x_hat.to_bits(), vec![1]);
        assert_eq!(map.y_hat.to_bits(), vec![1]);
        assert_eq!(map.consistent_configurations, 1);
    }

    #[test]
    fn brute_force_matches_b4_on_diagonal() {
        let e = PassingMatrix::new(&[[1u8, 0], [0, 1]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut draw = || 10f64.powf(rng.random_range(-1.0..2.0));
            let h = B4Hyperparams::new(
                draw(),
                draw(),
                draw(),
                draw(),
                draw(),
                draw(),
                draw(),
                draw(),
            )
            .unwrap();
            let map = brute_force_map(&e, &h).unwrap();
            let b4 = select_b4(&e, &h);
            assert_eq!(map.x_hat, b4.chosen_labels(2));
        }
    }

    #[test]
    fn brute_force_size_guard() {
        let rows = vec![vec![0u8; 12]; 11];
        let e = PassingMatrix::new(&rows).unwrap();
        assert_eq!(
            brute_force_map(&e, &B4Hyperparams::default()),
            Err(StrategyError::TooLarge(23))
        );
    }
}
