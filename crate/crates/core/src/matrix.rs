//! Passing matrix, label vectors and consensus sets.
//!
//! A passing matrix `E` records, for `N` candidate solutions and `M` candidate
//! tests, whether solution `i` passes test `j`. Solutions that pass exactly the
//! same tests are grouped into a [`ConsensusSet`]; the shared row doubles as the
//! set's predicted-correct test signature.
//!
//! Indices are zero-based throughout the library.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("passing matrix needs at least one solution row")]
    NoSolutions,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry at row {row}, column {col} is {value}, expected 0 or 1")]
    NonBinary { row: usize, col: usize, value: i64 },
    #[error("{axis} id list has {found} entries, expected {expected}")]
    IdCount {
        axis: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("duplicate {axis} id {id:?}")]
    DuplicateId { axis: &'static str, id: String },
    #[error("label vector has length {found}, expected {expected}")]
    LabelLength { expected: usize, found: usize },
    #[error("solution index {index} out of range for {n_solutions} solutions")]
    IndexOutOfRange { index: usize, n_solutions: usize },
    #[error("consensus set is inconsistent with the matrix: {0}")]
    InconsistentSet(String),
    #[error("selection is empty")]
    EmptySelection,
}

/// Binary vector over one axis of a passing matrix (solution correctness `x`
/// or test correctness `y`).
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelVector(Vec<bool>);

impl LabelVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    /// Builds a vector from 0/1 integers.
    pub fn from_bits(bits: &[u8]) -> Result<Self, MatrixError> {
        bits.iter()
            .enumerate()
            .map(|(col, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                v => Err(MatrixError::NonBinary {
                    row: 0,
                    col,
                    value: i64::from(v),
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    /// Vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self, MatrixError> {
        let mut bits = vec![false; len];
        for &i in indices {
            if i >= len {
                return Err(MatrixError::IndexOutOfRange {
                    index: i,
                    n_solutions: len,
                });
            }
            bits[i] = true;
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn ones_indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| u8::from(b)).collect()
    }
}

impl fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, "]")
    }
}

impl From<Vec<bool>> for LabelVector {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// The observed `N x M` solution-by-test passing matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassingMatrix {
    n_solutions: usize,
    n_tests: usize,
    /// Row-major entries.
    entries: Vec<bool>,
    solution_ids: Option<Vec<String>>,
    test_ids: Option<Vec<String>>,
}

impl PassingMatrix {
    /// Validates 0/1 rows into a matrix. All rows must have the same length;
    /// zero columns are allowed, zero rows are not.
    pub fn new<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let n_solutions = rows.len();
        if n_solutions == 0 {
            return Err(MatrixError::NoSolutions);
        }
        let n_tests = rows[0].as_ref().len();
        let mut entries = Vec::with_capacity(n_solutions * n_tests);
        for (row, values) in rows.iter().enumerate() {
            let values = values.as_ref();
            if values.len() != n_tests {
                return Err(MatrixError::RaggedRow {
                    row,
                    expected: n_tests,
                    found: values.len(),
                });
            }
            for (col, &v) in values.iter().enumerate() {
                match v {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    other => {
                        return Err(MatrixError::NonBinary {
                            row,
                            col,
                            value: i64::from(other),
                        })
                    }
                }
            }
        }
        Ok(Self {
            n_solutions,
            n_tests,
            entries,
            solution_ids: None,
            test_ids: None,
        })
    }

    /// Builds a matrix from boolean rows.
    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Result<Self, MatrixError> {
        let bytes: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect();
        Self::new(&bytes)
    }

    /// Attaches solution and test labels.
    pub fn with_ids(
        mut self,
        solution_ids: Option<Vec<String>>,
        test_ids: Option<Vec<String>>,
    ) -> Result<Self, MatrixError> {
        if let Some(ids) = &solution_ids {
            check_ids("solution", ids, self.n_solutions)?;
        }
        if let Some(ids) = &test_ids {
            check_ids("test", ids, self.n_tests)?;
        }
        self.solution_ids = solution_ids;
        self.test_ids = test_ids;
        Ok(self)
    }

    pub fn n_solutions(&self) -> usize {
        self.n_solutions
    }

    pub fn n_tests(&self) -> usize {
        self.n_tests
    }

    /// `(N, M)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.n_solutions, self.n_tests)
    }

    pub fn get(&self, solution: usize, test: usize) -> bool {
        self.entries[solution * self.n_tests + test]
    }

    pub fn row(&self, solution: usize) -> &[bool] {
        let start = solution * self.n_tests;
        &self.entries[start..start + self.n_tests]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> + '_ {
        (0..self.n_solutions).map(move |i| self.row(i))
    }

    /// Number of tests solution `i` passes.
    pub fn row_sum(&self, solution: usize) -> usize {
        self.row(solution).iter().filter(|&&b| b).count()
    }

    pub fn solution_ids(&self) -> Option<&[String]> {
        self.solution_ids.as_deref()
    }

    pub fn test_ids(&self) -> Option<&[String]> {
        self.test_ids.as_deref()
    }

    /// Label for solution `i`: its id when present, otherwise `s{i+1}`.
    pub fn solution_label(&self, i: usize) -> String {
        match &self.solution_ids {
            Some(ids) => ids[i].clone(),
            None => format!("s{}", i + 1),
        }
    }

    /// Label for test `j`: its id when present, otherwise `t{j+1}`.
    pub fn test_label(&self, j: usize) -> String {
        match &self.test_ids {
            Some(ids) => ids[j].clone(),
            None => format!("t{}", j + 1),
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }

    /// Returns a matrix whose row `k` is row `order[k]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<u8>> = order
            .iter()
            .map(|&i| self.row(i).iter().map(|&b| u8::from(b)).collect())
            .collect();
        Self::new(&rows)
    }

    /// Returns a matrix whose column `k` is column `order[k]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self, MatrixError> {
        let rows: Vec<Vec<u8>> = self
            .rows()
            .map(|r| order.iter().map(|&j| u8::from(r[j])).collect())
            .collect();
        Self::new(&rows)
    }
}

fn check_ids(axis: &'static str, ids: &[String], expected: usize) -> Result<(), MatrixError> {
    if ids.len() != expected {
        return Err(MatrixError::IdCount {
            axis,
            expected,
            found: ids.len(),
        });
    }
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(MatrixError::DuplicateId {
                axis,
                id: id.clone(),
            });
        }
    }
    Ok(())
}

/// A maximal group of solutions sharing one passing row, paired with that row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsensusSet {
    /// Ascending solution indices.
    pub solution_indices: Vec<usize>,
    /// The shared passing row, read as the predicted-correct tests.
    pub test_signature: LabelVector,
}

impl ConsensusSet {
    pub fn n_x(&self) -> usize {
        self.solution_indices.len()
    }

    pub fn n_y(&self) -> usize {
        self.test_signature.count_ones()
    }

    /// Predicted solution correctness `x̂` over `n_solutions`.
    pub fn solution_labels(&self, n_solutions: usize) -> LabelVector {
        let mut bits = vec![false; n_solutions];
        for &i in &self.solution_indices {
            bits[i] = true;
        }
        LabelVector(bits)
    }
}

/// Groups solutions by identical passing rows. Sets are ordered by the first
/// solution index carrying each distinct row.
pub fn partition_consensus_sets(matrix: &PassingMatrix) -> Vec<ConsensusSet> {
    let mut slot_of: HashMap<&[bool], usize> = HashMap::new();
    let mut sets: Vec<ConsensusSet> = Vec::new();
    for (i, row) in matrix.rows().enumerate() {
        match slot_of.get(row) {
            Some(&k) => sets[k].solution_indices.push(i),
            None => {
                slot_of.insert(row, sets.len());
                sets.push(ConsensusSet {
                    solution_indices: vec![i],
                    test_signature: LabelVector(row.to_vec()),
                });
            }
        }
    }
    sets
}

/// Sufficient statistics of one `(x̂, ŷ)` configuration.
///
/// `n1`/`n0` count passes of the predicted-incorrect solutions on the
/// predicted-correct/incorrect tests; `size_e1`/`size_e0` are the sizes of those
/// two blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConsensusStats {
    pub n1: usize,
    pub n0: usize,
    pub size_e1: usize,
    pub size_e0: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl ConsensusStats {
    /// Counts for an arbitrary labelling. Consistency of the labelling with the
    /// matrix is not checked here.
    pub fn from_labels(
        matrix: &PassingMatrix,
        x_hat: &LabelVector,
        y_hat: &LabelVector,
    ) -> Result<Self, MatrixError> {
        let (n, m) = matrix.dims();
        if x_hat.len() != n {
            return Err(MatrixError::LabelLength {
                expected: n,
                found: x_hat.len(),
            });
        }
        if y_hat.len() != m {
            return Err(MatrixError::LabelLength {
                expected: m,
                found: y_hat.len(),
            });
        }
        let n_x = x_hat.count_ones();
        let n_y = y_hat.count_ones();
        let (mut n1, mut n0) = (0, 0);
        for (i, row) in matrix.rows().enumerate() {
            if x_hat.get(i) {
                continue;
            }
            for (j, &e) in row.iter().enumerate() {
                if e {
                    if y_hat.get(j) {
                        n1 += 1;
                    } else {
                        n0 += 1;
                    }
                }
            }
        }
        Ok(Self {
            n1,
            n0,
            size_e1: (n - n_x) * n_y,
            size_e0: (n - n_x) * (m - n_y),
            n_x,
            n_y,
        })
    }
}

/// Statistics of a consensus set, after checking that the set is a maximal
/// group of rows equal to its signature.
pub fn consensus_stats(
    matrix: &PassingMatrix,
    set: &ConsensusSet,
) -> Result<ConsensusStats, MatrixError> {
    let (n, m) = matrix.dims();
    if set.test_signature.len() != m {
        return Err(MatrixError::LabelLength {
            expected: m,
            found: set.test_signature.len(),
        });
    }
    if set.solution_indices.is_empty() {
        return Err(MatrixError::InconsistentSet("no solutions".into()));
    }
    let mut members = vec![false; n];
    for &i in &set.solution_indices {
        if i >= n {
            return Err(MatrixError::IndexOutOfRange {
                index: i,
                n_solutions: n,
            });
        }
        if members[i] {
            return Err(MatrixError::InconsistentSet(format!(
                "solution {i} listed twice"
            )));
        }
        members[i] = true;
    }
    let signature = set.test_signature.as_slice();
    for (i, row) in matrix.rows().enumerate() {
        let same = row == signature;
        if members[i] && !same {
            return Err(MatrixError::InconsistentSet(format!(
                "solution {i} does not match the signature"
            )));
        }
        if !members[i] && same {
            return Err(MatrixError::InconsistentSet(format!(
                "solution {i} matches the signature but is not in the set"
            )));
        }
    }
    ConsensusStats::from_labels(matrix, &LabelVector(members), &set.test_signature)
}

/// Fraction of selected solutions that are actually correct.
pub fn pass_at_1(selected: &[usize], truth: &LabelVector) -> Result<f64, MatrixError> {
    if selected.is_empty() {
        return Err(MatrixError::EmptySelection);
    }
    let mut correct = 0usize;
    for &i in selected {
        if i >= truth.len() {
            return Err(MatrixError::IndexOutOfRange {
                index: i,
                n_solutions: truth.len(),
            });
        }
        if truth.get(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / selected.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn running_example() -> PassingMatrix {
        PassingMatrix::new(&[
            [1, 1, 1, 0, 0],
            [1, 1, 1, 0, 0],
            [0, 1, 1, 1, 1],
            [0, 0, 1, 1, 0],
        ])
        .unwrap()
    }

    fn sig(bits: &[u8]) -> LabelVector {
        LabelVector::from_bits(bits).unwrap()
    }

    #[test]
    fn builds_running_example() {
        let e = running_example();
        assert_eq!(e.dims(), (4, 5));
        assert!(e.get(2, 4));
        assert!(!e.get(3, 0));
    }

    #[test]
    fn accepts_zero_tests() {
        let rows: [[u8; 0]; 1] = [[]];
        let e = PassingMatrix::new(&rows).unwrap();
        assert_eq!(e.dims(), (1, 0));
        let sets = partition_consensus_sets(&e);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].solution_indices, vec![0]);
    }

    #[test]
    fn validation_errors_are_distinct() {
        let ragged: Vec<Vec<u8>> = vec![vec![1, 0], vec![1]];
        assert_eq!(
            PassingMatrix::new(&ragged),
            Err(MatrixError::RaggedRow {
                row: 1,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            PassingMatrix::new(&[[0u8, 2]]),
            Err(MatrixError::NonBinary {
                row: 0,
                col: 1,
                value: 2
            })
        );
        let empty: Vec<Vec<u8>> = vec![];
        assert_eq!(PassingMatrix::new(&empty), Err(MatrixError::NoSolutions));
        let dup = PassingMatrix::new(&[[1u8], [0]])
            .unwrap()
            .with_ids(Some(vec!["a".into(), "a".into()]), None);
        assert!(matches!(dup, Err(MatrixError::DuplicateId { .. })));
        let short = PassingMatrix::new(&[[1u8], [0]])
            .unwrap()
            .with_ids(None, Some(vec![]));
        assert!(matches!(short, Err(MatrixError::IdCount { .. })));
    }

    #[test]
    fn partitions_running_example() {
        let sets = partition_consensus_sets(&running_example());
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0].solution_indices, vec![0, 1]);
        assert_eq!(sets[0].test_signature, sig(&[1, 1, 1, 0, 0]));
        assert_eq!(sets[1].solution_indices, vec![2]);
        assert_eq!(sets[1].test_signature, sig(&[0, 1, 1, 1, 1]));
        assert_eq!(sets[2].solution_indices, vec![3]);
        assert_eq!(sets[2].test_signature, sig(&[0, 0, 1, 1, 0]));
    }

    #[test]
    fn partition_groups_equal_rows() {
        let e = PassingMatrix::new(&[[1u8, 0], [0, 1], [1, 0]]).unwrap();
        let sets = partition_consensus_sets(&e);
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].solution_indices, vec![0, 2]);
        assert_eq!(sets[0].test_signature, sig(&[1, 0]));
        assert_eq!(sets[1].solution_indices, vec![1]);

        let same = PassingMatrix::new(&[[0u8, 1, 1], [0, 1, 1], [0, 1, 1]]).unwrap();
        let sets = partition_consensus_sets(&same);
        assert_eq!(sets.len(), 1);
        assert_eq!(sets[0].solution_indices, vec![0, 1, 2]);
    }

    #[test]
    fn stats_of_running_example() {
        let e = running_example();
        let sets = partition_consensus_sets(&e);
        let first = consensus_stats(&e, &sets[0]).unwrap();
        assert_eq!(
            first,
            ConsensusStats {
                n1: 3,
                n0: 3,
                size_e1: 6,
                size_e0: 4,
                n_x: 2,
                n_y: 3
            }
        );
        let second = consensus_stats(&e, &sets[1]).unwrap();
        assert_eq!(
            second,
            ConsensusStats {
                n1: 6,
                n0: 2,
                size_e1: 12,
                size_e0: 3,
                n_x: 1,
                n_y: 4
            }
        );
    }

    #[test]
    fn stats_of_single_set_are_empty() {
        let e = PassingMatrix::new(&[[1u8, 0, 1], [1, 0, 1]]).unwrap();
        let sets = partition_consensus_sets(&e);
        let s = consensus_stats(&e, &sets[0]).unwrap();
        assert_eq!((s.n1, s.n0, s.size_e1, s.size_e0), (0, 0, 0, 0));
        assert_eq!((s.n_x, s.n_y), (2, 2));
    }

    #[test]
    fn stats_reject_inconsistent_sets() {
        let e = running_example();
        let not_maximal = ConsensusSet {
            solution_indices: vec![0],
            test_signature: sig(&[1, 1, 1, 0, 0]),
        };
        assert!(matches!(
            consensus_stats(&e, &not_maximal),
            Err(MatrixError::InconsistentSet(_))
        ));
        let wrong_row = ConsensusSet {
            solution_indices: vec![0, 1, 2],
            test_signature: sig(&[1, 1, 1, 0, 0]),
        };
        assert!(consensus_stats(&e, &wrong_row).is_err());
    }

    #[test]
    fn pass_at_1_is_the_correct_fraction() {
        let x = sig(&[1, 1, 0, 0]);
        assert_eq!(pass_at_1(&[0, 1], &x).unwrap(), 1.0);
        assert_eq!(pass_at_1(&[2], &x).unwrap(), 0.0);
        assert_eq!(pass_at_1(&[0, 2], &x).unwrap(), 0.5);
        assert_eq!(pass_at_1(&[], &x), Err(MatrixError::EmptySelection));
    }
}
