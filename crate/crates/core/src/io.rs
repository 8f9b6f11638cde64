//! Reading and writing passing matrices as JSON or CSV.
//!
//! JSON layout:
//!
//! ```json
//! {"solutions": ["s1", "s2"], "tests": ["t1", "t2", "t3"],
//!  "matrix": [[1, 1, 0], [0, 1, 1]], "truth_x": [1, 0]}
//! ```
//!
//! `solutions`, `tests`, `truth_x` and `truth_y` are optional. CSV layout is a
//! header row whose first cell is ignored and whose remaining cells are test
//! ids, then one row per solution starting with the solution id.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{LabelVector, MatrixError, PassingMatrix};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("JSON parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("CSV parse error at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("CSV line {line}: cell for solution {solution:?}, test {test:?} is {value:?}, expected 0 or 1")]
    CsvCell {
        line: u64,
        solution: String,
        test: String,
        value: String,
    },
    #[error("{which} has length {found}, expected {expected}")]
    TruthLength {
        which: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("cannot infer matrix format from {0:?}; pass --format json or --format csv")]
    UnknownFormat(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Json,
    Csv,
}

impl MatrixFormat {
    /// Format implied by a `.json` or `.csv` extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "json" => Some(MatrixFormat::Json),
            "csv" => Some(MatrixFormat::Csv),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixFormat::Json => "json",
            MatrixFormat::Csv => "csv",
        })
    }
}

impl FromStr for MatrixFormat {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(MatrixFormat::Json),
            "csv" => Ok(MatrixFormat::Csv),
            _ => Err(IoError::UnknownFormat(s.to_string())),
        }
    }
}

/// A loaded matrix with optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub matrix: PassingMatrix,
    pub path: Option<PathBuf>,
    pub format: MatrixFormat,
    pub truth_x: Option<LabelVector>,
    pub truth_y: Option<LabelVector>,
}

impl MatrixFile {
    pub fn new(matrix: PassingMatrix, format: MatrixFormat) -> Self {
        Self {
            matrix,
            path: None,
            format,
            truth_x: None,
            truth_y: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Cell {
    Int(i64),
    Bool(bool),
}

impl Cell {
    fn value(&self) -> i64 {
        match *self {
            Cell::Int(v) => v,
            Cell::Bool(b) => i64::from(b),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonIn {
    #[serde(default)]
    solutions: Option<Vec<String>>,
    #[serde(default)]
    tests: Option<Vec<String>>,
    matrix: Vec<Vec<Cell>>,
    #[serde(default)]
    truth_x: Option<Vec<Cell>>,
    #[serde(default)]
    truth_y: Option<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    solutions: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tests: Option<&'a [String]>,
    matrix: Vec<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth_x: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth_y: Option<Vec<u8>>,
}

fn binary_rows(rows: &[Vec<Cell>]) -> Result<Vec<Vec<u8>>, MatrixError> {
    rows.iter()
        .enumerate()
        .map(|(row, cells)| {
            cells
                .iter()
                .enumerate()
                .map(|(col, c)| match c.value() {
                    v @ (0 | 1) => Ok(v as u8),
                    value => Err(MatrixError::NonBinary { row, col, value }),
                })
                .collect()
        })
        .collect()
}

fn truth_vector(
    which: &'static str,
    cells: Option<Vec<Cell>>,
    expected: usize,
) -> Result<Option<LabelVector>, IoError> {
    let Some(cells) = cells else { return Ok(None) };
    if cells.len() != expected {
        return Err(IoError::TruthLength {
            which,
            expected,
            found: cells.len(),
        });
    }
    let bits = binary_rows(&[cells]).map_err(|e| match e {
        MatrixError::NonBinary { col, value, .. } => IoError::Json {
            line: 0,
            column: 0,
            message: format!("{which}[{col}] is {value}, expected 0 or 1"),
        },
        other => other.into(),
    })?;
    Ok(Some(LabelVector::from_bits(&bits[0])?))
}

/// Parses the JSON layout described in the module docs.
pub fn parse_matrix_json(text: &str) -> Result<MatrixFile, IoError> {
    let raw: JsonIn = serde_json::from_str(text).map_err(|e| IoError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let matrix = PassingMatrix::new(&binary_rows(&raw.matrix)?)?.with_ids(raw.solutions, raw.tests)?;
    let truth_x = truth_vector("truth_x", raw.truth_x, matrix.n_solutions())?;
    let truth_y = truth_vector("truth_y", raw.truth_y, matrix.n_tests())?;
    Ok(MatrixFile {
        matrix,
        path: None,
        format: MatrixFormat::Json,
        truth_x,
        truth_y,
    })
}

/// Parses the CSV layout described in the module docs.
pub fn parse_matrix_csv(text: &str) -> Result<MatrixFile, IoError> {
    let csv_err = |e: csv::Error| IoError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.is_empty() {
        return Err(IoError::Csv {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let test_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut solution_ids = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(IoError::Csv {
                line,
                message: format!(
                    "row has {} fields, header has {}",
                    record.len(),
                    header.len()
                ),
            });
        }
        let solution = record[0].to_string();
        let row = record
            .iter()
            .skip(1)
            .zip(&test_ids)
            .map(|(cell, test)| match cell {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(IoError::CsvCell {
                    line,
                    solution: solution.clone(),
                    test: test.clone(),
                    value: other.to_string(),
                }),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        solution_ids.push(solution);
        rows.push(row);
    }
    let matrix = PassingMatrix::new(&rows)?.with_ids(Some(solution_ids), Some(test_ids))?;
    Ok(MatrixFile::new(matrix, MatrixFormat::Csv))
}

/// Reads `path`, using `format` or else the file extension.
pub fn load_matrix(path: &Path, format: Option<MatrixFormat>) -> Result<MatrixFile, IoError> {
    let format = match format.or_else(|| MatrixFormat::from_path(path)) {
        Some(f) => f,
        None => return Err(IoError::UnknownFormat(path.display().to_string())),
    };
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut file = match format {
        MatrixFormat::Json => parse_matrix_json(&text)?,
        MatrixFormat::Csv => parse_matrix_csv(&text)?,
    };
    file.path = Some(path.to_path_buf());
    Ok(file)
}

/// Serializes to the JSON layout, including ids and truth when present.
pub fn matrix_to_json(file: &MatrixFile) -> String {
    let out = JsonOut {
        solutions: file.matrix.solution_ids(),
        tests: file.matrix.test_ids(),
        matrix: file.matrix.to_rows(),
        truth_x: file.truth_x.as_ref().map(LabelVector::to_bits),
        truth_y: file.truth_y.as_ref().map(LabelVector::to_bits),
    };
    serde_json::to_string_pretty(&out).expect("matrix JSON is always serializable") + "\n"
}

/// Serializes to the CSV layout. Missing ids are written as `s1..` / `t1..`.
/// Ground truth has no CSV representation and is dropped.
pub fn matrix_to_csv(matrix: &PassingMatrix) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["solution".to_string()];
    header.extend((0..matrix.n_tests()).map(|j| matrix.test_label(j)));
    writer.write_record(&header).expect("in-memory write");
    for i in 0..matrix.n_solutions() {
        let mut record = vec![matrix.solution_label(i)];
        record.extend(matrix.row(i).iter().map(|&b| if b { "1" } else { "0" }.to_string()));
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output")
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let err = |source| IoError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(err)
}
