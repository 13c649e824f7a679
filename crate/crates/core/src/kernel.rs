//! Affinity kernels: construction, loading and validation.
//!
//! A kernel is a symmetric, nonnegative `n x n` matrix `K` where `K[i][j]`
//! measures how strongly vertices `i` and `j` are related. The metric
//! construction needs two things from it: every vertex is its own strongest
//! neighbour (`K[i][i] = max_j K[i][j]`), and the three main diagonals are
//! strictly positive so that iterated composition of any level set containing
//! them eventually covers every pair.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::matrix::SquareMatrix;

/// Where a kernel came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Generated,
    Loaded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFormat {
    Csv,
    Json,
}

impl KernelFormat {
    /// Guesses the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => KernelFormat::Json,
            _ => KernelFormat::Csv,
        }
    }
}

impl FromStr for KernelFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(KernelFormat::Csv),
            "json" => Ok(KernelFormat::Json),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// A validated affinity kernel. Immutable once constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    values: SquareMatrix,
    source: Source,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    n: usize,
    values: Vec<Vec<f64>>,
}

impl AffinityMatrix {
    /// Wraps `values`, rejecting non-square, asymmetric, negative or
    /// non-finite input. Asymmetry is never repaired.
    pub fn new(values: SquareMatrix, source: Source) -> Result<Self> {
        let n = values.n();
        if n < 2 {
            return Err(Error::Shape(format!(
                "an affinity matrix needs at least 2 vertices, got {n}"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values.get(i, j);
                if !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i}, {j}) is not finite")));
                }
                if v < 0.0 {
                    return Err(Error::Domain(format!("entry ({i}, {j}) = {v} is negative")));
                }
            }
        }
        if let Some((row, col)) = values.asymmetry(0.0) {
            return Err(Error::Asymmetric {
                row,
                col,
                value: values.get(row, col),
                mirror: values.get(col, row),
            });
        }
        Ok(Self { values, source })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(SquareMatrix::from_rows(rows)?, Source::Loaded)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &SquareMatrix {
        &self.values
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn min_entry(&self) -> f64 {
        self.values.as_slice().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.values
            .as_slice()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distinct entry values in ascending order.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut v = self.values.as_slice().to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| a == b);
        v
    }

    /// Minimum of `K` over the band `|i - j| < width`.
    pub fn band_min(&self, width: usize) -> f64 {
        let n = self.n();
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in i..n.min(i + width) {
                m = m.min(self.get(i, j));
            }
        }
        m
    }

    pub fn load(path: impl AsRef<Path>, format: KernelFormat) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref())?;
        match format {
            KernelFormat::Csv => Self::from_csv_str(&text),
            KernelFormat::Json => Self::from_json_str(&text),
        }
    }

    /// Loads using the format implied by the file extension.
    pub fn load_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::load(path, KernelFormat::from_path(path))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::new(io::read_matrix_csv(text.as_bytes())?, Source::Loaded)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let parsed: KernelJson = serde_json::from_str(text)?;
        let values = SquareMatrix::from_rows(parsed.values)?;
        if values.n() != parsed.n {
            return Err(Error::Shape(format!(
                "declared n = {} but values are {}x{}",
                parsed.n,
                values.n(),
                values.n()
            )));
        }
        Self::new(values, Source::Loaded)
    }

    pub fn to_csv_string(&self) -> String {
        io::matrix_to_csv_string(&self.values)
    }

    pub fn to_json_string(&self) -> Result<String> {
        io::to_sorted_json(&KernelJson {
            n: self.n(),
            values: self.values.to_rows(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>, format: KernelFormat) -> Result<()> {
        let text = match format {
            KernelFormat::Csv => self.to_csv_string(),
            KernelFormat::Json => self.to_json_string()?,
        };
        fs::write(path, text)?;
        Ok(())
    }
}

/// The discretized Newtonian kernel: `K[i][i] = diag_value` and
/// `K[i][j] = |i - j|^(-alpha)` otherwise.
///
/// `diag_value` must be at least 1, the largest off-diagonal value, so every
/// vertex remains its own strongest neighbour.
pub fn newtonian_kernel(n: usize, alpha: f64, diag_value: f64) -> Result<AffinityMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be a positive number, got {alpha}"
        )));
    }
    if !(diag_value.is_finite() && diag_value >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "diagonal value must be at least 1, got {diag_value}"
        )));
    }
    let values = SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            diag_value
        } else {
            (i.abs_diff(j) as f64).powf(-alpha)
        }
    });
    AffinityMatrix::new(values, Source::Generated)
}

/// Structural facts about a kernel relevant to metrization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    /// Every diagonal entry is the maximum of its row.
    pub diag_dominant: bool,
    /// `K[i][i]`, `K[i][i+1]` and `K[i+1][i]` are all strictly positive.
    pub tridiagonal_positive: bool,
    pub min_entry: f64,
    pub max_entry: f64,
    pub distinct_value_count: usize,
}

impl ValidationReport {
    pub fn all_flags(&self) -> bool {
        self.symmetric && self.diag_dominant && self.tridiagonal_positive
    }
}

pub fn validate_kernel(kernel: &AffinityMatrix) -> ValidationReport {
    let n = kernel.n();
    let diag_dominant = (0..n).all(|i| {
        let d = kernel.get(i, i);
        kernel.row(i).iter().all(|&v| v <= d)
    });
    let tridiagonal_positive = (0..n).all(|i| {
        kernel.get(i, i) > 0.0
            && (i + 1 >= n || (kernel.get(i, i + 1) > 0.0 && kernel.get(i + 1, i) > 0.0))
    });
    ValidationReport {
        symmetric: kernel.values().is_symmetric(0.0),
        diag_dominant,
        tridiagonal_positive,
        min_entry: kernel.min_entry(),
        max_entry: kernel.max_entry(),
        distinct_value_count: kernel.distinct_values().len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newtonian_four_by_four() {
        let k = newtonian_kernel(4, 1.0, 2.0).unwrap();
        assert_eq!(k.get(0, 0), 2.0);
        assert_eq!(k.get(0, 1), 1.0);
        assert_eq!(k.get(0, 2), 0.5);
        assert_eq!(k.get(0, 3), 1.0 / 3.0);
        assert_eq!(k.source(), Source::Generated);
    }

    #[test]
    fn newtonian_nearest_neighbour_is_one() {
        let k = newtonian_kernel(2, 5.0, 2.0).unwrap();
        assert_eq!(k.get(0, 1), 1.0);
    }

    #[test]
    fn newtonian_sixty_min_entry() {
        let k = newtonian_kernel(60, 1.0, 2.0).unwrap();
        assert_eq!(k.min_entry(), 1.0 / 59.0);
        assert_eq!(format!("{:.7}", k.min_entry()), "0.0169492");
    }

    #[test]
    fn newtonian_rejects_bad_parameters() {
        for (n, a, d) in [(1, 1.0, 2.0), (4, 0.0, 2.0), (4, -1.0, 2.0), (4, 1.0, 0.5), (4, f64::NAN, 2.0)] {
            assert!(
                matches!(newtonian_kernel(n, a, d), Err(Error::InvalidParameter(_))),
                "({n}, {a}, {d}) accepted"
            );
        }
    }

    #[test]
    fn csv_loading_contracts() {
        let k = AffinityMatrix::from_csv_str("2,1\n1,2").unwrap();
        assert_eq!(k.n(), 2);
        assert_eq!(k.source(), Source::Loaded);
        assert!(matches!(
            AffinityMatrix::from_csv_str("1,2\n3,4"),
            Err(Error::Asymmetric { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            AffinityMatrix::from_csv_str("1,2,3\n4,5,6"),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            AffinityMatrix::from_csv_str("1,-2\n-2,1"),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn json_loading_checks_declared_size() {
        let k = AffinityMatrix::from_json_str(r#"{"n": 2, "values": [[2, 1], [1, 2]]}"#).unwrap();
        assert_eq!(k.get(1, 0), 1.0);
        assert!(matches!(
            AffinityMatrix::from_json_str(r#"{"n": 3, "values": [[2, 1], [1, 2]]}"#),
            Err(Error::Shape(_))
        ));
        let back = AffinityMatrix::from_json_str(&k.to_json_string().unwrap()).unwrap();
        assert_eq!(back, k);
    }

    #[test]
    fn validation_of_newtonian() {
        let report = validate_kernel(&newtonian_kernel(4, 1.0, 2.0).unwrap());
        assert!(report.all_flags());
        assert_eq!(report.min_entry, 1.0 / 3.0);
        assert_eq!(report.max_entry, 2.0);
        // 2, 1, 1/2, 1/3
        assert_eq!(report.distinct_value_count, 4);
    }

    #[test]
    fn validation_flags_zero_superdiagonal() {
        let k = AffinityMatrix::new(SquareMatrix::identity(3), Source::Loaded).unwrap();
        let report = validate_kernel(&k);
        assert!(!report.tridiagonal_positive);
        assert!(report.diag_dominant);
    }

    #[test]
    fn validation_flags_weak_diagonal() {
        let k = AffinityMatrix::from_rows(vec![vec![0.5, 1.0], vec![1.0, 2.0]]).unwrap();
        let report = validate_kernel(&k);
        assert!(!report.diag_dominant);
        assert!(report.tridiagonal_positive);
    }

    #[test]
    fn band_min_widths() {
        let k = newtonian_kernel(6, 1.0, 2.0).unwrap();
        assert_eq!(k.band_min(1), 2.0);
        assert_eq!(k.band_min(2), 1.0);
        assert_eq!(k.band_min(3), 0.5);
    }
}
