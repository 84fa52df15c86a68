//! Dense real matrices, interval-uncertain matrices, and diagonal scalings.
//!
//! These are the carrier types for everything else in the crate: localization
//! radii are defined here, higher modules only combine them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failures when constructing matrices or scalings.
#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix must be square and non-empty, got {rows} rows with row {row} of length {len}")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("entry ({i},{j}) is not finite: {value}")]
    NotFinite { i: usize, j: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("diagonal interval {i} is inverted: [{lo}, {hi}]")]
    InvertedInterval { i: usize, lo: f64, hi: f64 },
    #[error("off-diagonal magnitude ({i},{j}) must be non-negative and finite, got {value}")]
    BadMagnitude { i: usize, j: usize, value: f64 },
    #[error("magnitude table must have a zero diagonal, got {value} at ({i},{i})")]
    NonZeroMagDiagonal { i: usize, value: f64 },
    #[error("scaling weight d[{i}] must be positive and finite, got {value}")]
    BadWeight { i: usize, value: f64 },
    #[error("blend exponent alpha must lie in [0, 1], got {value}")]
    BadAlpha { value: f64 },
}

/// Dense square real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

/// JSON shape: `{"n": 2, "entries": [[-1.0, -2.5], [-0.5, -2.0]]}`.
#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for RealMatrix {
    type Error = MatrixError;
    fn try_from(raw: RawMatrix) -> Result<Self, MatrixError> {
        if raw.entries.len() != raw.n {
            return Err(MatrixError::NotSquare {
                rows: raw.entries.len(),
                row: 0,
                len: raw.entries.first().map_or(0, Vec::len),
            });
        }
        RealMatrix::from_rows(&raw.entries)
    }
}

impl From<RealMatrix> for RawMatrix {
    fn from(m: RealMatrix) -> RawMatrix {
        RawMatrix {
            n: m.n,
            entries: (0..m.n).map(|i| m.data[i * m.n..(i + 1) * m.n].to_vec()).collect(),
        }
    }
}

impl RealMatrix {
    /// Builds from row slices; every entry must be finite and the shape square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::NotSquare { rows: 0, row: 0, len: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::NotSquare { rows: n, row: i, len: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(MatrixError::NotFinite { i, j, value: v });
                }
                data.push(v);
            }
        }
        Ok(RealMatrix { n, data })
    }

    /// Builds from a flat row-major buffer of length `n * n`.
    pub fn from_flat(n: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 || data.len() != n * n {
            return Err(MatrixError::DimensionMismatch { expected: n * n, got: data.len() });
        }
        for (k, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(MatrixError::NotFinite { i: k / n, j: k % n, value: v });
            }
        }
        Ok(RealMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        RealMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> RealMatrix {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    /// `self + other`, same dimension required.
    pub fn add(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RealMatrix { n: self.n, data }
    }

    pub fn scale(&self, c: f64) -> RealMatrix {
        RealMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// Dense product `self * other`.
    pub fn matmul(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch in matmul");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let (orow, rrow) = (k * n, i * n);
                for j in 0..n {
                    out.data[rrow + j] += a * other.data[orow + j];
                }
            }
        }
        out
    }

    /// `out = self * x` for a vector `x` of length `n`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n, "vector length mismatch");
        assert_eq!(out.len(), self.n, "output length mismatch");
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Row radius `R_i(Q) = Σ_{j≠i} (d_j/d_i) |q_ij|` (plain when no scaling).
    ///
    /// # Panics
    /// If `i >= n` or the scaling dimension differs from `n`.
    pub fn row_radius(&self, i: usize, scaling: Option<&Scaling>) -> f64 {
        assert!(i < self.n, "row index {i} out of range for n={}", self.n);
        let row = self.row(i);
        match scaling {
            None => sum_abs_except(row, i),
            Some(s) => {
                s.assert_dim(self.n);
                let di = s.d[i];
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &v)| s.d[j] / di * v.abs())
                    .sum()
            }
        }
    }

    /// Column radius `C_j(Q) = Σ_{i≠j} (d_i/d_j) |q_ij|` (plain when no scaling).
    ///
    /// # Panics
    /// If `j >= n` or the scaling dimension differs from `n`.
    pub fn col_radius(&self, j: usize, scaling: Option<&Scaling>) -> f64 {
        assert!(j < self.n, "column index {j} out of range for n={}", self.n);
        let mut sum = 0.0;
        for i in 0..self.n {
            if i == j {
                continue;
            }
            let w = match scaling {
                None => 1.0,
                Some(s) => {
                    s.assert_dim(self.n);
                    s.d[i] / s.d[j]
                }
            };
            sum += w * self.get(i, j).abs();
        }
        sum
    }
}

fn sum_abs_except(row: &[f64], skip: usize) -> f64 {
    row.iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, &v)| v.abs())
        .sum()
}

/// Positive diagonal weights `d` plus a blend exponent `alpha ∈ [0, 1]`.
///
/// The weights enter the radii as ratios only, so `c·d` describes the same
/// scaling as `d` for any `c > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScaling", into = "RawScaling")]
pub struct Scaling {
    d: Vec<f64>,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct RawScaling {
    d: Vec<f64>,
    alpha: f64,
}

impl TryFrom<RawScaling> for Scaling {
    type Error = MatrixError;
    fn try_from(raw: RawScaling) -> Result<Self, MatrixError> {
        Scaling::new(raw.d, raw.alpha)
    }
}

impl From<Scaling> for RawScaling {
    fn from(s: Scaling) -> RawScaling {
        RawScaling { d: s.d, alpha: s.alpha }
    }
}

impl Scaling {
    pub fn new(d: Vec<f64>, alpha: f64) -> Result<Self, MatrixError> {
        for (i, &v) in d.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(MatrixError::BadWeight { i, value: v });
            }
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(MatrixError::BadAlpha { value: alpha });
        }
        Ok(Scaling { d, alpha })
    }

    /// Unit weights with a centered blend exponent.
    pub fn uniform(n: usize) -> Self {
        Scaling { d: vec![1.0; n], alpha: 0.5 }
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self, MatrixError> {
        Scaling::new(self.d.clone(), alpha)
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    fn assert_dim(&self, n: usize) {
        assert_eq!(self.d.len(), n, "scaling has {} weights, matrix needs {n}", self.d.len());
    }
}

/// Interval-uncertain matrix `Q(t) = Q0 + ΔQ(t)` with signed diagonal
/// intervals `Δq_ii ∈ [diag_lo_i, diag_hi_i]` and off-diagonal magnitude
/// bounds `|Δq_ij| ≤ m_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalMatrix", into = "RawIntervalMatrix")]
pub struct IntervalMatrix {
    nominal: RealMatrix,
    diag_lo: Vec<f64>,
    diag_hi: Vec<f64>,
    offdiag_mag: RealMatrix,
}

/// JSON shape extends the matrix schema:
/// `{"n": 2, "entries": [...], "diag_lo": [...], "diag_hi": [...], "offdiag_mag": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct RawIntervalMatrix {
    n: usize,
    entries: Vec<Vec<f64>>,
    diag_lo: Vec<f64>,
    diag_hi: Vec<f64>,
    offdiag_mag: Vec<Vec<f64>>,
}

impl TryFrom<RawIntervalMatrix> for IntervalMatrix {
    type Error = MatrixError;
    fn try_from(raw: RawIntervalMatrix) -> Result<Self, MatrixError> {
        let nominal = RealMatrix::try_from(RawMatrix { n: raw.n, entries: raw.entries })?;
        let offdiag_mag = RealMatrix::from_rows(&raw.offdiag_mag)?;
        IntervalMatrix::new(nominal, raw.diag_lo, raw.diag_hi, offdiag_mag)
    }
}

impl From<IntervalMatrix> for RawIntervalMatrix {
    fn from(m: IntervalMatrix) -> RawIntervalMatrix {
        let n = m.nominal.n();
        RawIntervalMatrix {
            n,
            entries: (0..n).map(|i| m.nominal.row(i).to_vec()).collect(),
            diag_lo: m.diag_lo,
            diag_hi: m.diag_hi,
            offdiag_mag: (0..n).map(|i| m.offdiag_mag.row(i).to_vec()).collect(),
        }
    }
}

impl IntervalMatrix {
    /// Builds the model; intervals must satisfy `lo ≤ 0 ≤ hi` is NOT required,
    /// only `lo ≤ hi`; magnitudes must be non-negative with a zero diagonal.
    pub fn new(
        nominal: RealMatrix,
        diag_lo: Vec<f64>,
        diag_hi: Vec<f64>,
        offdiag_mag: RealMatrix,
    ) -> Result<Self, MatrixError> {
        let n = nominal.n();
        if diag_lo.len() != n || diag_hi.len() != n {
            return Err(MatrixError::DimensionMismatch {
                expected: n,
                got: diag_lo.len().min(diag_hi.len()),
            });
        }
        if offdiag_mag.n() != n {
            return Err(MatrixError::DimensionMismatch { expected: n, got: offdiag_mag.n() });
        }
        for i in 0..n {
            let (lo, hi) = (diag_lo[i], diag_hi[i]);
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(MatrixError::InvertedInterval { i, lo, hi });
            }
            for j in 0..n {
                let m = offdiag_mag.get(i, j);
                if i == j {
                    if m != 0.0 {
                        return Err(MatrixError::NonZeroMagDiagonal { i, value: m });
                    }
                } else if !(m.is_finite() && m >= 0.0) {
                    return Err(MatrixError::BadMagnitude { i, j, value: m });
                }
            }
        }
        Ok(IntervalMatrix { nominal, diag_lo, diag_hi, offdiag_mag })
    }

    /// Zero-uncertainty model around a constant matrix.
    pub fn degenerate(nominal: RealMatrix) -> Self {
        let n = nominal.n();
        IntervalMatrix {
            nominal,
            diag_lo: vec![0.0; n],
            diag_hi: vec![0.0; n],
            offdiag_mag: RealMatrix::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.nominal.n()
    }

    pub fn nominal(&self) -> &RealMatrix {
        &self.nominal
    }

    pub fn diag_lo(&self) -> &[f64] {
        &self.diag_lo
    }

    pub fn diag_hi(&self) -> &[f64] {
        &self.diag_hi
    }

    pub fn offdiag_mag(&self) -> &RealMatrix {
        &self.offdiag_mag
    }

    /// True when all intervals have zero width and all magnitudes vanish.
    pub fn is_degenerate(&self) -> bool {
        self.diag_lo.iter().all(|&v| v == 0.0)
            && self.diag_hi.iter().all(|&v| v == 0.0)
            && self.offdiag_mag.as_slice().iter().all(|&v| v == 0.0)
    }

    /// Hatted row radius `R̂_i = Σ_{j≠i} (d_j/d_i) (|q0_ij| + m_ij)`.
    ///
    /// # Panics
    /// If `i >= n` or the scaling dimension differs from `n`.
    pub fn hat_row_radius(&self, i: usize, scaling: Option<&Scaling>) -> f64 {
        let n = self.n();
        assert!(i < n, "row index {i} out of range for n={n}");
        let mut sum = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let w = match scaling {
                None => 1.0,
                Some(s) => {
                    s.assert_dim(n);
                    s.d()[j] / s.d()[i]
                }
            };
            sum += w * (self.nominal.get(i, j).abs() + self.offdiag_mag.get(i, j));
        }
        sum
    }

    /// Hatted column radius `Ĉ_j = Σ_{i≠j} (d_i/d_j) (|q0_ij| + m_ij)`.
    ///
    /// # Panics
    /// If `j >= n` or the scaling dimension differs from `n`.
    pub fn hat_col_radius(&self, j: usize, scaling: Option<&Scaling>) -> f64 {
        let n = self.n();
        assert!(j < n, "column index {j} out of range for n={n}");
        let mut sum = 0.0;
        for i in 0..n {
            if i == j {
                continue;
            }
            let w = match scaling {
                None => 1.0,
                Some(s) => {
                    s.assert_dim(n);
                    s.d()[i] / s.d()[j]
                }
            };
            sum += w * (self.nominal.get(i, j).abs() + self.offdiag_mag.get(i, j));
        }
        sum
    }

    /// Enclosure of `A(t) + Aᵀ(t)`: nominal `A0 + A0ᵀ`, diagonal intervals
    /// doubled, off-diagonal magnitudes `m_ij + m_ji`.
    pub fn symmetrize(&self) -> IntervalMatrix {
        let n = self.n();
        let nominal = self.nominal.add(&self.nominal.transpose());
        let diag_lo = self.diag_lo.iter().map(|v| 2.0 * v).collect();
        let diag_hi = self.diag_hi.iter().map(|v| 2.0 * v).collect();
        let mut mag = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    mag.set(i, j, self.offdiag_mag.get(i, j) + self.offdiag_mag.get(j, i));
                }
            }
        }
        IntervalMatrix { nominal, diag_lo, diag_hi, offdiag_mag: mag }
    }
}
