//! Dense affine maps `x ↦ W x + b` over `f64`.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AffineError {
    #[error("weight matrix has {rows} rows but bias has length {bias}")]
    BiasLength { rows: usize, bias: usize },
    #[error("weight row {row} has {got} columns, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("non-finite entry in affine map")]
    NonFinite,
}

/// An affine map from `R^cols` to `R^rows`, weights stored row-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawAffine", into = "RawAffine"))]
pub struct AffineMap {
    rows: usize,
    cols: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(Serialize, Deserialize)]
struct RawAffine {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawAffine> for AffineMap {
    type Error = AffineError;

    fn try_from(raw: RawAffine) -> Result<Self, Self::Error> {
        AffineMap::from_rows(&raw.weights, raw.bias)
    }
}

#[cfg(feature = "serde")]
impl From<AffineMap> for RawAffine {
    fn from(map: AffineMap) -> Self {
        RawAffine { weights: map.row_iter().map(<[f64]>::to_vec).collect(), bias: map.bias }
    }
}

impl AffineMap {
    /// Builds a map from a row-major weight buffer of `rows * cols` entries.
    pub fn new(rows: usize, cols: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, AffineError> {
        if bias.len() != rows {
            return Err(AffineError::BiasLength { rows, bias: bias.len() });
        }
        if weights.len() != rows * cols {
            return Err(AffineError::RaggedRow {
                row: weights.len() / cols.max(1),
                got: weights.len(),
                expected: rows * cols,
            });
        }
        if weights.iter().chain(bias.iter()).any(|v| !v.is_finite()) {
            return Err(AffineError::NonFinite);
        }
        Ok(Self { rows, cols, weights, bias })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], bias: Vec<f64>) -> Result<Self, AffineError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut weights = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(AffineError::RaggedRow { row: i, got: row.len(), expected: cols });
            }
            weights.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, weights, bias)
    }

    pub fn identity(n: usize) -> Self {
        let mut weights = alloc::vec![0.0; n * n];
        for i in 0..n {
            weights[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, weights, bias: alloc::vec![0.0; n] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics, and a zero-column map still has rows
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Evaluates `W x + b`. The caller guarantees `x.len() == cols`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        self.row_iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).fold(*b, |acc, (w, xi)| acc + w * xi))
            .collect()
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.cols, inner.rows);
        let (m, n) = (self.rows, inner.cols);
        let mut weights = alloc::vec![0.0; m * n];
        let mut bias = self.bias.clone();
        for i in 0..m {
            let outer_row = self.row(i);
            for (k, &w) in outer_row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let inner_row = inner.row(k);
                for j in 0..n {
                    weights[i * n + j] += w * inner_row[j];
                }
                bias[i] += w * inner.bias[k];
            }
        }
        AffineMap { rows: m, cols: n, weights, bias }
    }

    /// Zeroes the output rows whose mask entry is `false`; this is a ReLU
    /// restricted to a fixed sign chamber.
    pub fn masked(&self, keep: &[bool]) -> AffineMap {
        debug_assert_eq!(keep.len(), self.rows);
        let mut out = self.clone();
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                out.weights[i * self.cols..(i + 1) * self.cols].fill(0.0);
                out.bias[i] = 0.0;
            }
        }
        out
    }

    /// Rows `l_i - l_j` for every pair `i < j`, in lexicographic pair order.
    pub fn pairwise_differences(&self) -> AffineMap {
        let k = self.rows;
        let pairs = k * k.saturating_sub(1) / 2;
        let mut weights = Vec::with_capacity(pairs * self.cols);
        let mut bias = Vec::with_capacity(pairs);
        for i in 0..k {
            for j in (i + 1)..k {
                weights.extend(self.row(i).iter().zip(self.row(j)).map(|(a, b)| a - b));
                bias.push(self.bias[i] - self.bias[j]);
            }
        }
        AffineMap { rows: pairs, cols: self.cols, weights, bias }
    }
}
