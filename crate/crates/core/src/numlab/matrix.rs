use std::ops::{Index, IndexMut};

use super::NumError;

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.concat() }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product; skips zero entries of `self`, which keeps truncations
    /// of diagonal-plus-low-rank operators cheap.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        self.data.iter().zip(&rhs.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square, exactly symmetric, finite matrix: a finite section of a
/// self-adjoint operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix(Matrix);

impl TruncatedMatrix {
    pub fn new(m: Matrix) -> Result<Self, NumError> {
        if !m.is_square() {
            return Err(NumError::NotSquare { rows: m.rows, cols: m.cols });
        }
        if !m.is_finite() {
            return Err(NumError::NonFinite);
        }
        for i in 0..m.rows {
            for j in i + 1..m.cols {
                if m[(i, j)] != m[(j, i)] {
                    return Err(NumError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(TruncatedMatrix(m))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        TruncatedMatrix(Matrix::from_diagonal(diag))
    }

    /// Symmetrizes by copying the upper triangle onto the lower one.
    pub(crate) fn from_upper(mut m: Matrix) -> Self {
        for i in 0..m.rows {
            for j in i + 1..m.cols {
                m[(j, i)] = m[(i, j)];
            }
        }
        TruncatedMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == 0.0))
    }
}

impl Index<(usize, usize)> for TruncatedMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// A list of vectors spanning a subspace of R^N.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, NumError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(NumError::DimensionMismatch { expected: dim, found: v.len() });
        }
        if vectors.len() > dim {
            return Err(NumError::RankDeficient { vector: dim });
        }
        Ok(SubspaceBasis { dim, vectors })
    }

    /// Vectors given by their nonzero `(index, value)` pairs, 1-based indices.
    pub fn from_sparse(dim: usize, vectors: &[Vec<(usize, f64)>]) -> Result<Self, NumError> {
        let dense = vectors
            .iter()
            .map(|terms| {
                let mut v = vec![0.0; dim];
                for &(index, value) in terms {
                    if index == 0 || index > dim {
                        return Err(NumError::IndexOutOfRange { index, dim });
                    }
                    v[index - 1] += value;
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dim, dense)
    }

    pub fn standard(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                v
            })
            .collect();
        SubspaceBasis { dim, vectors }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}
