//! Cyclic Jacobi eigensolver for real symmetric matrices.
//!
//! Each rotation annihilates one off-diagonal pair; sweeps visit the pairs in
//! row order. Exact zeros are skipped, so a diagonal input comes back
//! untouched with the identity (up to column order) as eigenvector matrix.

use super::matrix::{Matrix, TruncatedMatrix};
use super::NumError;

/// Off-diagonal Frobenius norm at which a sweep sequence is considered
/// converged, relative to `max(1, ||M||_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// `Q diag(f(lambda)) Q^T`, assembled from the upper triangle so the
    /// result is exactly symmetric.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> TruncatedMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let q = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, &d) in mapped.iter().enumerate() {
                    let (a, b) = (q[(i, k)], q[(j, k)]);
                    if a != 0.0 && b != 0.0 {
                        acc += a * d * b;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        TruncatedMatrix::from_upper(out)
    }

    pub fn reconstruct(&self) -> TruncatedMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Eigenvalues (ascending) and orthogonal eigenvectors of a symmetric matrix.
pub fn jacobi_eigen(m: &TruncatedMatrix) -> Result<SymmetricEigen, NumError> {
    let n = m.dim();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * m.as_matrix().frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(NumError::NoConvergence { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                let theta = (aqq - app) / (2.0 * apq);
                // smaller root of t^2 + 2 theta t - 1 = 0
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let (arp, arq) = (a[(r, p)], a[(r, q)]);
                        let new_rp = c * arp - s * arq;
                        let new_rq = s * arp + c * arq;
                        a[(r, p)] = new_rp;
                        a[(p, r)] = new_rp;
                        a[(r, q)] = new_rq;
                        a[(q, r)] = new_rq;
                    }
                    let (vrp, vrq) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors, sweeps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(rows: &[Vec<f64>]) -> TruncatedMatrix {
        TruncatedMatrix::new(Matrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let e = jacobi_eigen(&TruncatedMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
        let e = jacobi_eigen(&TruncatedMatrix::diagonal(&[0.5, 1.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![0.5, 1.0, 1.0]);
    }

    #[test]
    fn two_by_two() {
        // lambda^2 - 4 lambda + 3 = 0
        let e = jacobi_eigen(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        let v = e.vectors.column(1);
        assert!((v[0].abs() - v[1].abs()).abs() < 1e-12);
    }

    #[test]
    fn empty_and_scalar() {
        let e = jacobi_eigen(&TruncatedMatrix::diagonal(&[])).unwrap();
        assert!(e.values.is_empty());
        let e = jacobi_eigen(&TruncatedMatrix::diagonal(&[-4.0])).unwrap();
        assert_eq!(e.values, vec![-4.0]);
    }

    fn symmetric(n: usize) -> impl Strategy<Value = TruncatedMatrix> {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |data| {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = data[i * n + j];
                }
            }
            TruncatedMatrix::from_upper(m)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn reconstruction_and_orthogonality(m in (1usize..12).prop_flat_map(symmetric)) {
            let e = jacobi_eigen(&m).unwrap();
            let scale = m.as_matrix().frobenius_norm().max(1.0);
            let recon = e.reconstruct();
            prop_assert!(recon.as_matrix().sub(m.as_matrix()).frobenius_norm() <= 1e-10 * scale);
            let qtq = e.vectors.transpose().matmul(&e.vectors);
            prop_assert!(qtq.sub(&Matrix::identity(m.dim())).frobenius_norm() <= 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = m.diagonal_entries().iter().sum();
            prop_assert!((trace - e.values.iter().sum::<f64>()).abs() <= 1e-9 * scale);
        }
    }
}
