//! Floating-point oracle layer.
//!
//! Finite sections (leading `N x N` corners) of the symbolic models, a Jacobi
//! eigensolver, matrix square roots, norms restricted to subspaces, and the
//! numeric checks that tie them back to the exact layer.

mod jacobi;
mod matrix;

use thiserror::Error;

use crate::classify::{CompositeOperator, Witness};
use crate::seqmodel::SequenceSpec;
use crate::shiftapp::WeightedShift;

pub use jacobi::{jacobi_eigen, SymmetricEigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{Matrix, SubspaceBasis, TruncatedMatrix};

/// Reconstruction / orthogonality budget for the eigensolver.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Relative residual below which Gram-Schmidt drops a vector.
pub const PIVOT_TOL: f64 = 1e-10;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} outside the truncation 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("basis vector {vector} is numerically dependent on the previous ones")]
    RankDeficient { vector: usize },
    #[error("restricted norm {numeric} at m = {m} disagrees with the exact prediction {predicted}")]
    PredictionMismatch { m: usize, numeric: f64, predicted: f64 },
}

/// `diag(entry(1), ..., entry(N))`.
pub fn truncate_diagonal(seq: &SequenceSpec, n: usize) -> TruncatedMatrix {
    let diag: Vec<f64> = seq.entries(n).iter().map(|v| v.to_f64()).collect();
    TruncatedMatrix::diagonal(&diag)
}

/// `N x N` section of a weighted shift and `T_N^T T_N`.
///
/// Weights are real: a phase that is a multiple of pi flips the sign, any
/// other phase is dropped (only moduli reach `T^T T`).
pub fn truncate_shift(shift: &WeightedShift, n: usize) -> Result<(Matrix, TruncatedMatrix), NumError> {
    if n < 2 {
        return Err(NumError::InvalidSize(format!("shift truncation needs N >= 2, got {n}")));
    }
    let moduli = shift.moduli().entries(n - 1);
    let mut t = Matrix::zeros(n, n);
    for (i, w) in moduli.iter().enumerate() {
        let theta = shift.phase(i + 1);
        let sign = if theta.sin().abs() < 1e-12 && theta.cos() < 0.0 { -1.0 } else { 1.0 };
        t[(i + 1, i)] = sign * w.to_f64();
    }
    let tt = TruncatedMatrix::new(t.transpose().matmul(&t))?;
    Ok((t, tt))
}

/// `N x N` section of `alpha I + K + F`, built from exact entries.
pub fn truncate_composite(op: &CompositeOperator, n: usize) -> TruncatedMatrix {
    let k = op.k_diag().entries(n);
    let mut m = Matrix::zeros(n, n);
    for (i, kv) in k.iter().enumerate() {
        m[(i, i)] = (op.alpha() + kv).to_f64();
    }
    let support: Vec<usize> = op.f_support().into_iter().filter(|&i| i <= n).collect();
    for &i in &support {
        for &j in support.iter().filter(|&&j| j >= i) {
            m[(i - 1, j - 1)] = op.entry(i, j).to_f64();
        }
    }
    TruncatedMatrix::from_upper(m)
}

/// `Q diag(sqrt(max(lambda, 0))) Q^T`; eigenvalues in `[-tol, 0)` count as 0.
pub fn matrix_sqrt(m: &TruncatedMatrix, tol: f64) -> Result<TruncatedMatrix, NumError> {
    let eig = jacobi_eigen(m)?;
    if let Some(lowest) = eig.min().filter(|&l| l < -tol) {
        return Err(NumError::NotPositiveSemidefinite { eigenvalue: lowest });
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Number of eigenvalues below `threshold - tol`.
pub fn spectral_count_below(m: &TruncatedMatrix, threshold: f64, tol: f64) -> Result<usize, NumError> {
    let eig = jacobi_eigen(m)?;
    Ok(eig.values.iter().filter(|&&l| l < threshold - tol).count())
}

/// Modified Gram-Schmidt; columns of the result span the basis.
fn orthonormalize(basis: &SubspaceBasis) -> Result<Matrix, NumError> {
    let n = basis.dim();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for (idx, v) in basis.vectors().iter().enumerate() {
        let original = norm2(v);
        let mut w = v.clone();
        for prev in &q {
            let proj = dot(prev, &w);
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= proj * pi;
            }
        }
        let residual = norm2(&w);
        if original == 0.0 || residual <= PIVOT_TOL * original {
            return Err(NumError::RankDeficient { vector: idx });
        }
        w.iter_mut().for_each(|x| *x /= residual);
        q.push(w);
    }
    let mut out = Matrix::zeros(n, q.len());
    for (j, col) in q.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `(M Q)^T (M Q)` for an orthonormal `Q` spanning the basis.
fn compressed_gram(m: &TruncatedMatrix, basis: &SubspaceBasis) -> Result<(Matrix, Matrix), NumError> {
    if basis.dim() != m.dim() {
        return Err(NumError::DimensionMismatch { expected: m.dim(), found: basis.dim() });
    }
    let q = orthonormalize(basis)?;
    let mq = m.as_matrix().matmul(&q);
    Ok((q, mq.transpose().matmul(&mq)))
}

fn leading_block(g: &Matrix, k: usize) -> TruncatedMatrix {
    let mut b = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            b[(i, j)] = g[(i, j)];
        }
    }
    TruncatedMatrix::from_upper(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedNorm {
    pub norm: f64,
    /// Unit vector of the subspace with `||M x|| = norm`.
    pub maximizer: Vec<f64>,
}

/// Norm of `M` restricted to the span of `basis`, with a maximizing unit
/// vector.
pub fn norm_on_subspace(m: &TruncatedMatrix, basis: &SubspaceBasis) -> Result<RestrictedNorm, NumError> {
    if basis.is_empty() {
        return Err(NumError::InvalidSize("empty basis".into()));
    }
    let (q, gram) = compressed_gram(m, basis)?;
    let eig = jacobi_eigen(&leading_block(&gram, basis.len()))?;
    let top = eig.values.len() - 1;
    let coeffs = eig.vectors.column(top);
    let maximizer = (0..q.rows()).map(|i| (0..q.cols()).map(|j| q[(i, j)] * coeffs[j]).sum()).collect();
    Ok(RestrictedNorm { norm: eig.values[top].max(0.0).sqrt(), maximizer })
}

/// Norms of `M` on `span{v_1..v_m}` for every prefix m = 1..=len.
///
/// Gram-Schmidt on a prefix yields the prefix of the full orthonormal set, so
/// the compressions are leading blocks of one Gram matrix.
pub fn prefix_norms(m: &TruncatedMatrix, basis: &SubspaceBasis) -> Result<Vec<f64>, NumError> {
    let (_, gram) = compressed_gram(m, basis)?;
    (1..=basis.len())
        .map(|k| {
            let eig = jacobi_eigen(&leading_block(&gram, k))?;
            Ok(eig.max().expect("k >= 1").max(0.0).sqrt())
        })
        .collect()
}

/// Outcome of checking a witness on a finite section.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessCheck {
    pub size: usize,
    pub sup: f64,
    /// `nu_m`, the restricted norm on the first m witness vectors.
    pub norms: Vec<f64>,
    pub predicted: Vec<f64>,
    pub strictly_increasing: bool,
    /// `min_m (sup - nu_m)`.
    pub min_gap_to_sup: f64,
    pub max_prediction_error: f64,
}

impl WitnessCheck {
    /// Norms climb strictly and stay more than `margin` below the supremum.
    pub fn escapes(&self, margin: f64) -> bool {
        self.strictly_increasing && self.min_gap_to_sup > margin
    }
}

/// Builds the first `m_max` witness vectors inside the `n`-section and
/// compares their restricted norms with the exact predictions.
pub fn verify_witness_numeric(
    seq: &SequenceSpec,
    witness: &Witness,
    m_max: usize,
    n: usize,
    tol: f64,
) -> Result<WitnessCheck, NumError> {
    if m_max == 0 {
        return Err(NumError::InvalidSize("m_max must be at least 1".into()));
    }
    let vectors = witness.basis_vectors(seq, m_max);
    let basis = SubspaceBasis::from_sparse(n, &vectors)?;
    let norms = prefix_norms(&truncate_diagonal(seq, n), &basis)?;
    let predicted: Vec<f64> = witness.predicted_norms(seq, m_max).iter().map(|r| r.to_f64()).collect();
    let sup = witness.sup().to_f64();

    let mut max_prediction_error: f64 = 0.0;
    for (i, (&nu, &p)) in norms.iter().zip(&predicted).enumerate() {
        let err = (nu - p).abs();
        if err > tol {
            return Err(NumError::PredictionMismatch { m: i + 1, numeric: nu, predicted: p });
        }
        max_prediction_error = max_prediction_error.max(err);
    }
    Ok(WitnessCheck {
        size: n,
        sup,
        strictly_increasing: norms.windows(2).all(|w| w[0] < w[1]),
        min_gap_to_sup: norms.iter().map(|nu| sup - nu).fold(f64::INFINITY, f64::min),
        max_prediction_error,
        predicted,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{build_witness, RankOneTerm};
    use crate::rational::Rational;
    use crate::seqmodel::Strand;
    use std::collections::BTreeMap;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn diagonal_truncations() {
        let c = SequenceSpec::uniform(Strand::exact(q("2")).unwrap());
        assert_eq!(truncate_diagonal(&c, 3).diagonal_entries(), vec![2.0, 2.0, 2.0]);
        let a = SequenceSpec::uniform(Strand::above(q("1"), q("1"), q("1/2")).unwrap());
        assert_eq!(truncate_diagonal(&a, 3).diagonal_entries(), vec![2.0, 1.5, 1.25]);
        let o = a.with_overrides(BTreeMap::from([(2, q("10"))])).unwrap();
        let t = truncate_diagonal(&o, 3);
        assert_eq!(t.diagonal_entries(), vec![2.0, 10.0, 1.25]);
        assert!(t.is_diagonal());
    }

    fn finite_shift(weights: &[i64]) -> WeightedShift {
        let pairs = weights.iter().enumerate().map(|(i, &w)| (i + 1, Rational::from_integer(w)));
        WeightedShift::real(SequenceSpec::from_pairs(vec![Strand::exact(q("1")).unwrap()], pairs).unwrap())
    }

    #[test]
    fn shift_truncations() {
        let (t, tt) = truncate_shift(&finite_shift(&[1, 2, 3]), 4).unwrap();
        assert_eq!(t[(1, 0)], 1.0);
        assert_eq!(t[(3, 2)], 3.0);
        assert_eq!(tt.as_matrix(), &Matrix::from_diagonal(&[1.0, 4.0, 9.0, 0.0]));

        let ones = WeightedShift::real(SequenceSpec::uniform(Strand::exact(q("1")).unwrap()));
        let (_, tt) = truncate_shift(&ones, 3).unwrap();
        assert_eq!(tt.as_matrix(), &Matrix::from_diagonal(&[1.0, 1.0, 0.0]));

        let (_, tt) = truncate_shift(&finite_shift(&[0, 5]), 3).unwrap();
        assert_eq!(tt.as_matrix(), &Matrix::from_diagonal(&[0.0, 25.0, 0.0]));

        assert!(matches!(truncate_shift(&ones, 1), Err(NumError::InvalidSize(_))));
    }

    #[test]
    fn phase_pi_flips_sign_only() {
        let seq = SequenceSpec::uniform(Strand::exact(q("2")).unwrap());
        let shift = WeightedShift::new(seq, BTreeMap::from([(1, std::f64::consts::PI)])).unwrap();
        let (t, tt) = truncate_shift(&shift, 3).unwrap();
        assert_eq!(t[(1, 0)], -2.0);
        assert_eq!(tt.diagonal_entries(), vec![4.0, 4.0, 0.0]);
    }

    #[test]
    fn sqrt_examples() {
        let s = matrix_sqrt(&TruncatedMatrix::diagonal(&[4.0, 9.0]), 1e-12).unwrap();
        assert_eq!(s.as_matrix(), &Matrix::from_diagonal(&[2.0, 3.0]));

        let m = TruncatedMatrix::new(Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]])).unwrap();
        let s = matrix_sqrt(&m, 1e-12).unwrap();
        let r3 = 3f64.sqrt();
        let expected = Matrix::from_rows(&[vec![(r3 + 1.0) / 2.0, (r3 - 1.0) / 2.0], vec![(r3 - 1.0) / 2.0, (r3 + 1.0) / 2.0]]);
        assert!(s.as_matrix().max_abs_diff(&expected) < 1e-12);
        assert!(s.as_matrix().matmul(s.as_matrix()).max_abs_diff(m.as_matrix()) < 1e-11);

        let s = matrix_sqrt(&TruncatedMatrix::diagonal(&[1.0, 4.0, 9.0, 0.0]), 1e-12).unwrap();
        assert_eq!(s.diagonal_entries(), vec![1.0, 2.0, 3.0, 0.0]);

        let neg = TruncatedMatrix::diagonal(&[1.0, -1e-3]);
        assert!(matches!(matrix_sqrt(&neg, 1e-8), Err(NumError::NotPositiveSemidefinite { .. })));
        let tiny = TruncatedMatrix::diagonal(&[1.0, -1e-13]);
        assert_eq!(matrix_sqrt(&tiny, 1e-12).unwrap().diagonal_entries(), vec![1.0, 0.0]);
    }

    #[test]
    fn restricted_norms() {
        let d = TruncatedMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let b = SubspaceBasis::from_sparse(3, &[vec![(1, 1.0)], vec![(2, 1.0)]]).unwrap();
        let r = norm_on_subspace(&d, &b).unwrap();
        assert!((r.norm - 2.0).abs() < 1e-14);
        assert!((r.maximizer[1].abs() - 1.0).abs() < 1e-14 && r.maximizer[0] == 0.0);

        let b = SubspaceBasis::from_sparse(3, &[vec![(2, 1.0), (3, 1.0)]]).unwrap();
        let r = norm_on_subspace(&d, &b).unwrap();
        assert!((r.norm - 6.5f64.sqrt()).abs() < 1e-14);

        let d2 = TruncatedMatrix::diagonal(&[1.0, 2.0]);
        let b = SubspaceBasis::from_sparse(2, &[vec![(1, 1.0), (2, (5.0f64 / 7.0).sqrt())]]).unwrap();
        assert!((norm_on_subspace(&d2, &b).unwrap().norm - 1.5).abs() < 1e-14);

        let full = norm_on_subspace(&d, &SubspaceBasis::standard(3)).unwrap();
        assert!((full.norm - 3.0).abs() < 1e-10);
    }

    #[test]
    fn rank_deficient_basis() {
        let d = TruncatedMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let b = SubspaceBasis::from_sparse(3, &[vec![(1, 1.0), (2, 1.0)], vec![(1, 2.0), (2, 2.0)]]).unwrap();
        assert_eq!(norm_on_subspace(&d, &b), Err(NumError::RankDeficient { vector: 1 }));
        let z = SubspaceBasis::new(3, vec![vec![0.0; 3]]).unwrap();
        assert_eq!(norm_on_subspace(&d, &z), Err(NumError::RankDeficient { vector: 0 }));
    }

    #[test]
    fn witness_checks() {
        let seq = SequenceSpec::uniform(Strand::below(q("1"), q("1/2"), q("1/2")).unwrap());
        let w = build_witness(&seq).unwrap();
        let check = verify_witness_numeric(&seq, &w, 3, 10, 1e-8).unwrap();
        assert_eq!(check.norms, vec![0.5, 0.75, 0.875]);
        assert!(check.escapes(1e-12));

        let two = SequenceSpec::new(
            vec![Strand::exact(q("1")).unwrap(), Strand::exact(q("2")).unwrap()],
            BTreeMap::new(),
        )
        .unwrap();
        let w = build_witness(&two).unwrap();
        let check = verify_witness_numeric(&two, &w, 1, 4, 1e-8).unwrap();
        assert!((check.norms[0] - 1.5).abs() < 1e-14);
        assert!(check.strictly_increasing && check.min_gap_to_sup > 0.0);

        let check = verify_witness_numeric(&two, &w, 20, 60, 1e-8).unwrap();
        assert!(check.escapes(1e-12));

        assert!(matches!(
            verify_witness_numeric(&two, &w, 20, 10, 1e-8),
            Err(NumError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn composite_counts() {
        let zero = SequenceSpec::uniform(Strand::exact(q("0")).unwrap());
        let op = CompositeOperator::new(
            q("1"),
            zero,
            vec![RankOneTerm::new(q("-1/2"), BTreeMap::from([(1, q("1"))]))],
        )
        .unwrap();
        let t = truncate_composite(&op, 3);
        assert_eq!(t.diagonal_entries(), vec![0.5, 1.0, 1.0]);
        assert_eq!(spectral_count_below(&t, 1.0, 1e-8).unwrap(), 1);
        assert_eq!(spectral_count_below(&TruncatedMatrix::diagonal(&[2.0, 3.0]), 1.0, 1e-8).unwrap(), 0);
    }

    #[test]
    fn diagonal_spectrum_is_exact() {
        let seq = SequenceSpec::new(
            vec![Strand::above(q("1"), q("3"), q("2/3")).unwrap(), Strand::below(q("2"), q("1"), q("1/3")).unwrap()],
            BTreeMap::from([(4, q("7/3"))]),
        )
        .unwrap();
        let t = truncate_diagonal(&seq, 40);
        let mut expected: Vec<f64> = seq.entries(40).iter().map(|v| v.to_f64()).collect();
        expected.sort_by(f64::total_cmp);
        let eig = jacobi_eigen(&t).unwrap();
        assert!(eig.values.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}
