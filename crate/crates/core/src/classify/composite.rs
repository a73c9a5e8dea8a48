//! Operators written directly as `alpha I + K + F`.
//!
//! `K` is a positive compact diagonal (a sequence model whose strands all
//! converge to 0 from above or sit at 0) and `F = sum_j c_j u_j u_j^T` is a
//! finite sum of symmetric rank-one terms with finitely supported `u_j`.
//! Such an operator is absolutely norm attaining as soon as it is positive,
//! and positivity reduces to a finite check: beyond the support of `F` the
//! operator is the diagonal `alpha + K(n) >= 0`.

use std::collections::{BTreeMap, BTreeSet};

use crate::numlab::{jacobi_eigen, truncate_composite};
use crate::rational::Rational;
use crate::seqmodel::{Approach, SequenceSpec};

use super::ClassifyError;

/// `coef * u u^T` with `u` given by its nonzero entries (1-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneTerm {
    coef: Rational,
    vector: BTreeMap<usize, Rational>,
}

impl RankOneTerm {
    pub fn new(coef: Rational, vector: BTreeMap<usize, Rational>) -> Self {
        let vector = vector.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        RankOneTerm { coef, vector }
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    pub fn vector(&self) -> &BTreeMap<usize, Rational> {
        &self.vector
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeOperator {
    alpha: Rational,
    k_diag: SequenceSpec,
    f_terms: Vec<RankOneTerm>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub alpha: Rational,
    pub is_positive: bool,
    /// `(N, smallest eigenvalue of the N x N section)`, in the order checked.
    pub min_eigenvalue_per_size: Vec<(usize, f64)>,
    pub rank_f: usize,
}

impl CompositeOperator {
    pub fn new(alpha: Rational, k_diag: SequenceSpec, f_terms: Vec<RankOneTerm>) -> Result<Self, ClassifyError> {
        if alpha.is_negative() {
            return Err(ClassifyError::InvalidComposite("alpha must be nonnegative".into()));
        }
        for (j, s) in k_diag.strands().iter().enumerate() {
            if !s.limit().is_zero() {
                return Err(ClassifyError::InvalidComposite(format!(
                    "k_diag strand {j} must have limit 0 (compact part)"
                )));
            }
            debug_assert!(s.approach() != Approach::Below, "below strands cannot have limit 0");
        }
        if f_terms.iter().any(|t| t.vector.contains_key(&0)) {
            return Err(ClassifyError::InvalidComposite("f_terms vector indices start at 1".into()));
        }
        Ok(CompositeOperator { alpha, k_diag, f_terms })
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn k_diag(&self) -> &SequenceSpec {
        &self.k_diag
    }

    pub fn f_terms(&self) -> &[RankOneTerm] {
        &self.f_terms
    }

    /// Indices touched by `F`.
    pub fn f_support(&self) -> BTreeSet<usize> {
        self.f_terms
            .iter()
            .filter(|t| !t.coef.is_zero())
            .flat_map(|t| t.vector.keys().copied())
            .collect()
    }

    /// `F(i, j)`, exact.
    pub fn f_entry(&self, i: usize, j: usize) -> Rational {
        self.f_terms
            .iter()
            .filter_map(|t| Some(&t.coef * t.vector.get(&i)? * t.vector.get(&j)?))
            .sum()
    }

    /// `(alpha I + K + F)(i, j)`, exact.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        let f = self.f_entry(i, j);
        if i == j {
            &self.alpha + self.k_diag.entry(i) + f
        } else {
            f
        }
    }

    /// Exact rank of `F`, by elimination on its support block.
    pub fn rank_f(&self) -> usize {
        let support: Vec<usize> = self.f_support().into_iter().collect();
        let mut rows: Vec<Vec<Rational>> = support
            .iter()
            .map(|&i| support.iter().map(|&j| self.f_entry(i, j)).collect())
            .collect();
        rank_of(&mut rows)
    }
}

fn rank_of(rows: &mut [Vec<Rational>]) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = &*x - &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Certifies that `alpha I + K + F` is positive (hence absolutely norm
/// attaining) by checking the smallest eigenvalue of finite sections.
///
/// Every requested size is checked; if none of them covers the support of
/// `F`, the section at the largest support index is checked too, since that
/// block alone decides positivity.
pub fn an_certificate(op: &CompositeOperator, sizes: &[usize], tol: f64) -> Result<Certificate, ClassifyError> {
    if sizes.is_empty() {
        return Err(ClassifyError::NotApplicable("no truncation sizes given".into()));
    }
    if sizes.contains(&0) {
        return Err(ClassifyError::NotApplicable("truncation sizes must be positive".into()));
    }
    let mut checked: Vec<usize> = sizes.to_vec();
    let support_end = op.f_support().last().copied().unwrap_or(0);
    if support_end > *sizes.iter().max().expect("nonempty") {
        checked.push(support_end);
    }

    let mut min_eigenvalue_per_size = Vec::with_capacity(checked.len());
    for n in checked {
        let eig = jacobi_eigen(&truncate_composite(op, n))?;
        let lowest = eig.min().expect("n >= 1");
        if lowest < -tol {
            return Err(ClassifyError::NotPositive { size: n, eigenvalue: lowest });
        }
        min_eigenvalue_per_size.push((n, lowest));
    }
    Ok(Certificate {
        alpha: op.alpha.clone(),
        is_positive: true,
        min_eigenvalue_per_size,
        rank_f: op.rank_f(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqmodel::Strand;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn zero_k() -> SequenceSpec {
        SequenceSpec::uniform(Strand::exact(q("0")).unwrap())
    }

    fn e(n: usize) -> BTreeMap<usize, Rational> {
        BTreeMap::from([(n, q("1"))])
    }

    #[test]
    fn rank_one_dip_is_positive() {
        let op = CompositeOperator::new(q("1"), zero_k(), vec![RankOneTerm::new(q("-1/2"), e(1))]).unwrap();
        let cert = an_certificate(&op, &[3, 10], 1e-8).unwrap();
        assert!(cert.is_positive);
        assert_eq!(cert.rank_f, 1);
        assert_eq!(cert.min_eigenvalue_per_size, vec![(3, 0.5), (10, 0.5)]);
    }

    #[test]
    fn compact_only() {
        let k = SequenceSpec::uniform(Strand::above(q("0"), q("1"), q("1/2")).unwrap());
        let op = CompositeOperator::new(q("0"), k, vec![]).unwrap();
        let cert = an_certificate(&op, &[10, 50], 1e-8).unwrap();
        assert_eq!(cert.alpha, q("0"));
        assert_eq!(cert.rank_f, 0);
        assert!(cert.min_eigenvalue_per_size.iter().all(|&(_, l)| l > 0.0));
    }

    #[test]
    fn deep_dip_is_not_positive() {
        let op = CompositeOperator::new(q("1"), zero_k(), vec![RankOneTerm::new(q("-2"), e(1))]).unwrap();
        match an_certificate(&op, &[5], 1e-8) {
            Err(ClassifyError::NotPositive { size, eigenvalue }) => {
                assert_eq!(size, 5);
                assert!((eigenvalue + 1.0).abs() < 1e-12);
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn support_beyond_sizes_is_still_checked() {
        let op = CompositeOperator::new(q("1"), zero_k(), vec![RankOneTerm::new(q("-3"), e(40))]).unwrap();
        assert!(matches!(
            an_certificate(&op, &[10], 1e-8),
            Err(ClassifyError::NotPositive { size: 40, .. })
        ));
    }

    #[test]
    fn exact_rank_sees_cancellation() {
        let u = BTreeMap::from([(1, q("1")), (2, q("2"))]);
        let v = BTreeMap::from([(2, q("1")), (3, q("-1"))]);
        let op = CompositeOperator::new(
            q("2"),
            zero_k(),
            vec![
                RankOneTerm::new(q("1/3"), u.clone()),
                RankOneTerm::new(q("-1/3"), u),
                RankOneTerm::new(q("1/5"), v),
            ],
        )
        .unwrap();
        assert_eq!(op.rank_f(), 1);
        assert_eq!(op.entry(2, 3), q("-1/5"));
        assert_eq!(op.entry(3, 3), q("11/5"));
    }

    #[test]
    fn invalid_composites() {
        let k = SequenceSpec::uniform(Strand::exact(q("1")).unwrap());
        assert!(matches!(CompositeOperator::new(q("1"), k, vec![]), Err(ClassifyError::InvalidComposite(_))));
        assert!(matches!(
            CompositeOperator::new(q("-1"), zero_k(), vec![]),
            Err(ClassifyError::InvalidComposite(_))
        ));
        assert!(matches!(
            CompositeOperator::new(q("1"), zero_k(), vec![RankOneTerm::new(q("1"), e(0))]),
            Err(ClassifyError::InvalidComposite(_))
        ));
        let op = CompositeOperator::new(q("1"), zero_k(), vec![]).unwrap();
        assert!(matches!(an_certificate(&op, &[], 1e-8), Err(ClassifyError::NotApplicable(_))));
    }
}
