//! The decision procedure for positive diagonal operators.
//!
//! A positive operator `T` is absolutely norm attaining iff its essential
//! spectrum is a single point `alpha` and `sigma(T)` has only finitely many
//! elements below `alpha`. On the strand model that reads: every strand has
//! the same limit and none approaches it from below.
//!
//! Positive verdicts carry the split `T = alpha I + K+ + F` with `K+`
//! positive compact and `F` the (finite) part of the diagonal below `alpha`.
//! Negative verdicts carry a [`Witness`]: a subspace on which the supremum of
//! `||Tx||` over unit vectors is not attained.

mod composite;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::numlab::NumError;
use crate::rational::Rational;
use crate::seqmodel::{BelowThreshold, ModelError, SequenceSpec};

pub use composite::{an_certificate, Certificate, CompositeOperator, RankOneTerm};
pub use witness::{build_witness, CoordinateWitness, MixedPair, MixedPairsWitness, Witness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    InvalidSpec(#[from] ModelError),
    #[error("invalid composite operator: {0}")]
    InvalidComposite(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("composite operator is not positive: eigenvalue {eigenvalue:e} at truncation size {size}")]
    NotPositive { size: usize, eigenvalue: f64 },
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// Why an operator fails to be absolutely norm attaining.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotAnReason {
    MultipleEssentialPoints { points: BTreeSet<Rational> },
    InfinitelyManyBelowAlpha { alpha: Rational, strand_index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnVerdict {
    IsAn { alpha: Rational, decomposition: Decomposition },
    NotAn { reason: NotAnReason, witness: Witness },
}

impl AnVerdict {
    pub fn is_an(&self) -> bool {
        matches!(self, AnVerdict::IsAn { .. })
    }

    pub fn alpha(&self) -> Option<&Rational> {
        match self {
            AnVerdict::IsAn { alpha, .. } => Some(alpha),
            AnVerdict::NotAn { reason: NotAnReason::InfinitelyManyBelowAlpha { alpha, .. }, .. } => Some(alpha),
            AnVerdict::NotAn { .. } => None,
        }
    }
}

/// `T = alpha I + K+ + F` for a diagonal model.
///
/// `K+` is kept as a sequence model of its own: the strands of `T` moved down
/// by `alpha` (so every limit is 0), with the overridden entries shifted the
/// same way and zeroed where `F` takes over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    alpha: Rational,
    kplus: SequenceSpec,
    f_entries: BTreeMap<usize, Rational>,
}

impl Decomposition {
    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    /// Diagonal model of the positive compact part.
    pub fn kplus(&self) -> &SequenceSpec {
        &self.kplus
    }

    pub fn kplus_entry(&self, n: usize) -> Rational {
        self.kplus.entry(n)
    }

    /// Diagonal of `F`; every value is negative.
    pub fn f_entries(&self) -> &BTreeMap<usize, Rational> {
        &self.f_entries
    }

    pub fn f_entry(&self, n: usize) -> Rational {
        self.f_entries.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn rank_f(&self) -> usize {
        self.f_entries.len()
    }

    /// `alpha + K+(n) + F(n)`.
    pub fn reassemble(&self, n: usize) -> Rational {
        &self.alpha + self.kplus_entry(n) + self.f_entry(n)
    }

    /// The same operator as `alpha I + K + sum_n f_n e_n e_n^T`.
    pub fn to_composite(&self) -> CompositeOperator {
        let terms = self
            .f_entries
            .iter()
            .map(|(&n, f)| RankOneTerm::new(f.clone(), BTreeMap::from([(n, Rational::one())])))
            .collect();
        CompositeOperator::new(self.alpha.clone(), self.kplus.clone(), terms)
            .expect("decomposition parts satisfy the composite invariants")
    }
}

/// Decides absolute norm attainment for a positive diagonal operator.
pub fn classify_an(seq: &SequenceSpec) -> AnVerdict {
    let points = seq.essential_spectrum();
    let reason = if points.len() > 1 {
        NotAnReason::MultipleEssentialPoints { points }
    } else {
        let alpha = points.into_iter().next().expect("at least one strand");
        match seq.spectrum_elements_below(&alpha) {
            BelowThreshold::Finite { .. } => {
                let decomposition = decompose(seq, &alpha).expect("preconditions just checked");
                return AnVerdict::IsAn { alpha, decomposition };
            }
            BelowThreshold::Infinite { strand_index } => {
                NotAnReason::InfinitelyManyBelowAlpha { alpha, strand_index }
            }
        }
    };
    let witness = build_witness(seq).expect("operator is not AN");
    AnVerdict::NotAn { reason, witness }
}

/// Splits an AN diagonal operator into `alpha I + K+ + F`.
pub fn decompose(seq: &SequenceSpec, alpha: &Rational) -> Result<Decomposition, ClassifyError> {
    let points = seq.essential_spectrum();
    if points.len() != 1 || points.first() != Some(alpha) {
        return Err(ClassifyError::NotApplicable(format!(
            "essential spectrum is {{{}}}, not {{{alpha}}}",
            join(points.iter())
        )));
    }
    if let BelowThreshold::Infinite { strand_index } = seq.spectrum_elements_below(alpha) {
        return Err(ClassifyError::NotApplicable(format!(
            "strand {strand_index} puts infinitely many spectrum points below {alpha}"
        )));
    }

    let strands = seq
        .strands()
        .iter()
        .map(|s| s.shifted_down(alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let mut f_entries = BTreeMap::new();
    let mut k_overrides = BTreeMap::new();
    for (&n, v) in seq.overrides() {
        let shifted = v - alpha;
        if shifted.is_negative() {
            f_entries.insert(n, shifted);
            k_overrides.insert(n, Rational::zero());
        } else {
            k_overrides.insert(n, shifted);
        }
    }
    let kplus = SequenceSpec::new(strands, k_overrides)?;
    Ok(Decomposition { alpha: alpha.clone(), kplus, f_entries })
}

pub(crate) fn join<'a>(items: impl Iterator<Item = &'a Rational>) -> String {
    items.map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
