//! Machine-readable reports. Field order is fixed by the struct definitions
//! and rationals serialize as `"p/q"`, so rendering a parsed report
//! reproduces it byte for byte.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::classify::{AnVerdict, Certificate, NotAnReason, Witness};
use crate::rational::Rational;
use crate::seqmodel::{BelowThreshold, SequenceSpec};
use crate::shiftapp::{BelowAlphaIndices, ShiftBranch, ShiftConditionReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    An,
    NotAn,
    /// Composite operator failed the positivity check; no verdict.
    NotPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub verdict: VerdictKind,
    pub alpha: Option<Rational>,
    pub reason: Option<ReasonReport>,
    pub conditions: Option<ConditionsReport>,
    pub witness: Option<WitnessReport>,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReasonReport {
    MultipleEssentialPoints { points: Vec<Rational> },
    InfinitelyManyBelowAlpha { alpha: Rational, strand_index: usize },
}

impl From<&NotAnReason> for ReasonReport {
    fn from(reason: &NotAnReason) -> Self {
        match reason {
            NotAnReason::MultipleEssentialPoints { points } => {
                ReasonReport::MultipleEssentialPoints { points: points.iter().cloned().collect() }
            }
            NotAnReason::InfinitelyManyBelowAlpha { alpha, strand_index } => {
                ReasonReport::InfinitelyManyBelowAlpha { alpha: alpha.clone(), strand_index: *strand_index }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BelowReport {
    Finite { values: Vec<Rational> },
    Infinite { strand_index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BelowIndicesReport {
    Finite { indices: Vec<usize> },
    Infinite { strand_index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum ConditionsReport {
    /// Diagonal operators: the two spectral conditions.
    Spectral {
        essential_spectrum: Vec<Rational>,
        single_essential_point: bool,
        below_alpha: Option<BelowReport>,
    },
    InfiniteSpectrum {
        i: bool,
        ii: Option<bool>,
        iii: Option<bool>,
        alpha: Option<Rational>,
        limit_points: Vec<Rational>,
        violating_values: Vec<Rational>,
        below_alpha_indices: Option<BelowIndicesReport>,
    },
    FiniteSpectrum {
        i_prime: bool,
        ii_prime: bool,
        sigma: Vec<Rational>,
        infinite_multiplicity_values: Vec<Rational>,
    },
    Composite {
        is_positive: bool,
        rank_f: usize,
        min_eigenvalue_per_size: Vec<(usize, f64)>,
    },
}

impl ConditionsReport {
    pub fn spectral(seq: &SequenceSpec) -> Self {
        let points = seq.essential_spectrum();
        let single = points.len() == 1;
        let below_alpha = points.first().filter(|_| single).map(|alpha| match seq.spectrum_elements_below(alpha) {
            BelowThreshold::Finite { values } => BelowReport::Finite { values: values.into_iter().collect() },
            BelowThreshold::Infinite { strand_index } => BelowReport::Infinite { strand_index },
        });
        ConditionsReport::Spectral {
            essential_spectrum: points.into_iter().collect(),
            single_essential_point: single,
            below_alpha,
        }
    }

    pub fn from_shift(report: &ShiftConditionReport) -> Self {
        let list = |s: &BTreeSet<Rational>| s.iter().cloned().collect::<Vec<_>>();
        match &report.branch {
            ShiftBranch::InfiniteSpectrum { i, ii, iii, alpha, violating_values, below_alpha_indices, limit_points } => {
                ConditionsReport::InfiniteSpectrum {
                    i: *i,
                    ii: *ii,
                    iii: *iii,
                    alpha: alpha.clone(),
                    limit_points: list(limit_points),
                    violating_values: list(violating_values),
                    below_alpha_indices: below_alpha_indices.as_ref().map(|b| match b {
                        BelowAlphaIndices::Finite { indices } => {
                            BelowIndicesReport::Finite { indices: indices.iter().copied().collect() }
                        }
                        BelowAlphaIndices::Infinite { strand_index } => {
                            BelowIndicesReport::Infinite { strand_index: *strand_index }
                        }
                    }),
                }
            }
            ShiftBranch::FiniteSpectrum { i_prime, ii_prime, sigma, infinite_multiplicity_values } => {
                ConditionsReport::FiniteSpectrum {
                    i_prime: *i_prime,
                    ii_prime: *ii_prime,
                    sigma: list(sigma),
                    infinite_multiplicity_values: list(infinite_multiplicity_values),
                }
            }
        }
    }

    pub fn from_certificate(cert: &Certificate) -> Self {
        ConditionsReport::Composite {
            is_positive: cert.is_positive,
            rank_f: cert.rank_f,
            min_eigenvalue_per_size: cert.min_eigenvalue_per_size.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub k: usize,
    pub a_index: usize,
    pub b_index: usize,
    pub v: Rational,
    pub u: Rational,
    pub mu: Rational,
    pub t_squared: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessReport {
    Coordinate {
        strand_index: usize,
        excluded_indices: Vec<usize>,
        sup: Rational,
        indices: Vec<usize>,
        predicted_norms: Vec<Rational>,
    },
    MixedPairs {
        a_strand: usize,
        b_strand: usize,
        a: Rational,
        b: Rational,
        excluded_indices: Vec<usize>,
        sup: Rational,
        pairs: Vec<PairReport>,
        predicted_norms: Vec<Rational>,
    },
}

impl WitnessReport {
    /// Describes the witness and its first `count` vectors.
    pub fn new(seq: &SequenceSpec, witness: &Witness, count: usize) -> Self {
        let predicted_norms = witness.predicted_norms(seq, count);
        match witness {
            Witness::Coordinate(w) => WitnessReport::Coordinate {
                strand_index: w.strand_index,
                excluded_indices: w.excluded_indices.iter().copied().collect(),
                sup: w.sup.clone(),
                indices: seq.strand_occurrences(w.strand_index).take(count).map(|(_, n, _)| n).collect(),
                predicted_norms,
            },
            Witness::MixedPairs(w) => WitnessReport::MixedPairs {
                a_strand: w.a_strand,
                b_strand: w.b_strand,
                a: w.a.clone(),
                b: w.b.clone(),
                excluded_indices: w.excluded_indices.iter().copied().collect(),
                sup: w.b.clone(),
                pairs: w
                    .pairs(seq)
                    .take(count)
                    .map(|p| PairReport {
                        k: p.k,
                        a_index: p.a_index,
                        b_index: p.b_index,
                        t_squared: p.t_squared(),
                        v: p.v,
                        u: p.u,
                        mu: p.mu,
                    })
                    .collect(),
                predicted_norms,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub size: Option<usize>,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckReport {
    pub fn new(name: &str, size: Option<usize>, passed: bool, detail: impl Into<String>) -> Self {
        CheckReport {
            name: name.to_string(),
            size,
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        }
    }

    pub fn skip(name: &str, size: Option<usize>, detail: impl Into<String>) -> Self {
        CheckReport { name: name.to_string(), size, status: CheckStatus::Skip, detail: detail.into() }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// Fills verdict, alpha, reason and witness from a diagonal verdict.
pub fn verdict_fields(
    seq: &SequenceSpec,
    verdict: &AnVerdict,
    witness_count: usize,
) -> (VerdictKind, Option<Rational>, Option<ReasonReport>, Option<WitnessReport>) {
    match verdict {
        AnVerdict::IsAn { alpha, .. } => (VerdictKind::An, Some(alpha.clone()), None, None),
        AnVerdict::NotAn { reason, witness } => (
            VerdictKind::NotAn,
            verdict.alpha().cloned(),
            Some(ReasonReport::from(reason)),
            Some(WitnessReport::new(seq, witness, witness_count)),
        ),
    }
}
