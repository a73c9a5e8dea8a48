//! Weighted shifts `T(x1, x2, ...) = (0, w1 x1, w2 x2, ...)`.
//!
//! `|T| = (T*T)^{1/2}` is the diagonal operator with entries `|w_n|`, and `T`
//! is absolutely norm attaining iff `|T|` is. Besides running the diagonal
//! classifier on `|T|`, this module evaluates the two direct conditions on
//! the moduli sequence:
//!
//! * infinitely many distinct moduli: (i) the moduli have a unique limit point
//!   `alpha`, (ii) no other value is taken infinitely often, (iii) only
//!   finitely many moduli lie below `alpha`;
//! * finitely many distinct moduli: (i') the value set is finite, (ii')
//!   exactly one value is taken infinitely often.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::classify::{classify_an, AnVerdict};
use crate::rational::Rational;
use crate::seqmodel::{Approach, SequenceSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShiftError {
    #[error("phase indices start at 1")]
    PhaseIndexZero,
    #[error("phase at index {index} is not a finite angle")]
    NonFinitePhase { index: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedShift {
    moduli: SequenceSpec,
    phases: BTreeMap<usize, f64>,
}

impl WeightedShift {
    pub fn new(moduli: SequenceSpec, phases: BTreeMap<usize, f64>) -> Result<Self, ShiftError> {
        for (&index, angle) in &phases {
            if index == 0 {
                return Err(ShiftError::PhaseIndexZero);
            }
            if !angle.is_finite() {
                return Err(ShiftError::NonFinitePhase { index });
            }
        }
        Ok(WeightedShift { moduli, phases })
    }

    pub fn real(moduli: SequenceSpec) -> Self {
        WeightedShift { moduli, phases: BTreeMap::new() }
    }

    pub fn moduli(&self) -> &SequenceSpec {
        &self.moduli
    }

    pub fn phases(&self) -> &BTreeMap<usize, f64> {
        &self.phases
    }

    pub fn phase(&self, n: usize) -> f64 {
        self.phases.get(&n).copied().unwrap_or(0.0)
    }

    /// `w_n = |w_n| e^{i theta_n}` as `(re, im)`.
    pub fn weight(&self, n: usize) -> (f64, f64) {
        let r = self.moduli.entry(n).to_f64();
        let theta = self.phase(n);
        (r * theta.cos(), r * theta.sin())
    }
}

/// Diagonal symbol of `|T|`; phases drop out.
pub fn modulus(shift: &WeightedShift) -> SequenceSpec {
    shift.moduli.clone()
}

/// Moduli below `alpha`, counted by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BelowAlphaIndices {
    Finite { indices: BTreeSet<usize> },
    Infinite { strand_index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftBranch {
    /// Some strand is geometric, so infinitely many distinct moduli occur.
    InfiniteSpectrum {
        i: bool,
        /// `None` when (i) fails: there is no unique limit point to compare
        /// against, and (ii)/(iii) are not evaluated.
        ii: Option<bool>,
        iii: Option<bool>,
        alpha: Option<Rational>,
        /// Values other than `alpha` taken infinitely often.
        violating_values: BTreeSet<Rational>,
        below_alpha_indices: Option<BelowAlphaIndices>,
        /// Limit points of the moduli set.
        limit_points: BTreeSet<Rational>,
    },
    /// Every strand is constant: the moduli take finitely many values.
    FiniteSpectrum {
        i_prime: bool,
        ii_prime: bool,
        sigma: BTreeSet<Rational>,
        infinite_multiplicity_values: BTreeSet<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftConditionReport {
    pub branch: ShiftBranch,
    pub verdict: bool,
}

impl ShiftConditionReport {
    pub fn alpha(&self) -> Option<&Rational> {
        match &self.branch {
            ShiftBranch::InfiniteSpectrum { alpha, .. } => alpha.as_ref(),
            ShiftBranch::FiniteSpectrum { infinite_multiplicity_values, ii_prime, .. } => {
                if *ii_prime {
                    infinite_multiplicity_values.first()
                } else {
                    None
                }
            }
        }
    }
}

/// Evaluates the direct shift conditions on the moduli.
pub fn shift_conditions(shift: &WeightedShift) -> ShiftConditionReport {
    let seq = &shift.moduli;
    let strands = seq.strands();
    let exact_limits: BTreeSet<Rational> = strands
        .iter()
        .filter(|s| s.approach() == Approach::Exact)
        .map(|s| s.limit().clone())
        .collect();

    if !seq.has_geometric_strand() {
        let mut sigma = exact_limits.clone();
        sigma.extend(seq.overrides().values().cloned());
        let i_prime = true;
        let ii_prime = exact_limits.len() == 1;
        return ShiftConditionReport {
            verdict: i_prime && ii_prime,
            branch: ShiftBranch::FiniteSpectrum {
                i_prime,
                ii_prime,
                sigma,
                infinite_multiplicity_values: exact_limits,
            },
        };
    }

    let limit_points: BTreeSet<Rational> =
        strands.iter().filter(|s| s.is_geometric()).map(|s| s.limit().clone()).collect();
    let i = limit_points.len() == 1;
    if !i {
        return ShiftConditionReport {
            verdict: false,
            branch: ShiftBranch::InfiniteSpectrum {
                i,
                ii: None,
                iii: None,
                alpha: None,
                violating_values: BTreeSet::new(),
                below_alpha_indices: None,
                limit_points,
            },
        };
    }
    let alpha = limit_points.first().expect("singleton").clone();

    // geometric strands never repeat a value; overrides are finite
    let violating_values: BTreeSet<Rational> = exact_limits.iter().filter(|l| **l != alpha).cloned().collect();
    let ii = violating_values.is_empty();

    let infinite_below = strands.iter().position(|s| match s.approach() {
        Approach::Below => s.limit() <= &alpha,
        Approach::Exact | Approach::Above => s.limit() < &alpha,
    });
    let below_alpha_indices = match infinite_below {
        Some(strand_index) => BelowAlphaIndices::Infinite { strand_index },
        None => BelowAlphaIndices::Finite {
            indices: seq.overrides().iter().filter(|(_, v)| **v < alpha).map(|(&n, _)| n).collect(),
        },
    };
    let iii = matches!(below_alpha_indices, BelowAlphaIndices::Finite { .. });

    ShiftConditionReport {
        verdict: i && ii && iii,
        branch: ShiftBranch::InfiniteSpectrum {
            i,
            ii: Some(ii),
            iii: Some(iii),
            alpha: Some(alpha),
            violating_values,
            below_alpha_indices: Some(below_alpha_indices),
            limit_points,
        },
    }
}

/// Direct conditions plus the diagonal classifier applied to `|T|`.
pub fn classify_shift(shift: &WeightedShift) -> (ShiftConditionReport, AnVerdict) {
    (shift_conditions(shift), classify_an(&modulus(shift)))
}
