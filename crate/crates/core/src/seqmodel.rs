//! Exact models of positive diagonal operators.
//!
//! An infinite nonnegative sequence is described by a nonempty list of
//! strands, interleaved round-robin, plus finitely many overridden entries.
//! With `m` strands, index `n >= 1` belongs to strand `(n - 1) mod m` as its
//! occurrence `(n - 1) div m`. A strand is either constant (`Exact`) or a
//! geometric approach `L - A r^k` / `L + A r^k` to its limit `L`.
//!
//! Every spectral question the classifier asks (limit points, which values are
//! taken infinitely often, how many spectrum points sit below a threshold) is
//! decided exactly on this representation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("at least one strand is required")]
    NoStrands,
    #[error("strand {strand}: limit must be nonnegative")]
    NegativeLimit { strand: usize },
    #[error("strand {strand}: geometric strand requires amplitude and ratio")]
    MissingGeometry { strand: usize },
    #[error("strand {strand}: exact strand takes no amplitude or ratio")]
    UnexpectedGeometry { strand: usize },
    #[error("strand {strand}: amplitude must be positive")]
    AmplitudeNotPositive { strand: usize },
    #[error("strand {strand}: ratio must lie in (0,1)")]
    RatioOutOfRange { strand: usize },
    #[error("strand {strand}: below strand needs limit - amplitude >= 0")]
    BelowGoesNegative { strand: usize },
    #[error("override indices start at 1")]
    OverrideIndexZero,
    #[error("override at index {index} must be nonnegative")]
    NegativeOverride { index: usize },
    #[error("duplicate override index {index}")]
    DuplicateOverride { index: usize },
}

/// How a strand reaches its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Below,
    Exact,
    Above,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Below => "below",
            Approach::Exact => "exact",
            Approach::Above => "above",
        })
    }
}

/// One interleaved subsequence: constant, or geometric with ratio in (0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Strand {
    limit: Rational,
    approach: Approach,
    geometry: Option<(Rational, Rational)>,
}

impl Strand {
    /// Like [`Strand::new`], with `strand` as the position reported in errors.
    pub fn at_position(
        strand: usize,
        limit: Rational,
        approach: Approach,
        amplitude: Option<Rational>,
        ratio: Option<Rational>,
    ) -> Result<Self, ModelError> {
        if limit.is_negative() {
            return Err(ModelError::NegativeLimit { strand });
        }
        let geometry = match (approach, amplitude, ratio) {
            (Approach::Exact, None, None) => None,
            (Approach::Exact, _, _) => return Err(ModelError::UnexpectedGeometry { strand }),
            (_, Some(a), Some(r)) => {
                if !a.is_positive() {
                    return Err(ModelError::AmplitudeNotPositive { strand });
                }
                if !r.is_positive() || r >= Rational::one() {
                    return Err(ModelError::RatioOutOfRange { strand });
                }
                if approach == Approach::Below && (&limit - &a).is_negative() {
                    return Err(ModelError::BelowGoesNegative { strand });
                }
                Some((a, r))
            }
            _ => return Err(ModelError::MissingGeometry { strand }),
        };
        Ok(Strand { limit, approach, geometry })
    }

    pub fn new(
        limit: Rational,
        approach: Approach,
        amplitude: Option<Rational>,
        ratio: Option<Rational>,
    ) -> Result<Self, ModelError> {
        Self::at_position(0, limit, approach, amplitude, ratio)
    }

    pub fn exact(limit: Rational) -> Result<Self, ModelError> {
        Self::new(limit, Approach::Exact, None, None)
    }

    pub fn above(limit: Rational, amplitude: Rational, ratio: Rational) -> Result<Self, ModelError> {
        Self::new(limit, Approach::Above, Some(amplitude), Some(ratio))
    }

    pub fn below(limit: Rational, amplitude: Rational, ratio: Rational) -> Result<Self, ModelError> {
        Self::new(limit, Approach::Below, Some(amplitude), Some(ratio))
    }

    pub fn limit(&self) -> &Rational {
        &self.limit
    }

    pub fn approach(&self) -> Approach {
        self.approach
    }

    pub fn amplitude(&self) -> Option<&Rational> {
        self.geometry.as_ref().map(|(a, _)| a)
    }

    pub fn ratio(&self) -> Option<&Rational> {
        self.geometry.as_ref().map(|(_, r)| r)
    }

    pub fn is_geometric(&self) -> bool {
        self.geometry.is_some()
    }

    /// `A r^k`, or zero for an exact strand.
    pub fn offset(&self, k: usize) -> Rational {
        match &self.geometry {
            None => Rational::zero(),
            Some((a, r)) => a * r.pow(exponent(k)),
        }
    }

    /// The k-th value of the strand (k >= 0).
    pub fn value(&self, k: usize) -> Rational {
        self.value_from_offset(self.offset(k))
    }

    fn value_from_offset(&self, offset: Rational) -> Rational {
        match self.approach {
            Approach::Below => &self.limit - offset,
            Approach::Exact => self.limit.clone(),
            Approach::Above => &self.limit + offset,
        }
    }

    /// Values for k = 0, 1, 2, ... computed incrementally.
    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        self.offsets().map(move |off| self.value_from_offset(off))
    }

    /// `A r^k` for k = 0, 1, 2, ... (all zero for an exact strand).
    pub fn offsets(&self) -> impl Iterator<Item = Rational> + '_ {
        let (start, ratio) = match &self.geometry {
            None => (Rational::zero(), Rational::one()),
            Some((a, r)) => (a.clone(), r.clone()),
        };
        std::iter::successors(Some(start), move |prev| Some(prev * &ratio))
    }

    /// `(k, A r^k)` for k = start, start + 1, ...
    pub fn offsets_from(&self, start: usize) -> impl Iterator<Item = (usize, Rational)> + '_ {
        let first = self.offset(start);
        let ratio = self.ratio().cloned().unwrap_or_else(Rational::one);
        std::iter::successors(Some((start, first)), move |(k, prev)| Some((k + 1, prev * &ratio)))
    }

    /// A safe starting exponent for scans that stop once `A r^k < target`:
    /// an exponent `k0` with `A r^k0 >= target`, close to the last such one.
    /// Zero for exact strands or when the estimate cannot be confirmed.
    pub fn first_offset_at_least(&self, target: &Rational) -> usize {
        let (Some((a, r)), Some(ln_t)) = (&self.geometry, target.ln_approx()) else {
            return 0;
        };
        let (Some(ln_a), Some(ln_r)) = (a.ln_approx(), r.ln_approx()) else {
            return 0;
        };
        // A r^k >= t  <=>  k <= (ln t - ln A) / ln r
        let estimate = ((ln_t - ln_a) / ln_r).floor() - 2.0;
        if estimate.is_nan() || estimate < 1.0 || estimate > u32::MAX as f64 {
            return 0;
        }
        let k0 = estimate as usize;
        if &self.offset(k0) >= target {
            k0
        } else {
            0
        }
    }

    /// The same strand with its limit moved by `-shift`. Fails if the result
    /// would leave the nonnegative model.
    pub fn shifted_down(&self, shift: &Rational) -> Result<Self, ModelError> {
        let (a, r) = match &self.geometry {
            None => (None, None),
            Some((a, r)) => (Some(a.clone()), Some(r.clone())),
        };
        Strand::new(&self.limit - shift, self.approach, a, r)
    }
}

fn exponent(k: usize) -> u32 {
    u32::try_from(k).expect("strand occurrence exceeds u32 range")
}

/// Finitely described infinite nonnegative sequence: round-robin strands plus
/// finite overrides. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSpec {
    strands: Vec<Strand>,
    overrides: BTreeMap<usize, Rational>,
}

/// Spectrum elements strictly below a threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BelowThreshold {
    Finite { values: BTreeSet<Rational> },
    /// The strand certifies infinitely many entries (or an essential
    /// spectrum point) below the threshold.
    Infinite { strand_index: usize },
}

impl BelowThreshold {
    pub fn is_finite(&self) -> bool {
        matches!(self, BelowThreshold::Finite { .. })
    }
}

impl SequenceSpec {
    pub fn new(strands: Vec<Strand>, overrides: BTreeMap<usize, Rational>) -> Result<Self, ModelError> {
        if strands.is_empty() {
            return Err(ModelError::NoStrands);
        }
        for (&index, value) in &overrides {
            if index == 0 {
                return Err(ModelError::OverrideIndexZero);
            }
            if value.is_negative() {
                return Err(ModelError::NegativeOverride { index });
            }
        }
        // re-check strands so indices in diagnostics are meaningful
        let strands = strands
            .into_iter()
            .enumerate()
            .map(|(j, s)| {
                let (a, r) = match s.geometry {
                    None => (None, None),
                    Some((a, r)) => (Some(a), Some(r)),
                };
                Strand::at_position(j, s.limit, s.approach, a, r)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SequenceSpec { strands, overrides })
    }

    /// Like [`SequenceSpec::new`], rejecting repeated override indices.
    pub fn from_pairs<I>(strands: Vec<Strand>, overrides: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (index, value) in overrides {
            if map.insert(index, value).is_some() {
                return Err(ModelError::DuplicateOverride { index });
            }
        }
        Self::new(strands, map)
    }

    pub fn uniform(strand: Strand) -> Self {
        SequenceSpec { strands: vec![strand], overrides: BTreeMap::new() }
    }

    /// Same strands, different overrides.
    pub fn with_overrides(&self, overrides: BTreeMap<usize, Rational>) -> Result<Self, ModelError> {
        Self::new(self.strands.clone(), overrides)
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn overrides(&self) -> &BTreeMap<usize, Rational> {
        &self.overrides
    }

    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }

    pub fn is_overridden(&self, n: usize) -> bool {
        self.overrides.contains_key(&n)
    }

    /// `(strand, occurrence)` that owns index `n` when not overridden.
    pub fn locate(&self, n: usize) -> (usize, usize) {
        assert!(n >= 1, "indices start at 1");
        let m = self.strands.len();
        ((n - 1) % m, (n - 1) / m)
    }

    /// Index of occurrence `k` of strand `j`.
    pub fn index_of(&self, strand: usize, k: usize) -> usize {
        k * self.strands.len() + strand + 1
    }

    /// The n-th diagonal entry (n >= 1).
    pub fn entry(&self, n: usize) -> Rational {
        if let Some(v) = self.overrides.get(&n) {
            return v.clone();
        }
        let (j, k) = self.locate(n);
        self.strands[j].value(k)
    }

    /// Entries 1..=count, computed incrementally along each strand.
    pub fn entries(&self, count: usize) -> Vec<Rational> {
        let m = self.strands.len();
        let mut iters: Vec<_> = self.strands.iter().map(|s| s.values()).collect();
        (1..=count)
            .map(|n| {
                let v = iters[(n - 1) % m].next().expect("strand values are infinite");
                self.overrides.get(&n).cloned().unwrap_or(v)
            })
            .collect()
    }

    /// `(occurrence, index, value)` for the non-overridden occurrences of a strand.
    pub fn strand_occurrences(&self, strand: usize) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.strands[strand]
            .values()
            .enumerate()
            .map(move |(k, v)| (k, self.index_of(strand, k), v))
            .filter(move |(_, n, _)| !self.is_overridden(*n))
    }

    /// Points of the essential spectrum: every strand limit, deduplicated.
    /// Overrides never contribute.
    pub fn essential_spectrum(&self) -> BTreeSet<Rational> {
        self.strands.iter().map(|s| s.limit.clone()).collect()
    }

    pub fn has_below_strand(&self) -> bool {
        self.strands.iter().any(|s| s.approach == Approach::Below)
    }

    pub fn has_geometric_strand(&self) -> bool {
        self.strands.iter().any(Strand::is_geometric)
    }

    /// Whether `x` lies in the spectrum, i.e. the closure of the entry set.
    pub fn spectrum_contains(&self, x: &Rational) -> bool {
        if x.is_negative() {
            return false;
        }
        if self.strands.iter().any(|s| &s.limit == x) || self.overrides.values().any(|v| v == x) {
            return true;
        }
        self.strands.iter().enumerate().any(|(j, s)| {
            let gap = match s.approach {
                Approach::Exact => return false,
                Approach::Above if x > &s.limit => x - &s.limit,
                Approach::Below if x < &s.limit => &s.limit - x,
                _ => return false,
            };
            let start = s.first_offset_at_least(&gap);
            // offsets are strictly decreasing; stop once they pass below the gap
            s.offsets_from(start)
                .take_while(|(_, off)| off >= &gap)
                .any(|(k, off)| off == gap && !self.is_overridden(self.index_of(j, k)))
        })
    }

    /// Classifies the set of spectrum elements strictly below `threshold`.
    ///
    /// An exact strand with limit below the threshold is reported as
    /// `Infinite` for that strand: it contributes a single value, but that
    /// value is an essential spectrum point.
    pub fn spectrum_elements_below(&self, threshold: &Rational) -> BelowThreshold {
        let mut values = BTreeSet::new();
        for (j, s) in self.strands.iter().enumerate() {
            match s.approach {
                Approach::Below if &s.limit <= threshold => {
                    return BelowThreshold::Infinite { strand_index: j }
                }
                Approach::Above | Approach::Exact if &s.limit < threshold => {
                    return BelowThreshold::Infinite { strand_index: j }
                }
                Approach::Below => {
                    let margin = &s.limit - threshold;
                    for (k, off) in s.offsets().enumerate().take_while(|(_, off)| off > &margin) {
                        if !self.is_overridden(self.index_of(j, k)) {
                            values.insert(&s.limit - off);
                        }
                    }
                }
                Approach::Above | Approach::Exact => {}
            }
        }
        values.extend(self.overrides.values().filter(|v| *v < threshold).cloned());
        BelowThreshold::Finite { values }
    }

    /// An upper bound for all entries (the operator norm of the diagonal).
    pub fn sup_bound(&self) -> Rational {
        let strand_max = self
            .strands
            .iter()
            .map(|s| match s.approach {
                Approach::Above => &s.limit + s.offset(0),
                _ => s.limit.clone(),
            })
            .max()
            .expect("nonempty strands");
        self.overrides.values().cloned().fold(strand_max, Rational::max)
    }
}
