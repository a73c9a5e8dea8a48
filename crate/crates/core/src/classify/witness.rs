//! Subspaces on which a diagonal operator does not attain its norm.
//!
//! Two constructions, both exactly checkable:
//!
//! * `Coordinate`: the closed span of the coordinate vectors of a strand that
//!   climbs to its limit from below. Restricted to the first `m` of them the
//!   norm is the `m`-th value; the supremum is the limit and no unit vector
//!   reaches it.
//! * `MixedPairs`: when no strand climbs from below there are two distinct
//!   limits `a < b`. Pair an index with value `v_k` near `a` with one of value
//!   `u_k >= b` and mix them as `f_k = e_{a_k} + t_k e_{b_k}` so that
//!   `||T f_k|| / ||f_k|| = mu_k = b - (b - a) / (2k)`. The `f_k` have
//!   disjoint supports, so the norm on `span{f_1..f_m}` is `mu_m`, which
//!   increases to `b` without reaching it.

use std::collections::BTreeSet;

use crate::rational::Rational;
use crate::seqmodel::{Approach, SequenceSpec};

use super::ClassifyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateWitness {
    pub strand_index: usize,
    /// Overridden indices of the strand; they are left out of the span.
    pub excluded_indices: BTreeSet<usize>,
    pub sup: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedPairsWitness {
    /// Strand supplying `a_k` (limit `a`).
    pub a_strand: usize,
    /// Strand supplying `b_k` (limit `b`).
    pub b_strand: usize,
    pub a: Rational,
    pub b: Rational,
    /// Overridden indices of either strand.
    pub excluded_indices: BTreeSet<usize>,
}

/// The k-th pair of a mixed witness (k starts at 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedPair {
    pub k: usize,
    pub a_index: usize,
    pub v: Rational,
    pub b_index: usize,
    pub u: Rational,
    pub mu: Rational,
}

impl MixedPair {
    /// `t_k^2 = (mu^2 - v^2) / (u^2 - mu^2)`; `t_k` itself is irrational in
    /// general.
    pub fn t_squared(&self) -> Rational {
        let mu2 = self.mu.square();
        (&mu2 - self.v.square()) / (self.u.square() - &mu2)
    }

    pub fn t(&self) -> f64 {
        self.t_squared().to_f64().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Coordinate(CoordinateWitness),
    MixedPairs(MixedPairsWitness),
}

impl MixedPairsWitness {
    /// `mu_k = b - (b - a) / (2k)` for k >= 1: starts at the midpoint and
    /// increases to `b`.
    pub fn mu(&self, k: usize) -> Rational {
        assert!(k >= 1, "pairs are numbered from 1");
        let denom = Rational::from_integer(2 * k as i64);
        &self.b - (&self.b - &self.a) / denom
    }

    pub fn midpoint(&self) -> Rational {
        (&self.a + &self.b) / Rational::from_integer(2)
    }

    pub fn pairs<'a>(&'a self, seq: &'a SequenceSpec) -> impl Iterator<Item = MixedPair> + 'a {
        let mid = self.midpoint();
        let lows = seq.strand_occurrences(self.a_strand).filter(move |(_, _, v)| v < &mid);
        let highs = seq.strand_occurrences(self.b_strand);
        lows.zip(highs).enumerate().map(move |(i, ((_, a_index, v), (_, b_index, u)))| {
            let k = i + 1;
            MixedPair { k, a_index, v, b_index, u, mu: self.mu(k) }
        })
    }
}

impl Witness {
    pub fn sup(&self) -> &Rational {
        match self {
            Witness::Coordinate(w) => &w.sup,
            Witness::MixedPairs(w) => &w.b,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Witness::Coordinate(_) => "coordinate",
            Witness::MixedPairs(_) => "mixed_pairs",
        }
    }

    /// Exact norm of the operator on the span of the first `m` witness
    /// vectors, for m = 1..=count.
    pub fn predicted_norms(&self, seq: &SequenceSpec, count: usize) -> Vec<Rational> {
        match self {
            Witness::Coordinate(w) => {
                seq.strand_occurrences(w.strand_index).take(count).map(|(_, _, v)| v).collect()
            }
            Witness::MixedPairs(w) => (1..=count).map(|k| w.mu(k)).collect(),
        }
    }

    /// First `count` spanning vectors as sparse `(index, coefficient)` lists.
    pub fn basis_vectors(&self, seq: &SequenceSpec, count: usize) -> Vec<Vec<(usize, f64)>> {
        match self {
            Witness::Coordinate(w) => seq
                .strand_occurrences(w.strand_index)
                .take(count)
                .map(|(_, n, _)| vec![(n, 1.0)])
                .collect(),
            Witness::MixedPairs(w) => w
                .pairs(seq)
                .take(count)
                .map(|p| vec![(p.a_index, 1.0), (p.b_index, p.t())])
                .collect(),
        }
    }

    /// Largest coordinate index touched by the first `count` vectors.
    pub fn max_index(&self, seq: &SequenceSpec, count: usize) -> usize {
        self.basis_vectors(seq, count)
            .iter()
            .flat_map(|v| v.iter().map(|&(n, _)| n))
            .max()
            .unwrap_or(0)
    }
}

/// Builds a non-attainment witness for a diagonal operator that is not AN.
pub fn build_witness(seq: &SequenceSpec) -> Result<Witness, ClassifyError> {
    if classify_an_is_an(seq) {
        return Err(ClassifyError::NotApplicable(
            "operator is absolutely norm attaining; no witness exists".into(),
        ));
    }
    let strands = seq.strands();
    let overridden_on = |j: usize| -> BTreeSet<usize> {
        let m = seq.strand_count();
        seq.overrides().keys().copied().filter(|n| (n - 1) % m == j).collect()
    };

    // highest limit among strands approached from below; ties go to the first
    let below = strands
        .iter()
        .enumerate()
        .filter(|(_, s)| s.approach() == Approach::Below)
        .fold(None::<(usize, &Rational)>, |best, (j, s)| match best {
            Some((_, l)) if l >= s.limit() => best,
            _ => Some((j, s.limit())),
        });
    if let Some((j, limit)) = below {
        return Ok(Witness::Coordinate(CoordinateWitness {
            strand_index: j,
            excluded_indices: overridden_on(j),
            sup: limit.clone(),
        }));
    }

    let first_with = |limit: &Rational| strands.iter().position(|s| s.limit() == limit).expect("limit of some strand");
    let points = seq.essential_spectrum();
    let a = points.first().expect("nonempty").clone();
    let b = points.last().expect("nonempty").clone();
    debug_assert!(a < b, "non-AN without a below strand has two limits");
    let (a_strand, b_strand) = (first_with(&a), first_with(&b));
    let mut excluded_indices = overridden_on(a_strand);
    excluded_indices.extend(overridden_on(b_strand));
    Ok(Witness::MixedPairs(MixedPairsWitness { a_strand, b_strand, a, b, excluded_indices }))
}

fn classify_an_is_an(seq: &SequenceSpec) -> bool {
    // same test as classify_an without building the verdict
    let points = seq.essential_spectrum();
    points.len() == 1 && !seq.has_below_strand()
}
