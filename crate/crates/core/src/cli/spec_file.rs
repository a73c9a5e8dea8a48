//! Operator description files.
//!
//! ```json
//! {"kind": "diagonal",
//!  "strands": [{"limit": "1", "approach": "above", "amplitude": "1", "ratio": "1/2"}],
//!  "overrides": {"2": "10"}}
//! ```
//!
//! `kind` is `diagonal`, `shift` (adds `phases`: index -> radians) or
//! `composite` (`alpha`, `k_diag` with strands/overrides, `f_terms`: list of
//! `{coef, vector}`). Rationals are `"p/q"` strings or JSON integers.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer};

use crate::classify::{CompositeOperator, RankOneTerm};
use crate::rational::Rational;
use crate::seqmodel::{Approach, SequenceSpec, Strand};
use crate::shiftapp::WeightedShift;

use super::CliError;

/// A parsed and validated operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Diagonal(SequenceSpec),
    Shift(WeightedShift),
    Composite(CompositeOperator),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Diagonal(_) => "diagonal",
            Model::Shift(_) => "shift",
            Model::Composite(_) => "composite",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecFile {
    Diagonal(DiagonalFile),
    Shift(ShiftFile),
    Composite(CompositeFile),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrandFile {
    limit: Rational,
    approach: Approach,
    amplitude: Option<Rational>,
    ratio: Option<Rational>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagonalFile {
    strands: Vec<StrandFile>,
    #[serde(default, deserialize_with = "indexed_map")]
    overrides: BTreeMap<usize, Rational>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftFile {
    strands: Vec<StrandFile>,
    #[serde(default, deserialize_with = "indexed_map")]
    overrides: BTreeMap<usize, Rational>,
    #[serde(default, deserialize_with = "indexed_map")]
    phases: BTreeMap<usize, Angle>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompositeFile {
    alpha: Rational,
    k_diag: DiagonalFile,
    #[serde(default)]
    f_terms: Vec<FTermFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FTermFile {
    coef: Rational,
    #[serde(deserialize_with = "indexed_map")]
    vector: BTreeMap<usize, Rational>,
}

/// Radians, as a decimal string or a JSON number.
#[derive(Debug, Clone, Copy)]
struct Angle(f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let value = match Repr::deserialize(deserializer)? {
            Repr::Num(x) => x,
            Repr::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| de::Error::custom(format!("invalid angle `{s}`")))?,
        };
        if !value.is_finite() {
            return Err(de::Error::custom("angle must be finite"));
        }
        Ok(Angle(value))
    }
}

/// JSON object keyed by positive decimal indices; repeated indices (including
/// spellings like `"1"` and `"01"`) are rejected.
fn indexed_map<'de, D, V>(deserializer: D) -> Result<BTreeMap<usize, V>, D::Error>
where
    D: Deserializer<'de>,
    V: Deserialize<'de>,
{
    struct IndexedMap<V>(PhantomData<V>);

    impl<'de, V: Deserialize<'de>> Visitor<'de> for IndexedMap<V> {
        type Value = BTreeMap<usize, V>;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("an object keyed by positive indices")
        }

        fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
            let mut out = BTreeMap::new();
            while let Some((key, value)) = access.next_entry::<String, V>()? {
                let index: usize = key
                    .trim()
                    .parse()
                    .map_err(|_| de::Error::custom(format!("invalid index `{key}`")))?;
                if index == 0 {
                    return Err(de::Error::custom("indices start at 1"));
                }
                if out.insert(index, value).is_some() {
                    return Err(de::Error::custom(format!("duplicate index {index}")));
                }
            }
            Ok(out)
        }
    }

    deserializer.deserialize_map(IndexedMap(PhantomData))
}

fn build_sequence(strands: Vec<StrandFile>, overrides: BTreeMap<usize, Rational>) -> Result<SequenceSpec, CliError> {
    let invalid = |e: crate::seqmodel::ModelError| CliError::InvalidSpec(e.to_string());
    let strands = strands
        .into_iter()
        .enumerate()
        .map(|(j, s)| Strand::at_position(j, s.limit, s.approach, s.amplitude, s.ratio))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    SequenceSpec::new(strands, overrides).map_err(invalid)
}

/// Parses and validates an operator description.
pub fn parse_spec_str(text: &str) -> Result<Model, CliError> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| CliError::InvalidSpec(e.to_string()))?;
    Ok(match file {
        SpecFile::Diagonal(d) => Model::Diagonal(build_sequence(d.strands, d.overrides)?),
        SpecFile::Shift(s) => {
            let moduli = build_sequence(s.strands, s.overrides)?;
            let phases = s.phases.into_iter().map(|(n, a)| (n, a.0)).collect();
            Model::Shift(WeightedShift::new(moduli, phases).map_err(|e| CliError::InvalidSpec(e.to_string()))?)
        }
        SpecFile::Composite(c) => {
            let k_diag = build_sequence(c.k_diag.strands, c.k_diag.overrides)?;
            let terms = c.f_terms.into_iter().map(|t| RankOneTerm::new(t.coef, t.vector)).collect();
            Model::Composite(
                CompositeOperator::new(c.alpha, k_diag, terms).map_err(|e| CliError::InvalidSpec(e.to_string()))?,
            )
        }
    })
}

pub fn parse_spec(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_spec_str(&text)
}
