//! JSON instance documents.
//!
//! ```json
//! {"p":3,"f":1,"a":["9"],"b":["3"],"c":["1"],
//!  "filt":[{"type":"F0","k1":1,"k2":2,"x1":"0","x2":0,"x2p":0}]}
//! ```
//!
//! Optional sections: `raw_filtration` (generator data for `normalize`) and
//! `monodromy` (scalars keyed by position, e.g. `{"12":"2"}`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{format_scalar, parse_scalar, Scalar, ScalarParseError};
use crate::monodromy::{MonodromyError, Position};
use crate::normalform::{RawEmbedding, RawFiltration};
use crate::phimodule::{EmbeddingFiltration, FrobeniusData, ModelError, PhiModule};
use crate::tauvec::TauVector;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Scalar { field: String, source: ScalarParseError },
    #[error("{field} has {got} entries, expected {expected}")]
    Length { field: String, got: usize, expected: usize },
    #[error("{field} must be 0 or 1, got {got}")]
    BadBit { field: String, got: u8 },
    #[error("document has no `{0}` section")]
    Missing(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Position(#[from] MonodromyError),
}

/// A scalar written as a JSON string ("n/d") or a plain integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Int(i64),
    Text(String),
}

impl ScalarText {
    fn parse(&self, field: &str) -> Result<Scalar, InstanceError> {
        match self {
            ScalarText::Int(n) => Ok(Scalar::from_integer((*n).into())),
            ScalarText::Text(t) => {
                parse_scalar(t).map_err(|source| InstanceError::Scalar { field: field.to_string(), source })
            }
        }
    }
}

impl From<&Scalar> for ScalarText {
    fn from(s: &Scalar) -> Self {
        ScalarText::Text(format_scalar(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum FiltrationDoc {
    F0 { k1: u32, k2: u32, x1: ScalarText, x2: u8, x2p: u8 },
    F1 { k: u32, x2: u8, x2p: u8 },
    F2 { k: u32, x1: u8, x2pp: u8 },
    F3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEmbeddingDoc {
    pub k1: u32,
    pub k2: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<ScalarText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<ScalarText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ScalarText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<ScalarText>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub p: u64,
    pub f: usize,
    pub a: Vec<ScalarText>,
    pub b: Vec<ScalarText>,
    pub c: Vec<ScalarText>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filt: Vec<FiltrationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_filtration: Option<Vec<RawEmbeddingDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<BTreeMap<String, ScalarText>>,
}

fn bit(b: u8, field: String) -> Result<bool, InstanceError> {
    match b {
        0 => Ok(false),
        1 => Ok(true),
        got => Err(InstanceError::BadBit { field, got }),
    }
}

fn check_len(field: &str, got: usize, expected: usize) -> Result<(), InstanceError> {
    if got != expected {
        return Err(InstanceError::Length { field: field.to_string(), got, expected });
    }
    Ok(())
}

fn vector(field: &str, xs: &[ScalarText], f: usize) -> Result<TauVector, InstanceError> {
    check_len(field, xs.len(), f)?;
    let coords = xs.iter().enumerate().map(|(i, x)| x.parse(&format!("{field}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    TauVector::new(coords).map_err(|_| InstanceError::Model(ModelError::ZeroRank))
}

fn vec3(field: &str, xs: &[ScalarText]) -> Result<[Scalar; 3], InstanceError> {
    check_len(field, xs.len(), 3)?;
    let v = xs.iter().enumerate().map(|(i, x)| x.parse(&format!("{field}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    Ok(v.try_into().expect("length checked"))
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn frobenius(&self) -> Result<FrobeniusData, InstanceError> {
        if self.f == 0 {
            return Err(ModelError::ZeroRank.into());
        }
        let a = vector("a", &self.a, self.f)?;
        let b = vector("b", &self.b, self.f)?;
        let c = vector("c", &self.c, self.f)?;
        Ok(FrobeniusData::new(self.p, a, b, c)?)
    }

    pub fn module(&self) -> Result<PhiModule, InstanceError> {
        let fro = self.frobenius()?;
        if self.filt.is_empty() {
            return Err(InstanceError::Missing("filt"));
        }
        check_len("filt", self.filt.len(), self.f)?;
        let filt = self
            .filt
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let field = |name: &str| format!("filt[{i}].{name}");
                Ok(match e {
                    FiltrationDoc::F0 { k1, k2, x1, x2, x2p } => EmbeddingFiltration::F0 {
                        k1: *k1,
                        k2: *k2,
                        x1: x1.parse(&field("x1"))?,
                        x2: bit(*x2, field("x2"))?,
                        x2p: bit(*x2p, field("x2p"))?,
                    },
                    FiltrationDoc::F1 { k, x2, x2p } => {
                        EmbeddingFiltration::F1 { k: *k, x2: bit(*x2, field("x2"))?, x2p: bit(*x2p, field("x2p"))? }
                    }
                    FiltrationDoc::F2 { k, x1, x2pp } => {
                        EmbeddingFiltration::F2 { k: *k, x1: bit(*x1, field("x1"))?, x2pp: bit(*x2pp, field("x2pp"))? }
                    }
                    FiltrationDoc::F3 => EmbeddingFiltration::F3,
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Ok(PhiModule::new(fro, filt)?)
    }

    pub fn raw(&self) -> Result<RawFiltration, InstanceError> {
        let raw = self.raw_filtration.as_ref().ok_or(InstanceError::Missing("raw_filtration"))?;
        check_len("raw_filtration", raw.len(), self.f)?;
        raw.iter()
            .enumerate()
            .map(|(i, r)| {
                let field = |name: &str| format!("raw_filtration[{i}].{name}");
                let opt3 = |x: &Option<Vec<ScalarText>>, name: &str| x.as_ref().map(|v| vec3(&field(name), v)).transpose();
                let line = match (&r.lambda, &r.mu) {
                    (Some(l), Some(m)) => Some((l.parse(&field("lambda"))?, m.parse(&field("mu"))?)),
                    (None, None) => None,
                    _ => return Err(InstanceError::Missing("lambda and mu together")),
                };
                Ok(RawEmbedding { k1: r.k1, k2: r.k2, u: opt3(&r.u, "u")?, v: opt3(&r.v, "v")?, line })
            })
            .collect()
    }

    pub fn monodromy_entries(&self) -> Result<BTreeMap<Position, Scalar>, InstanceError> {
        let m = self.monodromy.as_ref().ok_or(InstanceError::Missing("monodromy"))?;
        parse_entries(m)
    }

    pub fn from_frobenius(fro: &FrobeniusData) -> Self {
        let v = |k: usize| fro.eigen(k).coords().iter().map(ScalarText::from).collect();
        InstanceDocument {
            p: fro.p(),
            f: fro.f(),
            a: v(0),
            b: v(1),
            c: v(2),
            filt: vec![],
            raw_filtration: None,
            monodromy: None,
        }
    }

    pub fn from_module(m: &PhiModule) -> Self {
        let b = |x: bool| x as u8;
        let mut doc = Self::from_frobenius(m.frobenius());
        doc.filt = m
            .filtrations()
            .iter()
            .map(|e| match e {
                EmbeddingFiltration::F0 { k1, k2, x1, x2, x2p } => {
                    FiltrationDoc::F0 { k1: *k1, k2: *k2, x1: x1.into(), x2: b(*x2), x2p: b(*x2p) }
                }
                EmbeddingFiltration::F1 { k, x2, x2p } => FiltrationDoc::F1 { k: *k, x2: b(*x2), x2p: b(*x2p) },
                EmbeddingFiltration::F2 { k, x1, x2pp } => FiltrationDoc::F2 { k: *k, x1: b(*x1), x2pp: b(*x2pp) },
                EmbeddingFiltration::F3 => FiltrationDoc::F3,
            })
            .collect();
        doc
    }

    pub fn with_raw(mut self, raw: &RawFiltration) -> Self {
        let v3 = |x: &Option<[Scalar; 3]>| x.as_ref().map(|v| v.iter().map(ScalarText::from).collect());
        self.raw_filtration = Some(
            raw.iter()
                .map(|r| RawEmbeddingDoc {
                    k1: r.k1,
                    k2: r.k2,
                    u: v3(&r.u),
                    v: v3(&r.v),
                    lambda: r.line.as_ref().map(|(l, _)| l.into()),
                    mu: r.line.as_ref().map(|(_, m)| m.into()),
                })
                .collect(),
        );
        self
    }
}

/// Parses `{"12": "2", "23": "1/3"}`.
pub fn parse_entries(m: &BTreeMap<String, ScalarText>) -> Result<BTreeMap<Position, Scalar>, InstanceError> {
    m.iter().map(|(k, v)| Ok((k.parse::<Position>()?, v.parse(&format!("monodromy.{k}"))?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{frac, int};

    const GOLDEN: &str = r#"{"p":3,"f":1,"a":["9"],"b":["3"],"c":["1"],
        "filt":[{"type":"F0","k1":1,"k2":2,"x1":"0","x2":0,"x2p":0}]}"#;

    #[test]
    fn parse_golden() {
        let doc = InstanceDocument::from_json(GOLDEN).unwrap();
        let m = doc.module().unwrap();
        assert_eq!(m.filtration(0), &EmbeddingFiltration::F0 { k1: 1, k2: 2, x1: int(0), x2: false, x2p: false });
        assert_eq!(InstanceDocument::from_module(&m), doc);
    }

    #[test]
    fn serialization_is_sorted_and_compact() {
        let doc = InstanceDocument::from_json(GOLDEN).unwrap();
        let text = serde_json::to_string(&doc.to_value()).unwrap();
        assert_eq!(
            text,
            r#"{"a":["9"],"b":["3"],"c":["1"],"f":1,"filt":[{"k1":1,"k2":2,"type":"F0","x1":"0","x2":0,"x2p":0}],"p":3}"#
        );
    }

    #[test]
    fn integers_and_reduction() {
        let doc = InstanceDocument::from_json(
            r#"{"p":5,"f":2,"a":[2,"4/6"],"b":["1","3"],"c":["7","1"],"filt":[{"type":"F3"},{"type":"F1","k":2,"x2":1,"x2p":0}]}"#,
        )
        .unwrap();
        let m = doc.module().unwrap();
        assert_eq!(m.frobenius().eigen(0).get(1), &frac(2, 3));
        let back = InstanceDocument::from_module(&m);
        assert_eq!(back.a, vec![ScalarText::Text("2".into()), ScalarText::Text("2/3".into())]);
    }

    #[test]
    fn rejections() {
        let bad = |s: &str| InstanceDocument::from_json(s).and_then(|d| d.module()).unwrap_err().to_string();
        assert!(bad(r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["1"],"filt":[{"type":"F3"}]}"#).contains("coincide"));
        assert!(bad(r#"{"p":3,"f":2,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#).contains("entries"));
        assert!(bad(r#"{"p":3,"f":1,"a":["1/0"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#).contains("zero denominator"));
        assert!(bad(r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F1","k":1,"x2":2,"x2p":0}]}"#).contains("0 or 1"));
        assert!(bad(r#"{"p":9,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F3"}]}"#).contains("odd prime"));
        assert!(bad(r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"filt":[{"type":"F7"}]}"#).contains("JSON"));
        assert!(bad(r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],"extra":1,"filt":[{"type":"F3"}]}"#).contains("JSON"));
    }

    #[test]
    fn raw_and_monodromy_sections() {
        let doc = InstanceDocument::from_json(
            r#"{"p":3,"f":1,"a":["1"],"b":["3"],"c":["9"],
               "raw_filtration":[{"k1":1,"k2":2,"u":["1","2","3"],"v":[0,1,4],"lambda":"1","mu":"1"}],
               "monodromy":{"12":"2","23":"1/3"}}"#,
        )
        .unwrap();
        let raw = doc.raw().unwrap();
        assert_eq!(raw[0].u.as_ref().unwrap()[2], int(3));
        let e = doc.monodromy_entries().unwrap();
        assert_eq!(e.len(), 2);
        assert!(doc.module().is_err());
        let again = InstanceDocument::from_frobenius(&doc.frobenius().unwrap()).with_raw(&raw);
        assert_eq!(again.raw().unwrap(), raw);
    }
}
