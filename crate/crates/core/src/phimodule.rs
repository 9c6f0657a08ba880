//! Rank-3 filtered φ-modules with diagonal Frobenius `diag(a, b, c)` and one
//! normal-form filtration per embedding.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeff::{is_prime, Scalar, Valuation};
use crate::tauvec::{matrix_norm, norm, norm_valuation, TauMatrix, TauVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("f must be at least 1")]
    ZeroRank,
    #[error("eigenvector `{name}` has length {got}, expected f = {f}")]
    LengthMismatch { name: &'static str, got: usize, f: usize },
    #[error("eigenvector `{name}` has a zero coordinate at embedding {index}")]
    ZeroCoordinate { name: &'static str, index: usize },
    #[error("norms of `{0}` and `{1}` coincide")]
    NormsNotDistinct(&'static str, &'static str),
    #[error("{got} filtrations given for f = {f}")]
    FiltrationCount { got: usize, f: usize },
    #[error("embedding {index}: {reason}")]
    BadFiltration { index: usize, reason: String },
    #[error("embedding index {0} out of range")]
    IndexOutOfRange(usize),
}

pub const SLOT_NAMES: [&str; 3] = ["a", "b", "c"];

/// The diagonal Frobenius `diag(a, b, c)` over E^f and the prime p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusData {
    p: u64,
    eigen: [TauVector; 3],
}

impl FrobeniusData {
    pub fn new(p: u64, a: TauVector, b: TauVector, c: TauVector) -> Result<Self, ModelError> {
        if p == 2 || !is_prime(p) {
            return Err(ModelError::BadPrime(p));
        }
        let f = a.f();
        let eigen = [a, b, c];
        for (k, v) in eigen.iter().enumerate() {
            if v.f() != f {
                return Err(ModelError::LengthMismatch { name: SLOT_NAMES[k], got: v.f(), f });
            }
            if let Some(index) = v.coords().iter().position(Zero::is_zero) {
                return Err(ModelError::ZeroCoordinate { name: SLOT_NAMES[k], index });
            }
        }
        let norms: Vec<Scalar> = eigen.iter().map(norm).collect();
        for (x, y) in [(0, 1), (0, 2), (1, 2)] {
            if norms[x] == norms[y] {
                return Err(ModelError::NormsNotDistinct(SLOT_NAMES[x], SLOT_NAMES[y]));
            }
        }
        Ok(FrobeniusData { p, eigen })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.eigen[0].f()
    }

    /// Eigenvector of slot 0 (a), 1 (b) or 2 (c).
    pub fn eigen(&self, slot: usize) -> &TauVector {
        &self.eigen[slot]
    }

    pub fn eigenvectors(&self) -> &[TauVector; 3] {
        &self.eigen
    }

    pub fn norms(&self) -> [Scalar; 3] {
        std::array::from_fn(|k| norm(&self.eigen[k]))
    }

    pub fn norm_valuations(&self) -> [Valuation; 3] {
        std::array::from_fn(|k| norm_valuation(&self.eigen[k], self.p))
    }

    pub fn matrix(&self) -> TauMatrix {
        TauMatrix::diag(self.eigen.clone())
    }
}

/// One embedding's filtration in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingFiltration {
    F0 { k1: u32, k2: u32, x1: Scalar, x2: bool, x2p: bool },
    F1 { k: u32, x2: bool, x2p: bool },
    F2 { k: u32, x1: bool, x2pp: bool },
    F3,
}

impl EmbeddingFiltration {
    pub fn kind(&self) -> FiltrationKind {
        match self {
            EmbeddingFiltration::F0 { .. } => FiltrationKind::F0,
            EmbeddingFiltration::F1 { .. } => FiltrationKind::F1,
            EmbeddingFiltration::F2 { .. } => FiltrationKind::F2,
            EmbeddingFiltration::F3 => FiltrationKind::F3,
        }
    }

    /// `x2 + x1 * x2'` for F0; the stored bit for F2.
    pub fn x2pp(&self) -> Option<Scalar> {
        match self {
            EmbeddingFiltration::F0 { x1, x2, x2p, .. } => Some(bit(*x2) + x1 * bit(*x2p)),
            EmbeddingFiltration::F2 { x2pp, .. } => Some(bit(*x2pp)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            EmbeddingFiltration::F0 { k1, k2, .. } if !(0 < *k1 && k1 < k2) => {
                Err(format!("F0 needs 0 < k1 < k2, got k1 = {k1}, k2 = {k2}"))
            }
            EmbeddingFiltration::F1 { k, .. } | EmbeddingFiltration::F2 { k, .. } if *k == 0 => {
                Err("weight k must be positive".into())
            }
            _ => Ok(()),
        }
    }

    /// Sorted Hodge-Tate weights. A line filtration (F2) has one jump, a plane
    /// filtration (F1) drops dimension by two at its single jump.
    pub fn weights(&self) -> [u32; 3] {
        match *self {
            EmbeddingFiltration::F0 { k1, k2, .. } => [0, k1, k2],
            EmbeddingFiltration::F1 { k, .. } => [0, k, k],
            EmbeddingFiltration::F2 { k, .. } => [0, 0, k],
            EmbeddingFiltration::F3 => [0, 0, 0],
        }
    }
}

pub(crate) fn bit(b: bool) -> Scalar {
    if b {
        Scalar::from_integer(1.into())
    } else {
        Scalar::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FiltrationKind {
    F0,
    F1,
    F2,
    F3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiModule {
    frobenius: FrobeniusData,
    filt: Vec<EmbeddingFiltration>,
}

impl PhiModule {
    pub fn new(frobenius: FrobeniusData, filt: Vec<EmbeddingFiltration>) -> Result<Self, ModelError> {
        if filt.len() != frobenius.f() {
            return Err(ModelError::FiltrationCount { got: filt.len(), f: frobenius.f() });
        }
        for (index, e) in filt.iter().enumerate() {
            e.validate().map_err(|reason| ModelError::BadFiltration { index, reason })?;
        }
        Ok(PhiModule { frobenius, filt })
    }

    pub fn frobenius(&self) -> &FrobeniusData {
        &self.frobenius
    }

    pub fn filtrations(&self) -> &[EmbeddingFiltration] {
        &self.filt
    }

    pub fn filtration(&self, i: usize) -> &EmbeddingFiltration {
        &self.filt[i]
    }

    pub fn f(&self) -> usize {
        self.frobenius.f()
    }

    pub fn p(&self) -> u64 {
        self.frobenius.p()
    }
}

/// The seven nonzero φ-stable submodules: spans of subsets of the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubmoduleId {
    D0,
    D1,
    D2,
    D01,
    D02,
    D12,
    Full,
}

impl SubmoduleId {
    pub const ALL: [SubmoduleId; 7] = [
        SubmoduleId::D0,
        SubmoduleId::D1,
        SubmoduleId::D2,
        SubmoduleId::D01,
        SubmoduleId::D02,
        SubmoduleId::D12,
        SubmoduleId::Full,
    ];

    pub const PROPER: [SubmoduleId; 6] =
        [SubmoduleId::D0, SubmoduleId::D1, SubmoduleId::D2, SubmoduleId::D01, SubmoduleId::D02, SubmoduleId::D12];

    /// Basis indices spanning the submodule.
    pub fn slots(self) -> &'static [usize] {
        match self {
            SubmoduleId::D0 => &[0],
            SubmoduleId::D1 => &[1],
            SubmoduleId::D2 => &[2],
            SubmoduleId::D01 => &[0, 1],
            SubmoduleId::D02 => &[0, 2],
            SubmoduleId::D12 => &[1, 2],
            SubmoduleId::Full => &[0, 1, 2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SubmoduleId::D0 => "D0",
            SubmoduleId::D1 => "D1",
            SubmoduleId::D2 => "D2",
            SubmoduleId::D01 => "D01",
            SubmoduleId::D02 => "D02",
            SubmoduleId::D12 => "D12",
            SubmoduleId::Full => "Full",
        }
    }
}

impl fmt::Display for SubmoduleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn weights(m: &PhiModule, i: usize) -> Result<[u32; 3], ModelError> {
    m.filt.get(i).map(EmbeddingFiltration::weights).ok_or(ModelError::IndexOutOfRange(i))
}

/// Embeddings grouped by filtration type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub i3: Vec<usize>,
    pub trivial: Vec<usize>,
}

pub fn classify_embeddings(m: &PhiModule) -> Classification {
    let mut c = Classification::default();
    for (i, e) in m.filt.iter().enumerate() {
        match e.kind() {
            FiltrationKind::F0 => c.i1.push(i),
            FiltrationKind::F1 => c.i2.push(i),
            FiltrationKind::F2 => c.i3.push(i),
            FiltrationKind::F3 => c.trivial.push(i),
        }
    }
    c
}

/// Sum of the norm valuations of the eigenvectors spanning `s`.
pub fn newton_invariant(m: &PhiModule, s: SubmoduleId) -> Valuation {
    let v = m.frobenius.norm_valuations();
    s.slots().iter().map(|&k| v[k].clone()).sum()
}

/// Per-embedding Hodge invariant of the filtration induced on `s`, read off
/// the case tables for each normal form.
pub fn embedding_hodge(e: &EmbeddingFiltration, s: SubmoduleId) -> u64 {
    use SubmoduleId::*;
    let r = match *e {
        EmbeddingFiltration::F0 { k1, k2, ref x1, x2, x2p } => {
            let x1_zero = x1.is_zero();
            let x2pp_zero = e.x2pp().expect("F0").is_zero();
            match s {
                D0 if x2 => 0,
                D0 if !x1_zero => k1,
                D0 => k2,
                D1 if !x2p => k1,
                D1 => 0,
                D2 => 0,
                D01 if !x2pp_zero => k1,
                D01 if x2p => k2,
                D01 => k1 + k2,
                D02 if !x1_zero => k1,
                D02 => k2,
                D12 => k1,
                Full => k1 + k2,
            }
        }
        EmbeddingFiltration::F1 { k, x2, x2p } => match s {
            D0 if !x2 => k,
            D1 if !x2p => k,
            D0 | D1 | D2 => 0,
            D01 if !x2 && !x2p => 2 * k,
            D01 | D02 | D12 => k,
            Full => 2 * k,
        },
        EmbeddingFiltration::F2 { k, x1, x2pp } => match s {
            D0 if !x1 && !x2pp => k,
            D01 if !x2pp => k,
            D02 if !x1 => k,
            Full => k,
            _ => 0,
        },
        EmbeddingFiltration::F3 => 0,
    };
    r as u64
}

pub fn hodge_invariant(m: &PhiModule, s: SubmoduleId) -> u64 {
    m.filt.iter().map(|e| embedding_hodge(e, s)).sum()
}

/// True iff `Nm(P)` is diagonal with constant entries whose three values are
/// pairwise distinct.
pub fn has_distinct_eigenvalues(pm: &TauMatrix) -> bool {
    let Ok(n) = matrix_norm(pm) else {
        return false;
    };
    let mut diag = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let e = n.get(r, c);
            if r != c {
                if !e.is_zero() {
                    return false;
                }
            } else {
                let first = e.get(0);
                if e.coords().iter().any(|x| x != first) {
                    return false;
                }
                diag.push(first.clone());
            }
        }
    }
    diag[0] != diag[1] && diag[0] != diag[2] && diag[1] != diag[2]
}
