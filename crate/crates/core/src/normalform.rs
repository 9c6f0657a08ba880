//! Explicit filtration subspaces for normal forms, and reduction of raw
//! per-embedding generator data to normal form.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::Scalar;
use crate::linalg::{rank, span_eq};
use crate::phimodule::{bit, EmbeddingFiltration, FrobeniusData, ModelError, PhiModule};
use crate::tauvec::TauVector;

pub type Vec3 = [Scalar; 3];

/// One step of a decreasing filtration: `Fil^j` is spanned by `gens` for
/// `start <= j` up to the next step's start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationStep {
    pub start: i64,
    pub gens: Vec<Vec<Scalar>>,
}

fn unit(k: usize) -> Vec<Scalar> {
    (0..3).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect()
}

fn full() -> Vec<Vec<Scalar>> {
    (0..3).map(unit).collect()
}

/// Steps `(start, generators)` with strictly increasing starts; the last step
/// is the zero space.
pub fn embedding_subspaces(e: &EmbeddingFiltration) -> Vec<FiltrationStep> {
    let plane = |x2: &Scalar, x2p: &Scalar| {
        vec![
            vec![Scalar::one(), Scalar::zero(), x2.clone()],
            vec![Scalar::zero(), Scalar::one(), x2p.clone()],
        ]
    };
    let line = |x1: &Scalar, x2pp: &Scalar| vec![vec![Scalar::one(), x1.clone(), x2pp.clone()]];
    let step = |start: u32, gens| FiltrationStep { start: start as i64, gens };
    match e {
        EmbeddingFiltration::F0 { k1, k2, x1, x2, x2p } => vec![
            step(0, full()),
            step(1, plane(&bit(*x2), &bit(*x2p))),
            step(k1 + 1, line(x1, &e.x2pp().expect("F0"))),
            step(k2 + 1, vec![]),
        ],
        EmbeddingFiltration::F1 { k, x2, x2p } => {
            vec![step(0, full()), step(1, plane(&bit(*x2), &bit(*x2p))), step(k + 1, vec![])]
        }
        EmbeddingFiltration::F2 { k, x1, x2pp } => {
            vec![step(0, full()), step(1, line(&bit(*x1), &bit(*x2pp))), step(k + 1, vec![])]
        }
        EmbeddingFiltration::F3 => vec![step(0, full()), step(1, vec![])],
    }
}

pub fn filtration_subspaces(m: &PhiModule, i: usize) -> Vec<FiltrationStep> {
    embedding_subspaces(m.filtration(i))
}

/// Generator data for one embedding. Weights are `{0, k1, k2}` with
/// `k1 <= k2`; the plane `span(u, v)` is `Fil^1..Fil^{k1}` and the line
/// `lambda*u + mu*v` is `Fil^{k1+1}..Fil^{k2}`. When `k1 = 0 < k2` the plane
/// is only the ambient space used to name the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEmbedding {
    pub k1: u32,
    pub k2: u32,
    pub u: Option<Vec3>,
    pub v: Option<Vec3>,
    pub line: Option<(Scalar, Scalar)>,
}

impl RawEmbedding {
    pub fn has_plane(&self) -> bool {
        self.k1 >= 1
    }

    pub fn has_line(&self) -> bool {
        self.k2 > self.k1
    }

    fn validate(&self, index: usize) -> Result<(), NormalFormError> {
        let bad = |reason: &str| Err(NormalFormError::DegenerateInput { index, reason: reason.to_string() });
        if self.k1 > self.k2 {
            return bad("k1 > k2");
        }
        if self.k2 >= 1 {
            let (Some(u), Some(v)) = (&self.u, &self.v) else {
                return bad("plane generators u, v required");
            };
            if rank(&[u.to_vec(), v.to_vec()]) != 2 {
                return bad("u and v are linearly dependent");
            }
        }
        if self.has_line() {
            match &self.line {
                None => return bad("line coefficients required"),
                Some((l, m)) if l.is_zero() && m.is_zero() => return bad("line coefficients are both zero"),
                _ => {}
            }
        }
        Ok(())
    }

    fn line_vector(&self) -> Vec3 {
        let (l, m) = self.line.clone().expect("line");
        let (u, v) = (self.u.as_ref().expect("u"), self.v.as_ref().expect("v"));
        std::array::from_fn(|k| &l * &u[k] + &m * &v[k])
    }

    /// The explicit steps in the same shape as [`embedding_subspaces`].
    pub fn subspaces(&self) -> Vec<FiltrationStep> {
        let mut steps = vec![FiltrationStep { start: 0, gens: full() }];
        if self.has_plane() {
            let (u, v) = (self.u.as_ref().expect("u"), self.v.as_ref().expect("v"));
            steps.push(FiltrationStep { start: 1, gens: vec![u.to_vec(), v.to_vec()] });
        }
        if self.has_line() {
            steps.push(FiltrationStep { start: self.k1 as i64 + 1, gens: vec![self.line_vector().to_vec()] });
        }
        if self.k2 >= 1 {
            steps.push(FiltrationStep { start: self.k2 as i64 + 1, gens: vec![] });
        }
        if steps.len() == 1 {
            steps.push(FiltrationStep { start: 1, gens: vec![] });
        }
        steps
    }
}

pub type RawFiltration = Vec<RawEmbedding>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error("embedding {index}: degenerate input: {reason}")]
    DegenerateInput { index: usize, reason: String },
    #[error("{got} raw embeddings for f = {f}")]
    LengthMismatch { got: usize, f: usize },
    #[error("no global basis permutation brings the filtration to normal form")]
    NotRepresentable,
    #[error("normalized module is invalid: {0}")]
    Model(#[from] ModelError),
}

/// Basis permutations in search order: identity, transpositions, 3-cycles.
/// The new basis vector `k` is the old basis vector `perm[k]`.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];

/// A normalized module plus the change of basis producing it: new basis
/// vector k at embedding i is `rescaling[k](i) * e_{permutation[k]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub module: PhiModule,
    pub permutation: [usize; 3],
    pub rescaling: [TauVector; 3],
}

impl Normalized {
    /// Old-basis coordinates of a vector given in the new basis at embedding i.
    pub fn to_original(&self, i: usize, w: &[Scalar]) -> Vec<Scalar> {
        let mut old = vec![Scalar::zero(); 3];
        for k in 0..3 {
            old[self.permutation[k]] = &w[k] * self.rescaling[k].get(i);
        }
        old
    }
}

fn permuted(x: &Vec3, perm: &[usize; 3]) -> Vec3 {
    std::array::from_fn(|k| x[perm[k]].clone())
}

fn or_one(x: Scalar) -> Scalar {
    if x.is_zero() {
        Scalar::one()
    } else {
        x
    }
}

/// Reduces one embedding under a fixed permutation. Returns the normal form
/// and the diagonal rescaling, or `None` if a pivot vanishes.
fn reduce_embedding(raw: &RawEmbedding, perm: &[usize; 3]) -> Option<(EmbeddingFiltration, Vec3)> {
    let one = Scalar::one;
    if raw.k2 == 0 {
        return Some((EmbeddingFiltration::F3, [one(), one(), one()]));
    }
    let u = permuted(raw.u.as_ref()?, perm);
    let v = permuted(raw.v.as_ref()?, perm);
    if !raw.has_plane() {
        let l = permuted(&raw.line_vector(), perm);
        if l[0].is_zero() {
            return None;
        }
        let x1 = &l[1] / &l[0];
        let x2pp = &l[2] / &l[0];
        let d = [one(), or_one(x1.clone()), or_one(x2pp.clone())];
        let e = EmbeddingFiltration::F2 { k: raw.k2, x1: !x1.is_zero(), x2pp: !x2pp.is_zero() };
        return Some((e, d));
    }
    let det = &u[0] * &v[1] - &u[1] * &v[0];
    if det.is_zero() {
        return None;
    }
    let y2 = (&u[2] * &v[1] - &u[1] * &v[2]) / &det;
    let y2p = (&u[0] * &v[2] - &v[0] * &u[2]) / &det;
    // e2 absorbs y2' first, then e0 absorbs what is left of y2.
    let d2 = or_one(y2p.clone());
    let d0 = if y2.is_zero() { one() } else { &d2 / &y2 };
    let d = [d0, one(), d2];
    let x2 = !y2.is_zero();
    let x2p = !y2p.is_zero();
    if !raw.has_line() {
        return Some((EmbeddingFiltration::F1 { k: raw.k1, x2, x2p }, d));
    }
    let l = permuted(&raw.line_vector(), perm);
    if l[0].is_zero() {
        return None;
    }
    let x1 = &l[1] / &l[0] * &d[0] / &d[1];
    Some((EmbeddingFiltration::F0 { k1: raw.k1, k2: raw.k2, x1, x2, x2p }, d))
}

fn try_permutation(fro: &FrobeniusData, raw: &RawFiltration, perm: [usize; 3]) -> Option<Normalized> {
    let f = fro.f();
    let mut filt = Vec::with_capacity(f);
    let mut scales: [Vec<Scalar>; 3] = Default::default();
    for r in raw {
        let (e, d) = reduce_embedding(r, &perm)?;
        filt.push(e);
        for (k, dk) in d.into_iter().enumerate() {
            scales[k].push(dk);
        }
    }
    let rescaling: [TauVector; 3] = scales.map(|s| TauVector::new(s).expect("f >= 1"));
    // phi(d_k e_{perm k}) = phi(d_k) p_{perm k} e_{perm k}, so the new
    // eigenvector is p_{perm k}(i) d_k(i+1) / d_k(i).
    let eigen: [TauVector; 3] = std::array::from_fn(|k| {
        let p = fro.eigen(perm[k]);
        let d = &rescaling[k];
        TauVector::new((0..f).map(|i| p.get(i) * d.get((i + 1) % f) / d.get(i)).collect()).expect("f >= 1")
    });
    let [a, b, c] = eigen;
    let fro2 = FrobeniusData::new(fro.p(), a, b, c).ok()?;
    let module = PhiModule::new(fro2, filt).ok()?;
    Some(Normalized { module, permutation: perm, rescaling })
}

/// True iff the normalized filtration, mapped back to the original basis,
/// spans the raw subspaces at every embedding and every step.
pub fn matches_raw(n: &Normalized, raw: &RawFiltration) -> bool {
    raw.iter().enumerate().all(|(i, r)| {
        let ours = filtration_subspaces(&n.module, i);
        let theirs = r.subspaces();
        ours.len() == theirs.len()
            && ours.iter().zip(&theirs).all(|(a, b)| {
                let mapped: Vec<Vec<Scalar>> = a.gens.iter().map(|g| n.to_original(i, g)).collect();
                a.start == b.start && span_eq(&mapped, &b.gens)
            })
    })
}

pub fn validate_raw(fro: &FrobeniusData, raw: &RawFiltration) -> Result<(), NormalFormError> {
    if raw.len() != fro.f() {
        return Err(NormalFormError::LengthMismatch { got: raw.len(), f: fro.f() });
    }
    raw.iter().enumerate().try_for_each(|(i, r)| r.validate(i))
}

/// Searches the six basis permutations in order and returns the first
/// normal form whose subspaces reproduce the raw ones.
pub fn normalize(fro: &FrobeniusData, raw: &RawFiltration) -> Result<Normalized, NormalFormError> {
    validate_raw(fro, raw)?;
    for perm in PERMUTATIONS {
        if let Some(n) = try_permutation(fro, raw, perm) {
            if matches_raw(&n, raw) {
                return Ok(n);
            }
        }
    }
    Err(NormalFormError::NotRepresentable)
}

fn unit_vector(k: usize) -> Vec<Scalar> {
    (0..3).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect()
}

/// Exhaustive check, independent of the pivot formulas: some permutation
/// makes every plane complementary to its last basis line and every line
/// complementary to its last two basis vectors.
pub fn oracle_representable(raw: &RawFiltration) -> bool {
    PERMUTATIONS.iter().any(|perm| {
        raw.iter().all(|r| {
            if r.k2 == 0 {
                return true;
            }
            let plane_ok = !r.has_plane() || {
                let (u, v) = (r.u.as_ref().expect("u"), r.v.as_ref().expect("v"));
                rank(&[u.to_vec(), v.to_vec(), unit_vector(perm[2])]) == 3
            };
            let line_ok = !r.has_line()
                || rank(&[r.line_vector().to_vec(), unit_vector(perm[1]), unit_vector(perm[2])]) == 3;
            plane_ok && line_ok
        })
    })
}

/// Raw generator data describing the filtration of a normal-form module.
pub fn module_to_raw(m: &PhiModule) -> RawFiltration {
    let one = Scalar::one;
    let zero = Scalar::zero;
    m.filtrations()
        .iter()
        .map(|e| match e {
            EmbeddingFiltration::F0 { k1, k2, x1, x2, x2p } => RawEmbedding {
                k1: *k1,
                k2: *k2,
                u: Some([one(), zero(), bit(*x2)]),
                v: Some([zero(), one(), bit(*x2p)]),
                line: Some((one(), x1.clone())),
            },
            EmbeddingFiltration::F1 { k, x2, x2p } => RawEmbedding {
                k1: *k,
                k2: *k,
                u: Some([one(), zero(), bit(*x2)]),
                v: Some([zero(), one(), bit(*x2p)]),
                line: None,
            },
            EmbeddingFiltration::F2 { k, x1, x2pp } => RawEmbedding {
                k1: 0,
                k2: *k,
                u: Some([one(), bit(*x1), bit(*x2pp)]),
                v: Some([zero(), one(), zero()]),
                line: Some((one(), zero())),
            },
            EmbeddingFiltration::F3 => RawEmbedding { k1: 0, k2: 0, u: None, v: None, line: None },
        })
        .collect()
}
