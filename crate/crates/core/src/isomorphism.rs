//! Isomorphism of two modules with diagonal Frobenius.
//!
//! With distinct eigenvalue norms any isomorphism is monomial: `h(e_j) =
//! h_j e_{σ(j)}` for a permutation σ of the eigen-slots. Intertwining the
//! Frobenii forces `h_j(i+1) = h_j(i) p_j(i) / q_{σ(j)}(i)`, so `h_j` is fixed
//! by one scalar `γ_j`; what remains is whether the filtrations let the three
//! scalars be chosen nonzero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{format_scalar, Scalar};
use crate::linalg::{annihilator, null_space, rank, span_eq};
use crate::normalform::{embedding_subspaces, RawEmbedding, RawFiltration};
use crate::phimodule::{bit, EmbeddingFiltration, FrobeniusData, PhiModule};
use crate::tauvec::{norm, TauMatrix, TauVector};

/// A permutation of the eigen-slots: slot j of the source goes to slot
/// `sigma[j]` of the target.
pub type EigenPermutation = [usize; 3];

pub const ALL_PERMUTATIONS: [EigenPermutation; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [2, 0, 1], [1, 2, 0]];

pub fn permutation_name(sigma: &EigenPermutation) -> String {
    const N: [char; 3] = ['a', 'b', 'c'];
    sigma.iter().enumerate().map(|(j, &t)| format!("{}->{}", N[j], N[t])).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("modules live over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("modules have different f ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// The monomial map `h(e_j) = h[j] e_{sigma[j]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub sigma: EigenPermutation,
    pub h: [TauVector; 3],
}

impl IsoWitness {
    pub fn matrix(&self) -> TauMatrix {
        let mut m = TauMatrix::zeros(self.h[0].f());
        for j in 0..3 {
            m.entries[self.sigma[j]][j] = self.h[j].clone();
        }
        m
    }

    /// Target coordinates of the image of `w` at embedding i.
    pub fn apply(&self, i: usize, w: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); 3];
        for j in 0..3 {
            out[self.sigma[j]] = self.h[j].get(i) * &w[j];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoDecision {
    pub isomorphic: bool,
    pub sigma: Option<EigenPermutation>,
    /// Per embedding, the relations the matching forced on the witness.
    pub per_embedding_case: Vec<String>,
    pub witness: Option<IsoWitness>,
}

/// `a * h_u(i) = b * h_v(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    u: usize,
    a: Scalar,
    v: usize,
    b: Scalar,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: &Scalar, j: usize| {
            if c.is_one() {
                format!("h{j}")
            } else {
                format!("{}*h{j}", format_scalar(c))
            }
        };
        write!(f, "{} = {}", term(&self.a, self.u), term(&self.b, self.v))
    }
}

fn rel(u: usize, a: Scalar, v: usize, b: Scalar) -> Relation {
    Relation { u, a, v, b }
}

fn eq(u: usize, v: usize) -> Relation {
    rel(u, Scalar::one(), v, Scalar::one())
}

fn neg(u: usize, v: usize) -> Relation {
    rel(u, Scalar::one(), v, -Scalar::one())
}

/// Per-embedding matching of the source filtration `x` onto the target `y`
/// under σ. `None` when some vanishing condition fails; otherwise the
/// relations tying `t_j = h_j(i)` together.
fn embedding_relations(sigma: &EigenPermutation, x: &EmbeddingFiltration, y: &EmbeddingFiltration) -> Option<Vec<Relation>> {
    use EmbeddingFiltration as E;
    if x.weights() != y.weights() || x.kind() != y.kind() {
        return None;
    }
    let mut r = Vec::new();
    let need = |c: bool| if c { Some(()) } else { None };
    match (x, y) {
        (E::F3, E::F3) => {}
        (E::F0 { x1, x2, x2p, .. }, E::F0 { x1: y1, x2: y2, x2p: y2p, .. }) => {
            let x2pp = x.x2pp()?;
            match sigma {
                [0, 1, 2] => {
                    need(x2 == y2 && x2p == y2p && x1.is_zero() == y1.is_zero())?;
                    if *x2 {
                        r.push(eq(0, 2));
                    }
                    if *x2p {
                        r.push(eq(1, 2));
                    }
                    r.push(rel(0, y1.clone(), 1, x1.clone()));
                }
                [1, 0, 2] => {
                    need(x2 == y2p && x2p == y2 && !x1.is_zero() && !y1.is_zero())?;
                    if *x2 {
                        r.push(eq(0, 2));
                    }
                    if *x2p {
                        r.push(eq(1, 2));
                    }
                    r.push(rel(0, Scalar::one(), 1, x1 * y1));
                }
                [2, 0, 1] => {
                    need(*x2 && *y2p && x2p == y2 && !x1.is_zero())?;
                    r.push(eq(0, 2));
                    if *x2p {
                        r.push(neg(2, 1));
                    }
                    r.push(rel(2, x2pp, 1, x1 * y1));
                }
                [0, 2, 1] => {
                    need(*x2p && *y2p && x2 == y2)?;
                    r.push(eq(1, 2));
                    if *x2 {
                        r.push(neg(2, 0));
                    }
                    r.push(rel(2, x2pp, 0, y1.clone()));
                }
                [2, 1, 0] => {
                    need(*x2 && *y2 && x2p == y2p && !x2pp.is_zero())?;
                    r.push(eq(0, 2));
                    if *x2p {
                        r.push(neg(1, 2));
                    }
                    r.push(rel(1, x1.clone(), 2, y1 * &x2pp));
                }
                [1, 2, 0] => {
                    need(*x2p && *y2 && x2 == y2p && !x2pp.is_zero())?;
                    r.push(eq(1, 2));
                    if *x2 {
                        r.push(neg(0, 2));
                    }
                    r.push(rel(0, Scalar::one(), 2, y1 * &x2pp));
                }
                _ => unreachable!("not a permutation"),
            }
        }
        (E::F1 { x2, x2p, .. }, E::F1 { x2: y2, x2p: y2p, .. }) => match sigma {
            [0, 1, 2] => {
                need(x2 == y2 && x2p == y2p)?;
                if *x2 {
                    r.push(eq(0, 2));
                }
                if *x2p {
                    r.push(eq(1, 2));
                }
            }
            [1, 0, 2] => {
                need(x2 == y2p && x2p == y2)?;
                if *x2 {
                    r.push(eq(0, 2));
                }
                if *x2p {
                    r.push(eq(1, 2));
                }
            }
            [2, 0, 1] => {
                need(*x2 && *y2p && x2p == y2)?;
                r.push(eq(0, 2));
                if *x2p {
                    r.push(neg(2, 1));
                }
            }
            [0, 2, 1] => {
                need(*x2p && *y2p && x2 == y2)?;
                r.push(eq(1, 2));
                if *x2 {
                    r.push(neg(2, 0));
                }
            }
            [2, 1, 0] => {
                need(*x2 && *y2 && x2p == y2p)?;
                r.push(eq(0, 2));
                if *x2p {
                    r.push(neg(1, 2));
                }
            }
            [1, 2, 0] => {
                need(*x2p && *y2 && x2 == y2p)?;
                r.push(eq(1, 2));
                if *x2 {
                    r.push(neg(0, 2));
                }
            }
            _ => unreachable!("not a permutation"),
        },
        (E::F2 { x1, x2pp, .. }, E::F2 { x1: y1, x2pp: y2pp, .. }) => {
            // The image of e0 + x1 e1 + x2'' e2 must be proportional to
            // e0 + y1 e1 + y2'' e2; coordinates are all bits.
            let (pairs, pivot): ([(bool, usize, bool); 2], (bool, usize)) = match sigma {
                [0, 1, 2] => ([(*x1, 1, *y1), (*x2pp, 2, *y2pp)], (true, 0)),
                [1, 0, 2] => ([(true, 0, *y1), (*x2pp, 2, *y2pp)], (*x1, 1)),
                [2, 0, 1] => ([(*x2pp, 2, *y1), (true, 0, *y2pp)], (*x1, 1)),
                [0, 2, 1] => ([(*x2pp, 2, *y1), (*x1, 1, *y2pp)], (true, 0)),
                [2, 1, 0] => ([(*x1, 1, *y1), (true, 0, *y2pp)], (*x2pp, 2)),
                [1, 2, 0] => ([(true, 0, *y1), (*x1, 1, *y2pp)], (*x2pp, 2)),
                _ => unreachable!("not a permutation"),
            };
            let (pivot_bit, pivot_slot) = pivot;
            need(pivot_bit)?;
            for (xb, slot, yb) in pairs {
                need(xb == yb)?;
                if xb {
                    r.push(eq(slot, pivot_slot));
                }
            }
        }
        _ => return None,
    }
    Some(r)
}

/// `r_j(i)`: the monomial entry at embedding i for `γ_j = 1`.
fn entry_profile(m1: &PhiModule, m2: &PhiModule, sigma: &EigenPermutation, j: usize) -> Vec<Scalar> {
    let f = m1.f();
    let p = m1.frobenius().eigen(j);
    let q = m2.frobenius().eigen(sigma[j]);
    let mut r = Vec::with_capacity(f);
    let mut cur = Scalar::one();
    for i in 0..f {
        r.push(cur.clone());
        cur = cur * p.get(i) / q.get(i);
    }
    r
}

pub fn norms_match(m1: &PhiModule, m2: &PhiModule, sigma: &EigenPermutation) -> bool {
    (0..3).all(|j| norm(m1.frobenius().eigen(j)) == norm(m2.frobenius().eigen(sigma[j])))
}

fn check_shape(m1: &PhiModule, m2: &PhiModule) -> Result<(), IsoError> {
    if m1.p() != m2.p() {
        return Err(IsoError::PrimeMismatch(m1.p(), m2.p()));
    }
    if m1.f() != m2.f() {
        return Err(IsoError::RankMismatch(m1.f(), m2.f()));
    }
    Ok(())
}

/// Solves the ratio system on `γ_0, γ_1, γ_2`; `None` if inconsistent or
/// some `γ_j` is forced to zero.
fn solve_ratios(constraints: &[(usize, Scalar, usize, Scalar)]) -> Option<[Scalar; 3]> {
    let mut gamma: [Option<Scalar>; 3] = [None, None, None];
    let active: Vec<_> = constraints.iter().filter(|(_, a, _, b)| !(a.is_zero() && b.is_zero())).collect();
    if active.iter().any(|(_, a, _, b)| a.is_zero() || b.is_zero()) {
        return None;
    }
    for root in 0..3 {
        if gamma[root].is_some() {
            continue;
        }
        gamma[root] = Some(Scalar::one());
        loop {
            let mut changed = false;
            for (u, a, v, b) in &active {
                match (&gamma[*u], &gamma[*v]) {
                    (Some(gu), Some(gv)) => {
                        if a * gu != b * gv {
                            return None;
                        }
                    }
                    (Some(gu), None) => {
                        gamma[*v] = Some(a * gu / b);
                        changed = true;
                    }
                    (None, Some(gv)) => {
                        gamma[*u] = Some(b * gv / a);
                        changed = true;
                    }
                    (None, None) => {}
                }
            }
            if !changed {
                break;
            }
        }
    }
    Some(gamma.map(|g| g.expect("assigned")))
}

fn try_sigma(m1: &PhiModule, m2: &PhiModule, sigma: &EigenPermutation) -> Option<(Vec<String>, IsoWitness)> {
    if !norms_match(m1, m2, sigma) {
        return None;
    }
    let profiles: [Vec<Scalar>; 3] = std::array::from_fn(|j| entry_profile(m1, m2, sigma, j));
    let mut labels = Vec::with_capacity(m1.f());
    let mut constraints = Vec::new();
    for i in 0..m1.f() {
        let rels = embedding_relations(sigma, m1.filtration(i), m2.filtration(i))?;
        let kind = format!("{:?}", m1.filtration(i).kind());
        let shown: Vec<String> =
            rels.iter().filter(|r| !(r.a.is_zero() && r.b.is_zero())).map(ToString::to_string).collect();
        labels.push(if shown.is_empty() { kind } else { format!("{kind}: {}", shown.join("; ")) });
        for r in rels {
            constraints.push((r.u, &r.a * &profiles[r.u][i], r.v, &r.b * &profiles[r.v][i]));
        }
    }
    let gamma = solve_ratios(&constraints)?;
    let h = std::array::from_fn(|j| {
        TauVector::new(profiles[j].iter().map(|r| r * &gamma[j]).collect()).expect("f >= 1")
    });
    Some((labels, IsoWitness { sigma: *sigma, h }))
}

/// Tries every σ whose norms match and reports the first that works.
pub fn are_isomorphic(m1: &PhiModule, m2: &PhiModule) -> Result<IsoDecision, IsoError> {
    check_shape(m1, m2)?;
    for sigma in ALL_PERMUTATIONS {
        if let Some((labels, witness)) = try_sigma(m1, m2, &sigma) {
            return Ok(IsoDecision {
                isomorphic: true,
                sigma: Some(sigma),
                per_embedding_case: labels,
                witness: Some(witness),
            });
        }
    }
    Ok(IsoDecision { isomorphic: false, sigma: None, per_embedding_case: vec![], witness: None })
}

/// A validated witness, `None` when the modules are not isomorphic.
pub fn find_witness(m1: &PhiModule, m2: &PhiModule) -> Result<Option<IsoWitness>, IsoError> {
    let d = are_isomorphic(m1, m2)?;
    match d.witness {
        None => Ok(None),
        Some(w) => {
            validate_witness(m1, m2, &w).map_err(IsoError::Internal)?;
            Ok(Some(w))
        }
    }
}

/// Checks `H P = Q φ(H)` and that H carries every filtration step of `m1`
/// onto the corresponding step of `m2`.
pub fn validate_witness(m1: &PhiModule, m2: &PhiModule, w: &IsoWitness) -> Result<(), String> {
    check_shape(m1, m2).map_err(|e| e.to_string())?;
    let mut seen = [false; 3];
    for &t in &w.sigma {
        if t > 2 || std::mem::replace(&mut seen[t], true) {
            return Err("sigma is not a permutation".into());
        }
    }
    if w.h.iter().any(|h| h.f() != m1.f() || !h.all_nonzero()) {
        return Err("witness entries must have f nonzero coordinates".into());
    }
    let h = w.matrix();
    if h.mul(&m1.frobenius().matrix()) != m2.frobenius().matrix().mul(&h.shift()) {
        return Err("witness does not intertwine the Frobenius matrices".into());
    }
    for i in 0..m1.f() {
        let src = embedding_subspaces(m1.filtration(i));
        let dst = embedding_subspaces(m2.filtration(i));
        if src.len() != dst.len() {
            return Err(format!("embedding {i}: filtration shapes differ"));
        }
        for (s, d) in src.iter().zip(&dst) {
            let image: Vec<Vec<Scalar>> = s.gens.iter().map(|g| w.apply(i, g)).collect();
            if s.start != d.start || !span_eq(&image, &d.gens) {
                return Err(format!("embedding {i}: step starting at {} is not carried onto its image", s.start));
            }
        }
    }
    Ok(())
}

/// Null space of the linear conditions on `(γ_0, γ_1, γ_2)` for a fixed σ,
/// or `None` when the filtration shapes already differ.
fn oracle_system(m1: &PhiModule, m2: &PhiModule, sigma: &EigenPermutation) -> Option<Vec<Vec<Scalar>>> {
    let profiles: [Vec<Scalar>; 3] = std::array::from_fn(|j| entry_profile(m1, m2, sigma, j));
    let mut rows = Vec::new();
    for i in 0..m1.f() {
        let src = embedding_subspaces(m1.filtration(i));
        let dst = embedding_subspaces(m2.filtration(i));
        if src.len() != dst.len() {
            return None;
        }
        for (s, d) in src.iter().zip(&dst) {
            if s.start != d.start || rank(&s.gens) != rank(&d.gens) {
                return None;
            }
            // n . H(i) g = sum_j n[σ(j)] r_j(i) g[j] γ_j must vanish.
            for n in annihilator(&d.gens, 3) {
                for g in &s.gens {
                    rows.push((0..3).map(|j| &n[sigma[j]] * &profiles[j][i] * &g[j]).collect());
                }
            }
        }
    }
    Some(null_space(&rows, 3))
}

/// Decides isomorphism by linear algebra alone: for each σ with matching
/// norms the filtration conditions are linear in `γ`, and a solution with
/// every `γ_j` nonzero exists iff no coordinate vanishes on the whole
/// solution space.
pub fn oracle_isomorphic(m1: &PhiModule, m2: &PhiModule) -> Result<bool, IsoError> {
    check_shape(m1, m2)?;
    Ok(ALL_PERMUTATIONS.iter().any(|sigma| {
        norms_match(m1, m2, sigma)
            && oracle_system(m1, m2, sigma)
                .is_some_and(|basis| (0..3).all(|j| basis.iter().any(|b| !b[j].is_zero())))
    }))
}

/// Transports `m` along a monomial map with the given entries: returns the
/// Frobenius making `h` intertwining and the image filtration as raw data.
pub fn push_forward(m: &PhiModule, sigma: &EigenPermutation, h: &[TauVector; 3]) -> (FrobeniusData, RawFiltration) {
    let f = m.f();
    let w = IsoWitness { sigma: *sigma, h: h.clone() };
    let mut eig: [Vec<Scalar>; 3] = Default::default();
    for j in 0..3 {
        let p = m.frobenius().eigen(j);
        eig[sigma[j]] = (0..f).map(|i| h[j].get(i) * p.get(i) / h[j].get((i + 1) % f)).collect();
    }
    let [a, b, c] = eig.map(|v| TauVector::new(v).expect("f >= 1"));
    let fro = FrobeniusData::new(m.p(), a, b, c).expect("norms are preserved");
    let image = |i: usize, v: Vec<Scalar>| -> [Scalar; 3] {
        let out = w.apply(i, &v);
        std::array::from_fn(|k| out[k].clone())
    };
    let one = Scalar::one;
    let zero = Scalar::zero;
    let raw = m
        .filtrations()
        .iter()
        .enumerate()
        .map(|(i, e)| match e {
            EmbeddingFiltration::F0 { k1, k2, x1, x2, x2p } => RawEmbedding {
                k1: *k1,
                k2: *k2,
                u: Some(image(i, vec![one(), zero(), bit(*x2)])),
                v: Some(image(i, vec![zero(), one(), bit(*x2p)])),
                line: Some((one(), x1.clone())),
            },
            EmbeddingFiltration::F1 { k, x2, x2p } => RawEmbedding {
                k1: *k,
                k2: *k,
                u: Some(image(i, vec![one(), zero(), bit(*x2)])),
                v: Some(image(i, vec![zero(), one(), bit(*x2p)])),
                line: None,
            },
            EmbeddingFiltration::F2 { k, x1, x2pp } => RawEmbedding {
                k1: 0,
                k2: *k,
                u: Some(image(i, vec![one(), bit(*x1), bit(*x2pp)])),
                v: Some(image(i, vec![zero(), one(), zero()])),
                line: Some((one(), zero())),
            },
            EmbeddingFiltration::F3 => RawEmbedding { k1: 0, k2: 0, u: None, v: None, line: None },
        })
        .collect();
    (fro, raw)
}

/// JSON-friendly view of a decision.
#[derive(Debug, Clone, Serialize)]
pub struct IsoSummary {
    pub isomorphic: bool,
    pub sigma: Option<String>,
    pub per_embedding_case: BTreeMap<usize, String>,
}

impl From<&IsoDecision> for IsoSummary {
    fn from(d: &IsoDecision) -> Self {
        IsoSummary {
            isomorphic: d.isomorphic,
            sigma: d.sigma.as_ref().map(permutation_name),
            per_embedding_case: d.per_embedding_case.iter().cloned().enumerate().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{frac, int};
    use crate::normalform::normalize;

    fn fro(p: u64, a: &[i64], b: &[i64], c: &[i64]) -> FrobeniusData {
        let tv = |xs: &[i64]| TauVector::new(xs.iter().map(|&x| int(x)).collect()).unwrap();
        FrobeniusData::new(p, tv(a), tv(b), tv(c)).unwrap()
    }

    fn f0(x1: Scalar, x2: bool, x2p: bool) -> EmbeddingFiltration {
        EmbeddingFiltration::F0 { k1: 1, k2: 2, x1, x2, x2p }
    }

    #[test]
    fn reflexive_with_unit_witness() {
        let m = PhiModule::new(fro(3, &[2], &[5], &[7]), vec![f0(int(5), true, true)]).unwrap();
        let d = are_isomorphic(&m, &m).unwrap();
        assert!(d.isomorphic);
        assert_eq!(d.sigma, Some([0, 1, 2]));
        let w = find_witness(&m, &m).unwrap().unwrap();
        assert!(w.h.iter().all(|h| h == &TauVector::ones(1)));
        assert!(oracle_isomorphic(&m, &m).unwrap());
    }

    #[test]
    fn parameter_must_match_under_identity() {
        let fr = fro(3, &[2], &[5], &[7]);
        let m1 = PhiModule::new(fr.clone(), vec![f0(int(5), true, true)]).unwrap();
        let m2 = PhiModule::new(fr, vec![f0(int(7), true, true)]).unwrap();
        assert!(!are_isomorphic(&m1, &m2).unwrap().isomorphic);
        assert!(!oracle_isomorphic(&m1, &m2).unwrap());
    }

    #[test]
    fn reversal_condition() {
        // a <-> c with x1 = 1, y1 = -1/2: (1 + x1)(1 + y1) = 1.
        let m1 = PhiModule::new(fro(3, &[2], &[5], &[7]), vec![f0(int(1), true, true)]).unwrap();
        let m2 = PhiModule::new(fro(3, &[7], &[5], &[2]), vec![f0(frac(-1, 2), true, true)]).unwrap();
        let d = are_isomorphic(&m1, &m2).unwrap();
        assert!(d.isomorphic);
        assert_eq!(d.sigma, Some([2, 1, 0]));
        assert!(oracle_isomorphic(&m1, &m2).unwrap());
        validate_witness(&m1, &m2, d.witness.as_ref().unwrap()).unwrap();
        // The condition written as x1 (y1 + 1) + y1 = 0 with these values
        // gives 1/2 - 1/2 = 0 as well; x1 = 1, y1 = 1 fails both.
        let m3 = PhiModule::new(fro(3, &[7], &[5], &[2]), vec![f0(int(1), true, true)]).unwrap();
        assert!(!are_isomorphic(&m1, &m3).unwrap().isomorphic);
        assert!(!oracle_isomorphic(&m1, &m3).unwrap());
    }

    #[test]
    fn swap_with_zero_bits() {
        let m1 = PhiModule::new(fro(3, &[2], &[5], &[7]), vec![f0(int(2), false, false)]).unwrap();
        let m2 = PhiModule::new(fro(3, &[5], &[2], &[7]), vec![f0(int(3), false, false)]).unwrap();
        let w = find_witness(&m1, &m2).unwrap().unwrap();
        assert_eq!(w.sigma, [1, 0, 2]);
        // h(e_a) = h0 e_b, h(e_b) = h1 e_a with h0 = x1 y1 h1.
        assert_eq!(w.h[0].get(0), &(int(6) * w.h[1].get(0)));
        assert!(oracle_isomorphic(&m1, &m2).unwrap());
    }

    #[test]
    fn swap_with_all_bits_set() {
        let m1 = PhiModule::new(fro(3, &[2], &[5], &[7]), vec![f0(int(2), true, true)]).unwrap();
        let m2 = PhiModule::new(fro(3, &[5], &[2], &[7]), vec![f0(frac(1, 2), true, true)]).unwrap();
        assert!(are_isomorphic(&m1, &m2).unwrap().isomorphic);
        assert!(oracle_isomorphic(&m1, &m2).unwrap());
    }

    #[test]
    fn structural_mismatch() {
        let m1 = PhiModule::new(fro(3, &[2], &[5], &[7]), vec![EmbeddingFiltration::F3]).unwrap();
        let m2 = PhiModule::new(fro(5, &[2], &[3], &[7]), vec![EmbeddingFiltration::F3]).unwrap();
        assert_eq!(are_isomorphic(&m1, &m2), Err(IsoError::PrimeMismatch(3, 5)));
        let m3 = PhiModule::new(fro(3, &[2, 1], &[5, 1], &[7, 1]), vec![EmbeddingFiltration::F3; 2]).unwrap();
        assert_eq!(oracle_isomorphic(&m1, &m3), Err(IsoError::RankMismatch(1, 2)));
    }

    #[test]
    fn coupling_across_embeddings() {
        // Both embeddings force h0 = h2, which the Frobenius recurrence can
        // only meet when the profiles agree.
        let f1 = EmbeddingFiltration::F1 { k: 1, x2: true, x2p: false };
        let m1 = PhiModule::new(fro(3, &[2, 1], &[5, 1], &[7, 1]), vec![f1.clone(), f1.clone()]).unwrap();
        let m2 = PhiModule::new(fro(3, &[1, 2], &[5, 1], &[7, 1]), vec![f1.clone(), f1]).unwrap();
        let d = are_isomorphic(&m1, &m2).unwrap();
        assert_eq!(d.isomorphic, oracle_isomorphic(&m1, &m2).unwrap());
        assert!(!d.isomorphic);
    }

    #[test]
    fn pushed_forward_modules_are_isomorphic() {
        let fr = fro(5, &[2, 3], &[5, 1], &[7, 11]);
        let m = PhiModule::new(
            fr,
            vec![f0(frac(3, 4), true, false), EmbeddingFiltration::F2 { k: 3, x1: true, x2pp: true }],
        )
        .unwrap();
        for sigma in ALL_PERMUTATIONS {
            let h = [
                TauVector::new(vec![int(2), int(-3)]).unwrap(),
                TauVector::new(vec![frac(1, 7), int(5)]).unwrap(),
                TauVector::new(vec![int(-1), frac(2, 9)]).unwrap(),
            ];
            let (fro2, raw) = push_forward(&m, &sigma, &h);
            let m2 = normalize(&fro2, &raw).unwrap().module;
            assert!(are_isomorphic(&m, &m2).unwrap().isomorphic, "{sigma:?}");
            assert!(oracle_isomorphic(&m, &m2).unwrap(), "{sigma:?}");
            assert!(find_witness(&m, &m2).unwrap().is_some());
        }
    }
}
