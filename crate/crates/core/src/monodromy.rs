//! Monodromy operators N with `N φ = p φ N` on a diagonal Frobenius.
//!
//! In matrix form `A P = p P φ(A)`, entry by entry
//! `a_{rc} p_c = p p_r φ(a_{rc})`. The entry is either zero or, by the
//! norm criterion, a scalar multiple of one telescoping vector, which exists iff
//! `Nm(p_c) = p^f Nm(p_r)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::coeff::{pow_int, Scalar};
use crate::phimodule::FrobeniusData;
use crate::tauvec::{frobenius_shift, matrix_norm, norm, TauMatrix, TauVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonodromyError {
    #[error("no nonzero solution: the norms of alpha and beta differ")]
    NoNonzeroSolution,
    #[error("alpha and beta must have equal length and nonzero coordinates")]
    BadCoefficients,
    #[error("position {0} is not eligible for this Frobenius")]
    IneligiblePosition(Position),
    #[error("shape violation: {0}")]
    ShapeViolation(String),
    #[error("malformed position `{0}` (expected two distinct digits in 1..3, e.g. \"12\")")]
    BadPosition(String),
}

/// Off-diagonal matrix position, 0-based internally, written 1-based ("12").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub const ALL: [Position; 6] = [
        Position { row: 0, col: 1 },
        Position { row: 1, col: 2 },
        Position { row: 2, col: 0 },
        Position { row: 0, col: 2 },
        Position { row: 1, col: 0 },
        Position { row: 2, col: 1 },
    ];

    pub fn shape(self) -> MonodromyShape {
        if (self.row + 1) % 3 == self.col {
            MonodromyShape::CycleDown
        } else {
            MonodromyShape::CycleUp
        }
    }

    pub fn transpose(self) -> Position {
        Position { row: self.col, col: self.row }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row + 1, self.col + 1)
    }
}

impl Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for Position {
    type Err = MonodromyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MonodromyError::BadPosition(s.to_string());
        let b = s.as_bytes();
        if b.len() != 2 {
            return Err(bad());
        }
        let digit = |c: u8| (b'1'..=b'3').contains(&c).then(|| (c - b'1') as usize);
        let (row, col) = (digit(b[0]).ok_or_else(bad)?, digit(b[1]).ok_or_else(bad)?);
        if row == col {
            return Err(bad());
        }
        Ok(Position { row, col })
    }
}

/// The two position sets a nonzero N can occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MonodromyShape {
    /// (1,2), (2,3), (3,1)
    CycleDown,
    /// (1,3), (2,1), (3,2)
    CycleUp,
}

/// The solution `γ` of `α γ = β φ(γ)` with `γ(0) = gamma0`:
/// `γ(i+1) = γ(i) α(i) / β(i)`.
pub fn solve_entry(alpha: &TauVector, beta: &TauVector, gamma0: &Scalar) -> Result<TauVector, MonodromyError> {
    if alpha.f() != beta.f() || !alpha.all_nonzero() || !beta.all_nonzero() {
        return Err(MonodromyError::BadCoefficients);
    }
    let f = alpha.f();
    if gamma0.is_zero() {
        return Ok(TauVector::zeros(f));
    }
    if norm(alpha) != norm(beta) {
        return Err(MonodromyError::NoNonzeroSolution);
    }
    let mut coords = Vec::with_capacity(f);
    let mut cur = gamma0.clone();
    for i in 0..f {
        coords.push(cur.clone());
        cur = cur * alpha.get(i) / beta.get(i);
    }
    Ok(TauVector::new(coords).expect("f >= 1"))
}

/// `α = p_c` and `β = p · p_r` for the entry at `pos`.
fn entry_equation(fro: &FrobeniusData, pos: Position) -> (TauVector, TauVector) {
    let p = Scalar::from_integer(fro.p().into());
    (fro.eigen(pos.col).clone(), fro.eigen(pos.row).scale(&p))
}

/// Positions whose norm ratio `Nm(col) = p^f Nm(row)` holds.
pub fn admissible_positions(fro: &FrobeniusData) -> Vec<Position> {
    let pf = pow_int(fro.p(), fro.f() as u32);
    let n = fro.norms();
    Position::ALL.into_iter().filter(|pos| n[pos.col] == &pf * &n[pos.row]).collect()
}

fn check_shape(positions: &[Position]) -> Result<(), MonodromyError> {
    if positions.len() > 2 {
        return Err(MonodromyError::ShapeViolation(format!("{} nonzero entries (at most two allowed)", positions.len())));
    }
    for a in positions {
        if positions.contains(&a.transpose()) {
            return Err(MonodromyError::ShapeViolation(format!("entries at both {a} and {}", a.transpose())));
        }
    }
    if let [a, b] = positions {
        if a.shape() != b.shape() {
            return Err(MonodromyError::ShapeViolation(format!("{a} and {b} belong to different shapes")));
        }
    }
    Ok(())
}

/// Builds N from scalars at chosen positions. Zero scalars are dropped.
pub fn build_monodromy(fro: &FrobeniusData, entries: &BTreeMap<Position, Scalar>) -> Result<TauMatrix, MonodromyError> {
    let live: Vec<(Position, &Scalar)> = entries.iter().filter(|(_, s)| !s.is_zero()).map(|(p, s)| (*p, s)).collect();
    let positions: Vec<Position> = live.iter().map(|(p, _)| *p).collect();
    check_shape(&positions)?;
    let eligible = admissible_positions(fro);
    let mut a = TauMatrix::zeros(fro.f());
    for (pos, s) in live {
        if !eligible.contains(&pos) {
            return Err(MonodromyError::IneligiblePosition(pos));
        }
        let (alpha, beta) = entry_equation(fro, pos);
        a.entries[pos.row][pos.col] = solve_entry(&alpha, &beta, s)?;
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonodromyValidation {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Independent checks of every condition on N.
pub fn validate_monodromy(fro: &FrobeniusData, a: &TauMatrix) -> MonodromyValidation {
    let mut reasons = Vec::new();
    let f = fro.f();
    if a.f() != f {
        return MonodromyValidation { valid: false, reasons: vec![format!("entries have length {}, expected {f}", a.f())] };
    }
    let pm = fro.matrix();
    let p = Scalar::from_integer(fro.p().into());
    if a.mul(&pm) != pm.mul(&a.shift()).scale(&p) {
        reasons.push("A P != p P phi(A)".to_string());
    }
    for k in 0..3 {
        if !a.get(k, k).is_zero() {
            reasons.push(format!("diagonal entry {k}{k} is nonzero", k = k + 1));
        }
    }
    for pos in Position::ALL {
        let e = a.get(pos.row, pos.col);
        if !e.is_zero() && !e.all_nonzero() {
            reasons.push(format!("entry {pos} is neither zero nor nowhere zero"));
        }
        if pos.row < pos.col && !e.is_zero() && !a.get(pos.col, pos.row).is_zero() {
            reasons.push(format!("entries {pos} and {} are both nonzero", pos.transpose()));
        }
    }
    let support: Vec<Position> = Position::ALL.into_iter().filter(|p| !a.get(p.row, p.col).is_zero()).collect();
    if support.len() > 2 || support.windows(2).any(|w| w[0].shape() != w[1].shape()) {
        reasons.push("nonzero entries do not fit a single two-entry shape".to_string());
    }
    if !a.mul(a).mul(a).is_zero() {
        reasons.push("A^3 != 0".to_string());
    }
    let nm = matrix_norm(&pm).expect("square");
    if a.mul(&nm) != nm.mul(a).scale(&pow_int(fro.p(), f as u32)) {
        reasons.push("A Nm(P) != p^f Nm(P) A".to_string());
    }
    MonodromyValidation { valid: reasons.is_empty(), reasons }
}

/// True iff `α γ = β φ(γ)` holds coordinatewise.
pub fn satisfies_entry_equation(alpha: &TauVector, beta: &TauVector, gamma: &TauVector) -> bool {
    alpha * gamma == beta * &frobenius_shift(gamma)
}
