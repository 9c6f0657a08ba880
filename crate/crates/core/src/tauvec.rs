//! The product ring of f copies of the coefficient field, its cyclic
//! Frobenius shift, and the norm maps on vectors and 3x3 matrices.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::{vp, Scalar, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TauError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty vector (f must be at least 1)")]
    Empty,
}

/// An element of E^f, coordinate i belonging to embedding i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TauVector {
    coords: Vec<Scalar>,
}

impl TauVector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self, TauError> {
        if coords.is_empty() {
            return Err(TauError::Empty);
        }
        Ok(TauVector { coords })
    }

    pub fn constant(f: usize, s: Scalar) -> Self {
        assert!(f >= 1);
        TauVector { coords: vec![s; f] }
    }

    pub fn zeros(f: usize) -> Self {
        Self::constant(f, Scalar::zero())
    }

    pub fn ones(f: usize) -> Self {
        Self::constant(f, Scalar::one())
    }

    pub fn f(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn all_nonzero(&self) -> bool {
        self.coords.iter().all(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &Scalar) -> TauVector {
        TauVector { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// Componentwise inverse; `None` if a coordinate is zero.
    pub fn inverse(&self) -> Option<TauVector> {
        if !self.all_nonzero() {
            return None;
        }
        Some(TauVector { coords: self.coords.iter().map(|c| c.recip()).collect() })
    }

    fn zip(&self, other: &TauVector, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> TauVector {
        assert_eq!(self.f(), other.f(), "TauVector length mismatch");
        TauVector { coords: self.coords.iter().zip(&other.coords).map(|(x, y)| op(x, y)).collect() }
    }
}

/// `(x0, .., x_{f-1}) -> (x1, .., x_{f-1}, x0)`.
pub fn frobenius_shift(x: &TauVector) -> TauVector {
    let mut coords = x.coords.clone();
    coords.rotate_left(1);
    TauVector { coords }
}

pub fn frobenius_shift_by(x: &TauVector, k: usize) -> TauVector {
    let mut coords = x.coords.clone();
    let f = coords.len();
    coords.rotate_left(k % f);
    TauVector { coords }
}

/// Product of the coordinates.
pub fn norm(x: &TauVector) -> Scalar {
    x.coords.iter().fold(Scalar::one(), |acc, c| acc * c)
}

pub fn norm_valuation(x: &TauVector, p: u64) -> Valuation {
    vp(&norm(x), p)
}

impl<'a> Add<&'a TauVector> for &'a TauVector {
    type Output = TauVector;
    fn add(self, rhs: &TauVector) -> TauVector {
        self.zip(rhs, |x, y| x + y)
    }
}

impl<'a> Sub<&'a TauVector> for &'a TauVector {
    type Output = TauVector;
    fn sub(self, rhs: &TauVector) -> TauVector {
        self.zip(rhs, |x, y| x - y)
    }
}

impl<'a> Mul<&'a TauVector> for &'a TauVector {
    type Output = TauVector;
    fn mul(self, rhs: &TauVector) -> TauVector {
        self.zip(rhs, |x, y| x * y)
    }
}

impl Neg for &TauVector {
    type Output = TauVector;
    fn neg(self) -> TauVector {
        TauVector { coords: self.coords.iter().map(|c| -c).collect() }
    }
}

/// 3x3 matrix over E^f; `entries[row][col]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauMatrix {
    pub entries: [[TauVector; 3]; 3],
}

impl TauMatrix {
    pub fn new(entries: [[TauVector; 3]; 3]) -> Result<Self, TauError> {
        let f = entries[0][0].f();
        for row in &entries {
            for e in row {
                if e.f() != f {
                    return Err(TauError::LengthMismatch(f, e.f()));
                }
            }
        }
        Ok(TauMatrix { entries })
    }

    pub fn zeros(f: usize) -> Self {
        TauMatrix { entries: std::array::from_fn(|_| std::array::from_fn(|_| TauVector::zeros(f))) }
    }

    pub fn identity(f: usize) -> Self {
        Self::diag([TauVector::ones(f), TauVector::ones(f), TauVector::ones(f)])
    }

    pub fn diag(d: [TauVector; 3]) -> Self {
        let f = d[0].f();
        let mut m = Self::zeros(f);
        for (k, v) in d.into_iter().enumerate() {
            m.entries[k][k] = v;
        }
        m
    }

    pub fn f(&self) -> usize {
        self.entries[0][0].f()
    }

    pub fn get(&self, r: usize, c: usize) -> &TauVector {
        &self.entries[r][c]
    }

    pub fn mul(&self, rhs: &TauMatrix) -> TauMatrix {
        let f = self.f();
        let mut out = TauMatrix::zeros(f);
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = TauVector::zeros(f);
                for k in 0..3 {
                    acc = &acc + &(&self.entries[r][k] * &rhs.entries[k][c]);
                }
                out.entries[r][c] = acc;
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> TauMatrix {
        TauMatrix { entries: std::array::from_fn(|r| std::array::from_fn(|c| self.entries[r][c].scale(s))) }
    }

    /// Entrywise Frobenius shift.
    pub fn shift(&self) -> TauMatrix {
        TauMatrix { entries: std::array::from_fn(|r| std::array::from_fn(|c| frobenius_shift(&self.entries[r][c]))) }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(TauVector::is_zero)
    }

    /// The scalar 3x3 matrix at embedding `i`.
    pub fn at(&self, i: usize) -> [[Scalar; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.entries[r][c].get(i).clone()))
    }
}

/// `A * phi(A) * ... * phi^{f-1}(A)`.
pub fn matrix_norm(a: &TauMatrix) -> Result<TauMatrix, TauError> {
    let a = TauMatrix::new(a.entries.clone())?;
    let mut acc = a.clone();
    let mut factor = a;
    for _ in 1..acc.f() {
        factor = factor.shift();
        acc = acc.mul(&factor);
    }
    Ok(acc)
}
