//! Exact linear algebra over the rationals: rank, null spaces and subspace
//! comparisons for spans of row vectors.

use num_traits::Zero;

use crate::coeff::Scalar;

/// Row echelon form in place; returns the pivot columns.
fn echelon(rows: &mut [Vec<Scalar>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, k);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let factor = rows[k][c].clone();
                for j in c..ncols {
                    let delta = &factor * &rows[r][j];
                    rows[k][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

/// Basis of `{x : M x = 0}` where `M` has the given rows and `ncols` columns.
pub fn null_space(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    for row in &m {
        assert_eq!(row.len(), ncols, "row length mismatch");
    }
    let pivots = echelon(&mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Scalar::zero(); ncols];
        x[free] = Scalar::from_integer(1.into());
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = -m[r][free].clone();
        }
        basis.push(x);
    }
    basis
}

fn concat(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    a.iter().chain(b).cloned().collect()
}

pub fn span_contains(span: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    rank(&concat(span, &[v.to_vec()])) == rank(span)
}

pub fn span_eq(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    let ra = rank(a);
    ra == rank(b) && rank(&concat(a, b)) == ra
}

/// `dim(U ∩ W) = dim U + dim W - dim(U + W)`.
pub fn intersection_dim(u: &[Vec<Scalar>], w: &[Vec<Scalar>]) -> usize {
    rank(u) + rank(w) - rank(&concat(u, w))
}

/// Vectors orthogonal (under the plain dot product) to every generator;
/// `v` lies in the span iff it is orthogonal to all of them.
pub fn annihilator(span: &[Vec<Scalar>], dim: usize) -> Vec<Vec<Scalar>> {
    null_space(span, dim)
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(Scalar::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{frac, int};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rank_and_spans() {
        assert_eq!(rank(&[v(&[1, 2, 3]), v(&[2, 4, 6])]), 1);
        assert_eq!(rank(&[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[1, 1, 0])]), 2);
        assert_eq!(rank(&[]), 0);
        assert!(span_eq(&[v(&[1, 0, 1]), v(&[0, 1, 1])], &[v(&[1, 1, 2]), v(&[1, -1, 0])]));
        assert!(!span_eq(&[v(&[1, 0, 0])], &[v(&[0, 1, 0])]));
        assert_eq!(intersection_dim(&[v(&[1, 0, 0]), v(&[0, 1, 0])], &[v(&[0, 1, 0]), v(&[0, 0, 1])]), 1);
        assert!(span_contains(&[v(&[1, 2, 3])], &[int(2), int(4), int(6)]));
    }

    #[test]
    fn null_space_example() {
        let ns = null_space(&[v(&[1, 1, 0])], 3);
        assert_eq!(ns.len(), 2);
        for x in &ns {
            assert!(dot(&v(&[1, 1, 0]), x).is_zero());
        }
        assert_eq!(null_space(&[], 2).len(), 2);
        assert!(null_space(&[v(&[1, 0]), v(&[0, 1])], 2).is_empty());
    }

    fn row() -> impl Strategy<Value = Vec<Scalar>> {
        prop::collection::vec((-3i64..4, 1i64..3).prop_map(|(n, d)| frac(n, d)), 3)
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in prop::collection::vec(row(), 0..5)) {
            let ns = null_space(&rows, 3);
            prop_assert_eq!(rank(&rows) + ns.len(), 3);
            for x in &ns {
                for r in &rows {
                    prop_assert!(dot(r, x).is_zero());
                }
            }
            prop_assert_eq!(rank(&ns), ns.len());
        }

        #[test]
        fn intersection_bounds(a in prop::collection::vec(row(), 0..4), b in prop::collection::vec(row(), 0..4)) {
            let d = intersection_dim(&a, &b);
            prop_assert!(d <= rank(&a).min(rank(&b)));
            prop_assert_eq!(intersection_dim(&a, &a), rank(&a));
        }
    }
}
