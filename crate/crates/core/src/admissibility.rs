//! Weak admissibility: the closed-form inequality checker, irreducibility,
//! per-submodule diagnostics, and a definitional oracle that computes Hodge
//! invariants from explicit subspaces.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::coeff::Valuation;
use crate::linalg::intersection_dim;
use crate::normalform::filtration_subspaces;
use crate::phimodule::{classify_embeddings, newton_invariant, EmbeddingFiltration, PhiModule, SubmoduleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slack {
    Strict,
    Equality,
    Violated,
}

fn compare(lhs: &Valuation, rhs: u64) -> Slack {
    let rhs = Valuation::Finite(BigRational::from_integer(rhs.into()));
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => Slack::Strict,
        std::cmp::Ordering::Equal => Slack::Equality,
        std::cmp::Ordering::Less => Slack::Violated,
    }
}

/// Which closed form to evaluate. `LiteralD0` reads the F1 term of
/// the `D0` inequality as "x1 = 0"; F1 has no x1, so every F1 embedding
/// contributes its weight. It exists so the self-test can show that the
/// oracle catches it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClosedFormVariant {
    #[default]
    Corrected,
    LiteralD0,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Newton and Hodge invariants of the whole module agree.
    pub balanced: bool,
    /// Status of the inequality attached to each proper submodule.
    pub slack: BTreeMap<SubmoduleId, Slack>,
    pub irreducible: bool,
    /// Submodules that are themselves weakly admissible; empty unless the
    /// module is.
    pub admissible_submodules: BTreeSet<SubmoduleId>,
}

impl AdmissibilityReport {
    fn assemble(balanced: bool, slack: BTreeMap<SubmoduleId, Slack>) -> Self {
        let admissible = balanced && slack.values().all(|s| *s != Slack::Violated);
        let irreducible = admissible && slack.values().all(|s| *s == Slack::Strict);
        let admissible_submodules = if admissible {
            slack.iter().filter(|(_, s)| **s == Slack::Equality).map(|(k, _)| *k).collect()
        } else {
            BTreeSet::new()
        };
        AdmissibilityReport { admissible, balanced, slack, irreducible, admissible_submodules }
    }

    /// Equality flags for the six proper submodules.
    pub fn equalities(&self) -> BTreeMap<SubmoduleId, bool> {
        self.slack.iter().map(|(k, s)| (*k, *s == Slack::Equality)).collect()
    }
}

/// Right-hand side of the inequality for `s`, written as sums over the
/// embeddings of each filtration type.
fn inequality_rhs(m: &PhiModule, s: SubmoduleId, variant: ClosedFormVariant) -> u64 {
    use EmbeddingFiltration as E;
    use SubmoduleId::*;
    let c = classify_embeddings(m);
    let filt = m.filtrations();
    let sum = |set: &[usize], term: &dyn Fn(&E) -> u32| -> u64 { set.iter().map(|&i| term(&filt[i]) as u64).sum() };
    let f0 = |e: &E| match e {
        E::F0 { k1, k2, x1, x2, x2p } => (*k1, *k2, x1.is_zero(), *x2, *x2p, e.x2pp().expect("F0").is_zero()),
        _ => unreachable!(),
    };
    let f1 = |e: &E| match e {
        E::F1 { k, x2, x2p } => (*k, *x2, *x2p),
        _ => unreachable!(),
    };
    let f2 = |e: &E| match e {
        E::F2 { k, x1, x2pp } => (*k, *x1, *x2pp),
        _ => unreachable!(),
    };
    let when = |cond: bool, w: u32| if cond { w } else { 0 };
    match s {
        D0 => {
            let i2_term: &dyn Fn(&E) -> u32 = match variant {
                ClosedFormVariant::Corrected => &|e| {
                    let (k, x2, _) = f1(e);
                    when(!x2, k)
                },
                ClosedFormVariant::LiteralD0 => &|e| f1(e).0,
            };
            sum(&c.i1, &|e| {
                let (k1, k2, x1z, x2, _, _) = f0(e);
                when(!x2 && !x1z, k1) + when(!x2 && x1z, k2)
            }) + sum(&c.i2, i2_term)
                + sum(&c.i3, &|e| {
                    let (k, x1, x2pp) = f2(e);
                    when(!x1 && !x2pp, k)
                })
        }
        D1 => {
            sum(&c.i1, &|e| {
                let (k1, _, _, _, x2p, _) = f0(e);
                when(!x2p, k1)
            }) + sum(&c.i2, &|e| {
                let (k, _, x2p) = f1(e);
                when(!x2p, k)
            })
        }
        D2 => 0,
        D01 => {
            sum(&c.i1, &|e| {
                let (k1, k2, _, x2, x2p, x2ppz) = f0(e);
                when(!x2ppz, k1) + when(x2ppz && x2p, k2) + when(!x2 && !x2p, k1 + k2)
            }) + sum(&c.i2, &|e| {
                let (k, x2, x2p) = f1(e);
                when(x2p || x2, k) + when(!x2 && !x2p, 2 * k)
            }) + sum(&c.i3, &|e| {
                let (k, _, x2pp) = f2(e);
                when(!x2pp, k)
            })
        }
        D02 => {
            sum(&c.i1, &|e| {
                let (k1, k2, x1z, ..) = f0(e);
                when(!x1z, k1) + when(x1z, k2)
            }) + sum(&c.i2, &|e| f1(e).0)
                + sum(&c.i3, &|e| {
                    let (k, x1, _) = f2(e);
                    when(!x1, k)
                })
        }
        D12 => sum(&c.i1, &|e| f0(e).0) + sum(&c.i2, &|e| f1(e).0),
        Full => {
            sum(&c.i1, &|e| {
                let (k1, k2, ..) = f0(e);
                k1 + k2
            }) + sum(&c.i2, &|e| 2 * f1(e).0)
                + sum(&c.i3, &|e| f2(e).0)
        }
    }
}

pub fn check_weak_admissibility_with(m: &PhiModule, variant: ClosedFormVariant) -> AdmissibilityReport {
    let balanced = compare(&newton_invariant(m, SubmoduleId::Full), inequality_rhs(m, SubmoduleId::Full, variant))
        == Slack::Equality;
    let slack = SubmoduleId::PROPER
        .iter()
        .map(|&s| (s, compare(&newton_invariant(m, s), inequality_rhs(m, s, variant))))
        .collect();
    AdmissibilityReport::assemble(balanced, slack)
}

pub fn check_weak_admissibility(m: &PhiModule) -> AdmissibilityReport {
    check_weak_admissibility_with(m, ClosedFormVariant::Corrected)
}

pub fn is_irreducible(m: &PhiModule) -> bool {
    check_weak_admissibility(m).irreducible
}

/// `sum_j j * dim gr^j` of the filtration induced on `s`, computed by
/// intersecting explicit subspaces.
pub fn oracle_hodge_invariant(m: &PhiModule, s: SubmoduleId) -> u64 {
    let sub: Vec<Vec<_>> = s.slots().iter().map(|&k| {
        let mut e = vec![BigRational::zero(); 3];
        e[k] = BigRational::from_integer(1.into());
        e
    }).collect();
    let mut total = 0u64;
    for i in 0..m.f() {
        let steps = filtration_subspaces(m, i);
        for w in steps.windows(2) {
            let drop = intersection_dim(&w[0].gens, &sub) - intersection_dim(&w[1].gens, &sub);
            // gr^j is nonzero only at the last index before the next step.
            let jump = w[1].start - 1;
            total += (jump as u64) * drop as u64;
        }
    }
    total
}

/// Definitional weak admissibility: balanced on the whole module and
/// `t_N >= t_H` on each proper φ-stable submodule.
pub fn oracle_weak_admissibility(m: &PhiModule) -> AdmissibilityReport {
    let balanced =
        compare(&newton_invariant(m, SubmoduleId::Full), oracle_hodge_invariant(m, SubmoduleId::Full)) == Slack::Equality;
    let slack = SubmoduleId::PROPER
        .iter()
        .map(|&s| (s, compare(&newton_invariant(m, s), oracle_hodge_invariant(m, s))))
        .collect();
    AdmissibilityReport::assemble(balanced, slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::int;
    use crate::phimodule::{hodge_invariant, FrobeniusData};
    use crate::tauvec::TauVector;

    fn module(p: u64, v: [u32; 3], filt: Vec<EmbeddingFiltration>) -> PhiModule {
        let f = filt.len();
        // Distinct units keep the norms apart even when valuations agree.
        let eig = |e: u32, u: i64| {
            let mut c = vec![int(1); f];
            c[0] = crate::coeff::pow_int(p, e) * int(u);
            TauVector::new(c).unwrap()
        };
        let fro = FrobeniusData::new(p, eig(v[0], 1), eig(v[1], 2), eig(v[2], 4)).unwrap();
        PhiModule::new(fro, filt).unwrap()
    }

    fn f0(k1: u32, k2: u32, x1: i64, x2: bool, x2p: bool) -> EmbeddingFiltration {
        EmbeddingFiltration::F0 { k1, k2, x1: int(x1), x2, x2p }
    }

    #[test]
    fn golden_instance() {
        let m = module(3, [2, 1, 0], vec![f0(1, 2, 0, false, false)]);
        let r = check_weak_admissibility(&m);
        assert!(r.admissible && r.balanced && !r.irreducible);
        assert!(r.slack.values().all(|s| *s == Slack::Equality));
        assert_eq!(r.admissible_submodules, SubmoduleId::PROPER.into_iter().collect());
        let rhs: Vec<u64> = [SubmoduleId::Full, SubmoduleId::D0, SubmoduleId::D1, SubmoduleId::D2, SubmoduleId::D01, SubmoduleId::D02, SubmoduleId::D12]
            .iter()
            .map(|&s| oracle_hodge_invariant(&m, s))
            .collect();
        assert_eq!(rhs, vec![3, 2, 1, 0, 3, 2, 1]);
        assert_eq!(oracle_weak_admissibility(&m), r);
    }

    #[test]
    fn trivial_filtration() {
        let m = module(5, [0, 0, 0], vec![EmbeddingFiltration::F3; 2]);
        let r = check_weak_admissibility(&m);
        assert!(r.admissible && !r.irreducible);
        assert_eq!(r.admissible_submodules.len(), 6);
        assert_eq!(oracle_weak_admissibility(&m), r);
    }

    #[test]
    fn generic_parameters() {
        let m = module(3, [1, 2, 0], vec![f0(1, 2, 1, true, true)]);
        let r = check_weak_admissibility(&m);
        assert!(r.admissible && !r.irreducible);
        assert_eq!(r.admissible_submodules, [SubmoduleId::D2, SubmoduleId::D02].into_iter().collect());
        assert_eq!(oracle_weak_admissibility(&m), r);
    }

    #[test]
    fn irreducible_example() {
        let m = module(3, [1, 1, 2], vec![f0(1, 3, 1, true, true)]);
        assert!(is_irreducible(&m));
        assert!(check_weak_admissibility(&m).admissible_submodules.is_empty());
        assert_eq!(oracle_weak_admissibility(&m), check_weak_admissibility(&m));
    }

    #[test]
    fn violating_example() {
        let m = module(3, [0, 0, 3], vec![f0(1, 2, 0, false, false)]);
        let r = check_weak_admissibility(&m);
        assert!(!r.admissible);
        assert_eq!(r.slack[&SubmoduleId::D0], Slack::Violated);
        assert_eq!(r.slack[&SubmoduleId::D12], Slack::Strict);
        assert!(r.admissible_submodules.is_empty());
        assert_eq!(oracle_weak_admissibility(&m), r);
    }

    #[test]
    fn oracle_spot_values() {
        let m = module(3, [0, 0, 3], vec![f0(2, 5, 0, true, false)]);
        assert_eq!(oracle_hodge_invariant(&m, SubmoduleId::D1), 2);
        assert_eq!(oracle_hodge_invariant(&m, SubmoduleId::D2), 0);
        assert_eq!(oracle_hodge_invariant(&m, SubmoduleId::Full), 7);
    }

    #[test]
    fn literal_variant_differs_on_f1() {
        let m = module(3, [0, 1, 1], vec![EmbeddingFiltration::F1 { k: 1, x2: true, x2p: false }]);
        let good = check_weak_admissibility(&m);
        assert!(good.admissible);
        assert_eq!(good, oracle_weak_admissibility(&m));
        let bad = check_weak_admissibility_with(&m, ClosedFormVariant::LiteralD0);
        assert!(!bad.admissible);
    }

    mod props {
        use super::*;
        use crate::coeff::frac;
        use proptest::prelude::*;

        fn filtration() -> impl Strategy<Value = EmbeddingFiltration> {
            let x1 = prop_oneof![Just(0i64), Just(1), Just(-1), -4i64..5].prop_flat_map(|n| (Just(n), 1i64..4));
            prop_oneof![
                (1u32..4, 1u32..4, x1, any::<bool>(), any::<bool>()).prop_map(|(k1, dk, (n, d), x2, x2p)| {
                    EmbeddingFiltration::F0 { k1, k2: k1 + dk, x1: frac(n, d), x2, x2p }
                }),
                (1u32..6, any::<bool>(), any::<bool>()).prop_map(|(k, x2, x2p)| EmbeddingFiltration::F1 { k, x2, x2p }),
                (1u32..6, any::<bool>(), any::<bool>()).prop_map(|(k, x1, x2pp)| EmbeddingFiltration::F2 { k, x1, x2pp }),
                Just(EmbeddingFiltration::F3),
            ]
        }

        fn instance() -> impl Strategy<Value = PhiModule> {
            (prop::collection::vec(filtration(), 1..4), [0u32..8, 0u32..8, 0u32..8])
                .prop_map(|(filt, v)| module(5, v, filt))
        }

        proptest! {
            #[test]
            fn closed_form_matches_oracle(m in instance()) {
                prop_assert_eq!(check_weak_admissibility(&m), oracle_weak_admissibility(&m));
                for s in SubmoduleId::ALL {
                    prop_assert_eq!(hodge_invariant(&m, s), oracle_hodge_invariant(&m, s));
                    prop_assert_eq!(inequality_rhs(&m, s, ClosedFormVariant::Corrected), oracle_hodge_invariant(&m, s));
                }
            }

            #[test]
            fn report_invariants(m in instance()) {
                let r = check_weak_admissibility(&m);
                prop_assert_eq!(r.admissible, r.balanced && !r.slack.values().any(|s| *s == Slack::Violated));
                if r.irreducible {
                    prop_assert!(r.admissible && r.admissible_submodules.is_empty());
                }
            }

            #[test]
            fn weights_sum_to_full_hodge(m in instance()) {
                let total: u64 = (0..m.f()).map(|i| crate::phimodule::weights(&m, i).unwrap().iter().map(|&w| w as u64).sum::<u64>()).sum();
                prop_assert_eq!(total, oracle_hodge_invariant(&m, SubmoduleId::Full));
            }

            #[test]
            fn monotone_in_left_side(filt in prop::collection::vec(filtration(), 1..3), v in [0u32..6, 0u32..6, 0u32..6], slot in 0usize..3) {
                let m = module(7, v, filt.clone());
                let mut w = v;
                w[slot] += 1;
                let m2 = module(7, w, filt);
                let (r, r2) = (check_weak_admissibility(&m), check_weak_admissibility(&m2));
                for s in SubmoduleId::PROPER {
                    if s.slots().contains(&slot) && r.slack[&s] != Slack::Violated {
                        prop_assert_ne!(r2.slack[&s], Slack::Violated);
                    }
                }
            }
        }
    }
}
