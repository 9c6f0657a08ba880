//! Randomized cross-checks of every closed form against its oracle, with a
//! greedy shrinker for failing modules.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::admissibility::{check_weak_admissibility_with, oracle_hodge_invariant, oracle_weak_admissibility, ClosedFormVariant};
use crate::coeff::{frac, int, Scalar};
use crate::generate::{
    generate_module_with, monodromy_frobenius_with, random_frobenius_with, random_raw_with, related_pair_with, stream,
    GeneratorConfig, Target,
};
use crate::instance::InstanceDocument;
use crate::isomorphism::{are_isomorphic, oracle_isomorphic, validate_witness};
use crate::monodromy::{admissible_positions, build_monodromy, validate_monodromy, MonodromyError, Position};
use crate::normalform::{matches_raw, normalize, oracle_representable, NormalFormError};
use crate::phimodule::{embedding_hodge, EmbeddingFiltration, FrobeniusData, PhiModule, SubmoduleId};
use crate::tauvec::TauVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    WeakAdmissibility,
    HodgeTable,
    Isomorphism,
    Monodromy,
    NormalForm,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub property: Property,
    pub instance: InstanceDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<InstanceDocument>,
    pub detail: String,
    /// Shrinking steps applied to reach `instance`.
    pub shrink_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestReport {
    pub n: u64,
    pub seed: u64,
    pub passed: bool,
    pub checks: BTreeMap<Property, u64>,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelfTestError {
    #[error("instance count must be positive")]
    EmptyRun,
}

/// Why the closed forms and the oracle disagree on `m`, if they do.
fn admissibility_mismatch(m: &PhiModule, variant: ClosedFormVariant) -> Option<String> {
    let closed = check_weak_admissibility_with(m, variant);
    let oracle = oracle_weak_admissibility(m);
    if closed == oracle {
        return None;
    }
    let diffs: Vec<String> = closed
        .slack
        .iter()
        .filter(|(s, v)| oracle.slack.get(s) != Some(v))
        .map(|(s, v)| format!("{s}: closed form {v:?}, oracle {:?}", oracle.slack[s]))
        .collect();
    Some(if diffs.is_empty() {
        format!("closed form {closed:?}, oracle {oracle:?}")
    } else {
        diffs.join("; ")
    })
}

fn hodge_mismatch(m: &PhiModule) -> Option<String> {
    for s in SubmoduleId::ALL {
        let closed: u64 = m.filtrations().iter().map(|e| embedding_hodge(e, s)).sum();
        let oracle = oracle_hodge_invariant(m, s);
        if closed != oracle {
            return Some(format!("{s}: table {closed}, oracle {oracle}"));
        }
    }
    None
}

fn drop_embedding(m: &PhiModule, i: usize) -> Option<PhiModule> {
    if m.f() == 1 {
        return None;
    }
    let fro = m.frobenius();
    let eig: Vec<TauVector> = fro
        .eigenvectors()
        .iter()
        .map(|v| TauVector::new((0..m.f()).filter(|&j| j != i).map(|j| v.get(j).clone()).collect()).expect("f >= 2"))
        .collect();
    let [a, b, c]: [TauVector; 3] = eig.try_into().expect("three");
    let fro = FrobeniusData::new(fro.p(), a, b, c).ok()?;
    let mut filt = m.filtrations().to_vec();
    filt.remove(i);
    PhiModule::new(fro, filt).ok()
}

/// Variants of one embedding filtration with a smaller weight.
fn lower_weights(e: &EmbeddingFiltration) -> Vec<EmbeddingFiltration> {
    use EmbeddingFiltration as E;
    match e {
        E::F0 { k1, k2, x1, x2, x2p } => {
            let mut out = vec![];
            if *k2 > k1 + 1 {
                out.push(E::F0 { k1: *k1, k2: k2 - 1, x1: x1.clone(), x2: *x2, x2p: *x2p });
            }
            if *k1 > 1 {
                out.push(E::F0 { k1: k1 - 1, k2: k2 - 1, x1: x1.clone(), x2: *x2, x2p: *x2p });
            }
            out
        }
        E::F1 { k, x2, x2p } if *k > 1 => vec![E::F1 { k: k - 1, x2: *x2, x2p: *x2p }],
        E::F2 { k, x1, x2pp } if *k > 1 => vec![E::F2 { k: k - 1, x1: *x1, x2pp: *x2pp }],
        _ => vec![],
    }
}

/// Variants with one parameter moved to 0 or 1.
fn simpler_parameters(e: &EmbeddingFiltration) -> Vec<EmbeddingFiltration> {
    use EmbeddingFiltration as E;
    let mut out = vec![];
    match e {
        E::F0 { k1, k2, x1, x2, x2p } => {
            // 0 is simpler than 1, which is simpler than anything else.
            let targets: &[i64] = if x1.is_zero() { &[] } else if *x1 == int(1) { &[0] } else { &[0, 1] };
            for &t in targets {
                out.push(E::F0 { k1: *k1, k2: *k2, x1: int(t), x2: *x2, x2p: *x2p });
            }
            if *x2 {
                out.push(E::F0 { k1: *k1, k2: *k2, x1: x1.clone(), x2: false, x2p: *x2p });
            }
            if *x2p {
                out.push(E::F0 { k1: *k1, k2: *k2, x1: x1.clone(), x2: *x2, x2p: false });
            }
        }
        E::F1 { k, x2, x2p } => {
            if *x2 {
                out.push(E::F1 { k: *k, x2: false, x2p: *x2p });
            }
            if *x2p {
                out.push(E::F1 { k: *k, x2: *x2, x2p: false });
            }
        }
        E::F2 { k, x1, x2pp } => {
            if *x1 {
                out.push(E::F2 { k: *k, x1: false, x2pp: *x2pp });
            }
            if *x2pp {
                out.push(E::F2 { k: *k, x1: *x1, x2pp: false });
            }
        }
        E::F3 => {}
    }
    out
}

/// Candidates in shrinking priority: fewer embeddings, then lower weights,
/// then simpler parameters.
fn shrink_candidates(m: &PhiModule) -> Vec<PhiModule> {
    let mut out: Vec<PhiModule> = (0..m.f()).filter_map(|i| drop_embedding(m, i)).collect();
    for step in [lower_weights, simpler_parameters] {
        for i in 0..m.f() {
            for e in step(m.filtration(i)) {
                let mut filt = m.filtrations().to_vec();
                filt[i] = e;
                if let Ok(x) = PhiModule::new(m.frobenius().clone(), filt) {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Greedily replaces `m` by a simpler module on which `fails` still
/// reports a problem. Every step strictly shrinks f, a weight or a
/// parameter, so this terminates.
pub fn shrink(m: PhiModule, fails: impl Fn(&PhiModule) -> Option<String>) -> (PhiModule, String, usize) {
    let mut detail = fails(&m).expect("shrink starts from a failing module");
    let mut m = m;
    let mut steps = 0;
    'outer: loop {
        for c in shrink_candidates(&m) {
            if let Some(d) = fails(&c) {
                m = c;
                detail = d;
                steps += 1;
                continue 'outer;
            }
        }
        return (m, detail, steps);
    }
}

fn module_counterexample(
    index: u64,
    property: Property,
    m: &PhiModule,
    fails: impl Fn(&PhiModule) -> Option<String>,
) -> Option<Counterexample> {
    fails(m)?;
    let (m, detail, shrink_steps) = shrink(m.clone(), fails);
    Some(Counterexample { index, property, instance: InstanceDocument::from_module(&m), other: None, detail, shrink_steps })
}

fn config(seed: u64, index: u64) -> GeneratorConfig {
    GeneratorConfig {
        seed,
        target: if index % 2 == 0 { Target::Any } else { Target::Admissible },
        ..Default::default()
    }
}

fn check_isomorphism(index: u64, rng: &mut impl Rng, cfg: &GeneratorConfig) -> Option<Counterexample> {
    let cfg = GeneratorConfig { target: Target::Any, ..cfg.clone() };
    let (m1, m2) = related_pair_with(rng, &cfg).ok()?;
    let fail = |detail: String| Counterexample {
        index,
        property: Property::Isomorphism,
        instance: InstanceDocument::from_module(&m1),
        other: Some(InstanceDocument::from_module(&m2)),
        detail,
        shrink_steps: 0,
    };
    let decision = match are_isomorphic(&m1, &m2) {
        Ok(d) => d,
        Err(e) => return Some(fail(format!("decision failed: {e}"))),
    };
    let oracle = match oracle_isomorphic(&m1, &m2) {
        Ok(o) => o,
        Err(e) => return Some(fail(format!("oracle failed: {e}"))),
    };
    if decision.isomorphic != oracle {
        return Some(fail(format!("closed form {}, oracle {oracle}", decision.isomorphic)));
    }
    if let Some(w) = &decision.witness {
        if let Err(e) = validate_witness(&m1, &m2, w) {
            return Some(fail(format!("witness rejected: {e}")));
        }
    }
    None
}

fn check_monodromy(index: u64, rng: &mut impl Rng, cfg: &GeneratorConfig) -> Option<Counterexample> {
    let (fro, positions) = monodromy_frobenius_with(rng, cfg);
    let mut entries: BTreeMap<Position, Scalar> = BTreeMap::new();
    for p in &positions {
        entries.insert(*p, frac(rng.gen_range(1..=7), rng.gen_range(1..=5)));
    }
    let doc = InstanceDocument::from_frobenius(&fro);
    let fail = |detail: String| Counterexample {
        index,
        property: Property::Monodromy,
        instance: doc.clone(),
        other: None,
        detail,
        shrink_steps: 0,
    };
    let eligible = admissible_positions(&fro);
    match build_monodromy(&fro, &entries) {
        Ok(a) => {
            let v = validate_monodromy(&fro, &a);
            if !v.valid {
                return Some(fail(format!("built monodromy fails validation: {}", v.reasons.join("; "))));
            }
        }
        Err(e) => return Some(fail(format!("eligible positions {positions:?} rejected: {e}"))),
    }
    for p in Position::ALL.iter().filter(|p| !eligible.contains(p)) {
        let one = BTreeMap::from([(*p, int(1))]);
        match build_monodromy(&fro, &one) {
            Err(MonodromyError::IneligiblePosition(q)) if q == *p => {}
            other => return Some(fail(format!("ineligible position {p} gave {other:?}"))),
        }
    }
    None
}

fn check_normal_form(index: u64, rng: &mut impl Rng, cfg: &GeneratorConfig) -> Option<Counterexample> {
    let f = rng.gen_range(cfg.f_range.0..=cfg.f_range.1);
    let fro = random_frobenius_with(rng, cfg, f);
    let raw = random_raw_with(rng, f, cfg.weight_max);
    let expected = oracle_representable(&raw);
    let result = normalize(&fro, &raw);
    let detail = match (&result, expected) {
        (Ok(n), true) if matches_raw(n, &raw) => return None,
        (Ok(_), true) => "normal form does not span the raw subspaces".to_string(),
        (Err(NormalFormError::NotRepresentable), false) => return None,
        (r, e) => format!("normalize gave {r:?}, oracle says representable = {e}"),
    };
    Some(Counterexample {
        index,
        property: Property::NormalForm,
        instance: InstanceDocument::from_frobenius(&fro).with_raw(&raw),
        other: None,
        detail,
        shrink_steps: 0,
    })
}

/// Runs `n` seeded rounds; each round checks one fresh module against the
/// admissibility and Hodge oracles, one related pair, one monodromy
/// configuration and one raw filtration. Counterexamples come back sorted
/// by round.
pub fn selftest(n: u64, seed: u64, variant: ClosedFormVariant) -> Result<SelfTestReport, SelfTestError> {
    if n == 0 {
        return Err(SelfTestError::EmptyRun);
    }
    let rounds: Vec<(Vec<Property>, Vec<Counterexample>)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let cfg = config(seed, k);
            let mut checked = vec![];
            let mut found = vec![];
            let mut rng = stream(seed, 5 * k);
            if let Ok(m) = generate_module_with(&mut rng, &cfg) {
                checked.push(Property::WeakAdmissibility);
                found.extend(module_counterexample(k, Property::WeakAdmissibility, &m, |x| {
                    admissibility_mismatch(x, variant)
                }));
                checked.push(Property::HodgeTable);
                found.extend(module_counterexample(k, Property::HodgeTable, &m, hodge_mismatch));
            }
            checked.push(Property::Isomorphism);
            found.extend(check_isomorphism(k, &mut stream(seed, 5 * k + 1), &cfg));
            checked.push(Property::Monodromy);
            found.extend(check_monodromy(k, &mut stream(seed, 5 * k + 2), &cfg));
            checked.push(Property::NormalForm);
            found.extend(check_normal_form(k, &mut stream(seed, 5 * k + 3), &cfg));
            (checked, found)
        })
        .collect();
    let mut checks = BTreeMap::new();
    let mut counterexamples = vec![];
    for (c, f) in rounds {
        for p in c {
            *checks.entry(p).or_insert(0) += 1;
        }
        counterexamples.extend(f);
    }
    Ok(SelfTestReport { n, seed, passed: counterexamples.is_empty(), checks, counterexamples })
}
