//! Seeded random instances: modules, raw filtrations, isomorphic and
//! near-isomorphic pairs, and Frobenius data with eligible monodromy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::admissibility::check_weak_admissibility;
use crate::coeff::{frac, int, is_prime, pow_int, Scalar};
use crate::instance::InstanceDocument;
use crate::isomorphism::{push_forward, ALL_PERMUTATIONS};
use crate::monodromy::Position;
use crate::normalform::{normalize, RawEmbedding, RawFiltration};
use crate::phimodule::{hodge_invariant, EmbeddingFiltration, FrobeniusData, PhiModule, SubmoduleId};
use crate::tauvec::TauVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[default]
    Any,
    Admissible,
    Irreducible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Inclusive range of f.
    pub f_range: (usize, usize),
    pub weight_max: u32,
    /// Inclusive range of the p-exponent of each eigenvector coordinate.
    pub exponent_range: (u32, u32),
    /// Relative frequencies of F0, F1, F2, F3.
    pub type_weights: [u32; 4],
    pub target: Target,
    pub primes: Vec<u64>,
    /// Valuation draws tried before giving up on a target.
    pub max_retries: u32,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            f_range: (1, 4),
            weight_max: 6,
            exponent_range: (0, 12),
            type_weights: [1, 1, 1, 1],
            target: Target::Any,
            primes: vec![3, 5, 7],
            max_retries: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("target {target:?} not reached after {retries} valuation draws")]
    TargetUnreachable { target: Target, retries: u32 },
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |s: &str| Err(GenerateError::InvalidConfig(s.to_string()));
        if self.f_range.0 == 0 || self.f_range.0 > self.f_range.1 {
            return bad("f range must be nonempty and start at 1 or more");
        }
        if self.weight_max == 0 {
            return bad("weight_max must be at least 1");
        }
        if self.exponent_range.0 > self.exponent_range.1 {
            return bad("exponent range is empty");
        }
        if self.effective_type_weights().iter().all(|&w| w == 0) {
            return bad("no filtration type can be drawn");
        }
        if self.primes.is_empty() || self.primes.iter().any(|&p| p == 2 || !is_prime(p)) {
            return bad("primes must be a nonempty list of odd primes");
        }
        Ok(())
    }

    /// F0 needs two distinct positive weights.
    fn effective_type_weights(&self) -> [u32; 4] {
        let mut w = self.type_weights;
        if self.weight_max < 2 {
            w[0] = 0;
        }
        w
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Deterministic sub-stream `index` of `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A rational `±n/d` with `n, d` in 1..=9 and prime to p.
fn unit(rng: &mut impl Rng, p: u64) -> Scalar {
    loop {
        let n = rng.gen_range(1..=9i64);
        let d = rng.gen_range(1..=9i64);
        if n as u64 % p == 0 || d as u64 % p == 0 {
            continue;
        }
        let s = frac(n, d);
        return if rng.gen_bool(0.5) { s } else { -s };
    }
}

/// Values chosen so that the special relations between parameters of two
/// modules come up often.
const SPECIAL_X1: [(i64, i64); 8] = [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-1, 2), (-2, 1), (3, 1)];

fn parameter(rng: &mut impl Rng) -> Scalar {
    if rng.gen_bool(0.7) {
        let (n, d) = *SPECIAL_X1.choose(rng).expect("nonempty");
        frac(n, d)
    } else {
        frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))
    }
}

fn random_filtration(rng: &mut impl Rng, cfg: &GeneratorConfig) -> EmbeddingFiltration {
    let w = cfg.effective_type_weights();
    let total: u32 = w.iter().sum();
    let mut pick = rng.gen_range(0..total);
    let mut kind = 0;
    while pick >= w[kind] {
        pick -= w[kind];
        kind += 1;
    }
    let k = rng.gen_range(1..=cfg.weight_max);
    match kind {
        0 => {
            let k1 = rng.gen_range(1..cfg.weight_max);
            let k2 = rng.gen_range(k1 + 1..=cfg.weight_max);
            EmbeddingFiltration::F0 { k1, k2, x1: parameter(rng), x2: rng.gen(), x2p: rng.gen() }
        }
        1 => EmbeddingFiltration::F1 { k, x2: rng.gen(), x2p: rng.gen() },
        2 => EmbeddingFiltration::F2 { k, x1: rng.gen(), x2pp: rng.gen() },
        _ => EmbeddingFiltration::F3,
    }
}

/// Splits `total` into f exponents within the configured range.
fn spread(rng: &mut impl Rng, total: u32, f: usize, range: (u32, u32)) -> Vec<u32> {
    let mut e = vec![range.0; f];
    let mut left = total - range.0 * f as u32;
    while left > 0 {
        let i = rng.gen_range(0..f);
        if e[i] < range.1 {
            e[i] += 1;
            left -= 1;
        }
    }
    e
}

/// Eigenvectors with the given exponent profiles and random units, redrawn
/// until the three norms are distinct.
fn frobenius_from_exponents(rng: &mut impl Rng, p: u64, exps: &[Vec<u32>; 3]) -> FrobeniusData {
    loop {
        let v: Vec<TauVector> = exps
            .iter()
            .map(|es| TauVector::new(es.iter().map(|&e| pow_int(p, e) * unit(rng, p)).collect()).expect("f >= 1"))
            .collect();
        let [a, b, c]: [TauVector; 3] = v.try_into().expect("three");
        if let Ok(fro) = FrobeniusData::new(p, a, b, c) {
            return fro;
        }
    }
}

fn norm_valuation_triple(rng: &mut impl Rng, total: u32, lo: u32, hi: u32) -> Option<[u32; 3]> {
    if total < 3 * lo || total > 3 * hi {
        return None;
    }
    let x = rng.gen_range(lo..=hi.min(total - 2 * lo));
    let rest = total - x;
    if rest < 2 * lo || rest > 2 * hi {
        return None;
    }
    let y = rng.gen_range(lo.max(rest.saturating_sub(hi))..=hi.min(rest - lo));
    let mut t = [x, y, rest - y];
    t.shuffle(rng);
    Some(t)
}

pub fn generate_module_with(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Result<PhiModule, GenerateError> {
    cfg.validate()?;
    let f = rng.gen_range(cfg.f_range.0..=cfg.f_range.1);
    let p = *cfg.primes.choose(rng).expect("nonempty");
    let filt: Vec<EmbeddingFiltration> = (0..f).map(|_| random_filtration(rng, cfg)).collect();
    let (lo, hi) = cfg.exponent_range;
    let random_exps = |rng: &mut _| -> [Vec<u32>; 3] {
        std::array::from_fn(|_| (0..f).map(|_| Rng::gen_range(rng, lo..=hi)).collect())
    };
    if cfg.target == Target::Any {
        let exps = random_exps(rng);
        let fro = frobenius_from_exponents(rng, p, &exps);
        return Ok(PhiModule::new(fro, filt).expect("valid by construction"));
    }
    // Admissibility depends only on the three norm valuations, so draw those
    // with the right total and test before choosing units.
    let probe = frobenius_from_exponents(rng, p, &[vec![0; f], vec![0; f], vec![0; f]]);
    let total = hodge_invariant(&PhiModule::new(probe, filt.clone()).expect("valid"), SubmoduleId::Full) as u32;
    let (flo, fhi) = (lo * f as u32, hi * f as u32);
    for _ in 0..cfg.max_retries {
        let Some(v) = norm_valuation_triple(rng, total, flo, fhi) else {
            break;
        };
        let exps: [Vec<u32>; 3] = std::array::from_fn(|k| spread(rng, v[k], f, (lo, hi)));
        let fro = frobenius_from_exponents(rng, p, &exps);
        let m = PhiModule::new(fro, filt.clone()).expect("valid");
        let r = check_weak_admissibility(&m);
        let hit = match cfg.target {
            Target::Admissible => r.admissible,
            Target::Irreducible => r.irreducible,
            Target::Any => true,
        };
        if hit {
            return Ok(m);
        }
    }
    Err(GenerateError::TargetUnreachable { target: cfg.target, retries: cfg.max_retries })
}

pub fn generate_module(cfg: &GeneratorConfig) -> Result<PhiModule, GenerateError> {
    generate_module_with(&mut cfg.rng(), cfg)
}

pub fn generate(cfg: &GeneratorConfig) -> Result<InstanceDocument, GenerateError> {
    generate_module(cfg).map(|m| InstanceDocument::from_module(&m))
}

fn random_h(rng: &mut impl Rng, p: u64, f: usize) -> [TauVector; 3] {
    std::array::from_fn(|_| TauVector::new((0..f).map(|_| unit(rng, p)).collect()).expect("f >= 1"))
}

/// `m` and its transport along a random monomial map, brought back to
/// normal form.
pub fn isomorphic_pair_with(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Result<(PhiModule, PhiModule), GenerateError> {
    let m = generate_module_with(rng, cfg)?;
    let sigma = *ALL_PERMUTATIONS.choose(rng).expect("nonempty");
    let h = random_h(rng, m.p(), m.f());
    let (fro, raw) = push_forward(&m, &sigma, &h);
    let n = normalize(&fro, &raw).expect("a monomial image is representable");
    Ok((m, n.module))
}

/// Like [`isomorphic_pair_with`], but each embedding of the second module
/// keeps the transported filtration only with probability one half and is
/// otherwise redrawn with the same type and weights. Norms always match
/// under some permutation, so both answers occur.
pub fn related_pair_with(rng: &mut impl Rng, cfg: &GeneratorConfig) -> Result<(PhiModule, PhiModule), GenerateError> {
    let (m, n) = isomorphic_pair_with(rng, cfg)?;
    let filt = n
        .filtrations()
        .iter()
        .map(|e| {
            if rng.gen_bool(0.5) {
                return e.clone();
            }
            match e {
                EmbeddingFiltration::F0 { k1, k2, .. } => {
                    EmbeddingFiltration::F0 { k1: *k1, k2: *k2, x1: parameter(rng), x2: rng.gen(), x2p: rng.gen() }
                }
                EmbeddingFiltration::F1 { k, .. } => EmbeddingFiltration::F1 { k: *k, x2: rng.gen(), x2p: rng.gen() },
                EmbeddingFiltration::F2 { k, .. } => EmbeddingFiltration::F2 { k: *k, x1: rng.gen(), x2pp: rng.gen() },
                EmbeddingFiltration::F3 => EmbeddingFiltration::F3,
            }
        })
        .collect();
    let n = PhiModule::new(n.frobenius().clone(), filt).expect("same shape");
    Ok((m, n))
}

fn small_entry(rng: &mut impl Rng) -> Scalar {
    if rng.gen_bool(0.4) {
        int(0)
    } else {
        int(rng.gen_range(-2..=2))
    }
}

/// Raw generator data; small entries with many zeros so that pivots
/// vanish and permutations are needed.
pub fn random_raw_with(rng: &mut impl Rng, f: usize, weight_max: u32) -> RawFiltration {
    (0..f)
        .map(|_| {
            let k2 = rng.gen_range(0..=weight_max);
            let k1 = rng.gen_range(0..=k2);
            if k2 == 0 {
                return RawEmbedding { k1, k2, u: None, v: None, line: None };
            }
            let (u, v) = loop {
                let u: [Scalar; 3] = std::array::from_fn(|_| small_entry(rng));
                let v: [Scalar; 3] = std::array::from_fn(|_| small_entry(rng));
                if crate::linalg::rank(&[u.to_vec(), v.to_vec()]) == 2 {
                    break (u, v);
                }
            };
            let line = (k2 > k1).then(|| loop {
                let (l, m) = (small_entry(rng), small_entry(rng));
                if l != int(0) || m != int(0) {
                    break (l, m);
                }
            });
            RawEmbedding { k1, k2, u: Some(u), v: Some(v), line }
        })
        .collect()
}

pub fn random_frobenius_with(rng: &mut impl Rng, cfg: &GeneratorConfig, f: usize) -> FrobeniusData {
    let p = *cfg.primes.choose(rng).expect("nonempty");
    let (lo, hi) = cfg.exponent_range;
    let exps: [Vec<u32>; 3] = std::array::from_fn(|_| (0..f).map(|_| rng.gen_range(lo..=hi)).collect());
    frobenius_from_exponents(rng, p, &exps)
}

/// Frobenius data with one or two eligible monodromy positions forming a
/// chain in one shape, plus the chosen positions.
pub fn monodromy_frobenius_with(rng: &mut impl Rng, cfg: &GeneratorConfig) -> (FrobeniusData, Vec<Position>) {
    let f = rng.gen_range(cfg.f_range.0..=cfg.f_range.1);
    let p = *cfg.primes.choose(rng).expect("nonempty");
    let chain = *ALL_PERMUTATIONS.choose(rng).expect("nonempty");
    let two = rng.gen_bool(0.5);
    loop {
        // Nm(next) = p^f Nm(prev): multiply each coordinate by p and a unit,
        // closing the last coordinate so the units have norm one.
        let step = |rng: &mut _, prev: &TauVector| -> TauVector {
            let mut units: Vec<Scalar> = (0..f).map(|_| unit(rng, p)).collect();
            let prod = units[..f - 1].iter().fold(int(1), |acc, x| acc * x);
            units[f - 1] = int(1) / prod;
            let pf = int(p as i64);
            TauVector::new((0..f).map(|i| prev.get(i) * &pf * &units[i]).collect()).expect("f >= 1")
        };
        let mut eig: [Option<TauVector>; 3] = [None, None, None];
        let first = TauVector::new((0..f).map(|_| unit(rng, p)).collect()).expect("f >= 1");
        let second = step(rng, &first);
        let third = if two {
            step(rng, &second)
        } else {
            TauVector::new((0..f).map(|_| pow_int(p, rng.gen_range(0..=3)) * unit(rng, p)).collect()).expect("f >= 1")
        };
        eig[chain[0]] = Some(first);
        eig[chain[1]] = Some(second);
        eig[chain[2]] = Some(third);
        let [a, b, c] = eig.map(|e| e.expect("filled"));
        if let Ok(fro) = FrobeniusData::new(p, a, b, c) {
            let mut positions = vec![Position { row: chain[0], col: chain[1] }];
            if two {
                positions.push(Position { row: chain[1], col: chain[2] });
            }
            return (fro, positions);
        }
    }
}
