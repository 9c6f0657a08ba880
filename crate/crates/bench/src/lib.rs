//! Shared fixtures for the benchmarks.

use phimod_core::generate::{
    generate_module_with, monodromy_frobenius_with, random_frobenius_with, random_raw_with, related_pair_with, stream,
    GeneratorConfig,
};
use phimod_core::monodromy::Position;
use phimod_core::{FrobeniusData, PhiModule, RawFiltration, Scalar};

const SEED: u64 = 17;

fn config(f: usize) -> GeneratorConfig {
    GeneratorConfig { seed: SEED, f_range: (f, f), ..Default::default() }
}

pub fn module(f: usize) -> PhiModule {
    generate_module_with(&mut stream(SEED, f as u64), &config(f)).expect("unconstrained target")
}

pub fn pair(f: usize) -> (PhiModule, PhiModule) {
    related_pair_with(&mut stream(SEED + 1, f as u64), &config(f)).expect("unconstrained target")
}

pub fn raw(f: usize) -> (FrobeniusData, RawFiltration) {
    let cfg = config(f);
    let mut rng = stream(SEED + 2, f as u64);
    let fro = random_frobenius_with(&mut rng, &cfg, f);
    (fro, random_raw_with(&mut rng, f, cfg.weight_max))
}

pub fn monodromy(f: usize) -> (FrobeniusData, Vec<(Position, Scalar)>) {
    let (fro, positions) = monodromy_frobenius_with(&mut stream(SEED + 3, f as u64), &config(f));
    let entries = positions.into_iter().map(|p| (p, Scalar::from_integer(2.into()))).collect();
    (fro, entries)
}
