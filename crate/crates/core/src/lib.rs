//! Rank-3 filtered (φ,N)-modules over an unramified extension of degree f,
//! with diagonal Frobenius whose eigenvalue norms are distinct.
//!
//! All arithmetic is exact. Every closed-form criterion has an independent
//! oracle built from explicit subspaces and linear algebra.

pub mod admissibility;
pub mod coeff;
pub mod generate;
pub mod instance;
pub mod isomorphism;
pub mod linalg;
pub mod monodromy;
pub mod normalform;
pub mod phimodule;
pub mod selftest;
pub mod tauvec;

pub use admissibility::{
    check_weak_admissibility, check_weak_admissibility_with, is_irreducible, oracle_hodge_invariant,
    oracle_weak_admissibility, AdmissibilityReport, ClosedFormVariant, Slack,
};
pub use generate::{generate, generate_module, GenerateError, GeneratorConfig, Target};
pub use instance::{InstanceDocument, InstanceError};
pub use isomorphism::{
    are_isomorphic, find_witness, oracle_isomorphic, validate_witness, EigenPermutation, IsoDecision, IsoError,
    IsoSummary, IsoWitness,
};
pub use monodromy::{
    admissible_positions, build_monodromy, solve_entry, validate_monodromy, MonodromyError, MonodromyValidation,
    Position,
};
pub use coeff::{format_scalar, parse_scalar, vp, Scalar, Valuation};
pub use normalform::{
    filtration_subspaces, normalize, oracle_representable, NormalFormError, Normalized, RawEmbedding, RawFiltration,
};
pub use phimodule::{
    classify_embeddings, has_distinct_eigenvalues, hodge_invariant, newton_invariant, weights, Classification,
    EmbeddingFiltration, FiltrationKind, FrobeniusData, ModelError, PhiModule, SubmoduleId,
};
pub use selftest::{selftest, Counterexample, Property, SelfTestError, SelfTestReport};
pub use tauvec::{frobenius_shift, matrix_norm, norm, norm_valuation, TauMatrix, TauVector};
