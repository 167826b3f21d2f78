//! Seeded generators, the conformance suite, worked examples and pair
//! verification.

mod config;
mod demo;
mod generate;
mod suite;
mod verify;

pub use config::{GeneratorConfig, RelationClass};
pub use demo::{run_demo, DemoOutcome, DEMO_NAMES};
pub use generate::{
    gaussian, generic_relation, hermitian_relation_on, random_additive, random_gamma_triple, random_hermitian,
    random_operator_on, random_relation, random_subspace, random_subspace_in, self_adjoint_relation, trial_rng,
    AdditiveVariant, TrialRng,
};
#[cfg(feature = "parallel")]
pub use suite::run_suite_parallel;
pub use suite::{
    run_suite, run_suite_sequential, run_trial, try_run_trial, CheckTally, ConformanceReport, Summary, TrialResult,
    BLOCK_PROBES, BLOCK_SLACK, RESOLVENT_POINTS, SCHEMA_VERSION,
};
pub use verify::{verify_pair, PairReport};
