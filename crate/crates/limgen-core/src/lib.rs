//! Engine for language generation in the limit from noisy enumerations.
//!
//! The pieces: a paired-integer universe with a canonical order, symbolic
//! infinite languages and their exact intersections, noisy closures and the
//! closure dimension with witness search, closure and chain generators,
//! adversarial enumerations, and the refutation pipeline that defeats
//! noise-level-1 generators on the column family.

pub mod checks;
pub mod closure;
pub mod collection;
pub mod dimension;
pub mod enumeration;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod generator;
pub mod lang;
pub mod refute;
pub mod universe;

pub use closure::{
    column_closure, consistent_set, noisy_closure, saturate, ClosureResult, ColumnConsistency,
    ConsistentFamily, SampleSet,
};
pub use collection::{Collection, NamedLanguage};
pub use dimension::{
    closure_dimension, column_family_dimension, shrink_witness, DimensionReport, DimensionVerdict,
    ShrinkBranch,
};
pub use enumeration::{Enumeration, Schedule};
pub use error::Error;
pub use game::{play, settle_time, GameTrace, SettleTime, StepRecord, TraceHeader};
pub use generator::{
    nonuniform_noise_dependent, uniform_noise_dependent, Chain, ChainGenerator, ClosureGenerator,
    Generator, GeneratorStep,
};
pub use lang::{SetDescriptor, SymbolicLanguage};
pub use refute::{
    build_case_language, classify_generator, run_refutation, run_scattered_construction,
    verify_refutation, CaseReport, Classification, ClassifyThresholds, RefutationOutcome,
    RefutationPlan, ScatteredOutcome, VerifyReport,
};
pub use universe::Element;
