//! Exact-arithmetic engine for the secondary Hochschild cochain operad and
//! chain comp-module of a triple (A, B, epsilon), with machine verification
//! of the noncommutative differential calculus structure on the pair of
//! (co)homologies.

pub mod calculus;
pub mod classical;
pub mod cyclic;
pub mod engine;
pub mod error;
pub mod field;
pub mod matrix;
pub mod operad;
pub mod suites;
pub mod triangle;
pub mod triple;

pub use calculus::{CohomologyReport, DegreeData, HomologyReport};
pub use engine::{Engine, Mutation, DEFAULT_BUDGET};
pub use error::Error;
pub use field::{Field, Scalar};
pub use matrix::{quotient_dim, Mat, SparseVec, SubspaceBasis};
pub use suites::{verify, SuiteResult, SUITE_NAMES};
pub use triangle::{ChainVector, Cochain, TriangleIndex, TriangleShape};
pub use triple::{builtin, AlgebraSpec, TripleSpec, ValidationReport};
