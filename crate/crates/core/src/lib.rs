//! Finite-dimensional linear relations (multi-valued linear operators):
//! subspace arithmetic, Arens decomposition, graph projections, Schatten-1
//! norms and a randomized conformance suite for the perturbation identities
//! and inequalities that connect them.

pub mod arens;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod perturbation;
pub mod relation;
pub mod relation_checks;
pub mod report;
pub mod schatten;
pub mod subspace;
pub mod tolerance;

pub use arens::ArensDecomposition;
pub use error::{Error, Result};
pub use matrix::{CMatrix, CVector};
pub use relation::{LinearRelation, OperatorOnSubspace};
pub use report::{CheckReport, Status};
pub use schatten::{BlockOperator, SingularSpectrum};
pub use subspace::Subspace;
pub use tolerance::Tolerances;
