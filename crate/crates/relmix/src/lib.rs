//! Length functions of multigraded algebra pairs over prime fields: relative
//! mixed multiplicities, mixed Buchsbaum-Rim multiplicities, their
//! stabilization and decomposition identities, finiteness and birationality
//! verdicts for the associated morphism, and projective degrees of rational
//! maps. Ships a line-oriented problem DSL, a JSON-emitting CLI, and an
//! independent brute-force verifier.

pub mod degree;
pub mod error;
pub mod field;
pub mod frontend;
pub mod gring;
pub mod hilbert;
pub mod maps;
pub mod multiplicity;
pub mod oracle;
pub mod par;

pub use degree::Multidegree;
pub use error::{Error, Result};
