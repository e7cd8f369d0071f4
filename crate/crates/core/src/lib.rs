//! Stability calculus of compactified universal Jacobians over the moduli of
//! marked curves: stability domains, V-functions, degeneracy posets,
//! classical stability conditions and their symmetries.

pub mod crossmaps;
pub mod degposet;
pub mod domain;
pub mod error;
pub mod feasibility;
pub mod json;
pub mod polarization;
pub mod search;
pub mod symmetry;
pub mod vfunction;

pub use domain::{HalfVineType, StabilityDomain};
pub use error::{Error, Result};
pub use vfunction::VFunction;
