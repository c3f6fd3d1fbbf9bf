//! Exact noncommutative algebra for commutation-relation experiments.

pub mod free_algebra;

pub use free_algebra::{Alphabet, FreePoly, GeneratorId, Scalar, Word};
pub mod dehn;
pub mod identities;
pub mod lab;
pub mod ncgb;
pub mod relation_sets;
pub mod series;
pub mod symfun;
