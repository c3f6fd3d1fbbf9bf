//! Exact arithmetic in free associative algebras over ℚ.

mod alphabet;
mod derivation;
mod poly;
mod scalar;
mod text;
mod word;

pub use alphabet::{Alphabet, GeneratorId, Kind, MAX_GENERATORS};
pub use derivation::{derive, make_inner_derivation, Derivation};
pub(crate) use poly::same_alphabet;
pub use poly::{commutator, poly_mul, FreePoly};
pub use scalar::{ParseScalarError, Scalar};
pub use word::{Word, MAX_WORD_LEN};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },
    #[error("generator {0} is not in the alphabet")]
    UnknownGenerator(String),
    #[error("derivation has no image for generator {0}")]
    MissingImage(String),
    #[error("word of length {0} exceeds the maximum of {max}", max = MAX_WORD_LEN)]
    WordTooLong(usize),
    #[error("alphabet of {0} generators exceeds the maximum of {max}", max = MAX_GENERATORS)]
    AlphabetTooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
