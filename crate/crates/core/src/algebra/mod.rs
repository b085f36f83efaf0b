//! Exact linear algebra over ℚ and over polynomial rings.

pub mod matrix;
pub mod poly;
pub mod polymatrix;
pub mod rational;

use thiserror::Error;

pub use matrix::RationalMatrix;
pub use poly::{MultiPoly, SignProfile, Vars};
pub use polymatrix::{Minor, PolyMatrix};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable lists differ: {0}")]
    VariableMismatch(String),
    #[error("matrix with {0} columns exceeds the 64-column limit of the minor engine")]
    TooLarge(usize),
}
