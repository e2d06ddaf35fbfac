//! Polynomial algebra: univariate factorization, sparse multivariate
//! polynomials with resultants, binary forms and the plane cubic splitter.

pub mod binary;
pub mod cubic;
pub mod multi;
pub mod parse;
pub mod univariate;

use thiserror::Error;

pub use binary::BinaryForm;
pub use cubic::{split_ternary_cubic, SplittingTag, SplittingType};
pub use multi::{resultant_in, MultiPoly};
pub use univariate::UPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable clash: {0}")]
    VariableClash(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has degree zero in the elimination variable")]
    NotPositiveDegree,
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("input is not a homogeneous cubic")]
    NotCubic,
    #[error("components need a field extension of degree {0}, beyond the allowed bound")]
    ExtensionExceeded(u32),
}
