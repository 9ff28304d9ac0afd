// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid lattice constructor: {0}")]
    BadConstructor(String),
    #[error("degenerate lattice (determinant zero)")]
    Degenerate,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not negative definite")]
    NotDefinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("inconsistent finite quadratic form: {0}")]
    BadForm(String),
    #[error("forms are not anti-isometric")]
    NotAntiIsometric,
    #[error("gluing failed: {0}")]
    Glue(String),
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown fiber type `{0}`")]
    UnknownFiber(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("genus mismatch: {0}")]
    GenusMismatch(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
