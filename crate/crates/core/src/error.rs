//! Crate-wide error type.

use alloc::string::String;

/// Everything that can go wrong in this crate.
///
/// Numerical routines never panic on bad input; they return one of
/// these. `NonConvergence` carries the partial sum so a caller that can
/// tolerate reduced accuracy may still use it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// A series or iteration hit its term budget before the tolerance.
    #[error("no convergence after {terms} terms, partial sum {partial}")]
    NonConvergence { partial: f64, terms: u32 },
    /// An intermediate value exceeded f64 range.
    #[error("overflow: {0}")]
    Overflow(&'static str),
    /// A rate function failed validation.
    #[error("invalid rate: {0}")]
    InvalidRate(&'static str),
    /// A process spec failed validation.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    /// A scalar parameter lies outside its documented range.
    #[error("out of range: {0}")]
    OutOfRange(&'static str),
    /// An estimator was handed fewer samples than it needs.
    #[error("too few samples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
    /// `verify::run_check` got a name it does not know.
    #[error("unknown check: {0}")]
    UnknownCheck(String),
    /// The operation is not defined for this process variant.
    #[error("unsupported variant: {0}")]
    UnsupportedVariant(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
