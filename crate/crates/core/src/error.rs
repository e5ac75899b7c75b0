use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate series: {0}")]
    DegenerateSeries(String),
    #[error("inner series of a composition must have a zero constant term")]
    CompositionDomain,
    #[error("f vanishes at the origin")]
    ZeroAtOrigin,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("outside the convergence domain: {0}")]
    ConvergenceDomain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("accuracy loss: {0}")]
    AccuracyLoss(String),
    #[error("integrand not integrable to tolerance: {0}")]
    NonIntegrable(String),
    #[error("no bracket: {0}")]
    NoBracket(String),
    #[error("non-monotone: {0}")]
    NonMonotone(String),
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
