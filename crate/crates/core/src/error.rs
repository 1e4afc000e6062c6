use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("quadrature tolerance {tolerance:e} not met (achieved {achieved:e})")]
    ToleranceNotMet { tolerance: f64, achieved: f64 },

    #[error("normalization overflow for levels ({n}, {k})")]
    Overflow { n: usize, k: usize },

    #[error("no root of g(u) found for level {level} at eps = {eps}")]
    NoRoot { level: usize, eps: f64 },

    #[error("bracketed quantity of the frequency equation is not positive (Re B = {re_b:e})")]
    NegativeBracket { re_b: f64 },

    #[error("branch inconsistency: {0}")]
    BranchInconsistency(String),

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: String, lo: f64, hi: f64 },

    #[error("QR iteration did not converge after {iterations} iterations")]
    QrNonConvergence { iterations: usize },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("reference solve did not converge for levels {levels:?}")]
    ReferenceNonConvergence { levels: Vec<usize> },
}

pub type Result<T> = std::result::Result<T, Error>;
