use thiserror::Error;

use crate::scalar::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision exhausted: need order {needed}, only {available} is known")]
    PrecisionExhausted {
        needed: Rational,
        available: Rational,
    },

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("divisor is not monic")]
    NotMonic,

    #[error("ring context mismatch: {0}")]
    ContextMismatch(String),

    #[error("coefficient of degree {degree} has negative order {ord}")]
    NegativeOrder { degree: usize, ord: Rational },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("numerically singular elimination: {0}")]
    SingularElimination(String),

    /// The residue of `g` and the `n`-th twist of the residue of `h` share a root.
    #[error("twist coprimality fails at n = {n} (twisted residue {witness})")]
    TwistCoprimeFailed { n: u64, witness: String },

    #[error("no residue root yields a proper orbit split: {0}")]
    NoSplittingRoot(String),

    /// A coefficient equation has a vanishing multiplier but nonzero forcing
    /// term at the exponent `q` of `x`.
    #[error("obstruction at exponent {q}")]
    Obstruction { q: Rational },

    #[error("{kind} budget exhausted after {spent}")]
    Budget { kind: &'static str, spent: u64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    /// True for failures that are mathematical obstructions rather than
    /// usage or numerical problems.
    pub fn is_obstruction(&self) -> bool {
        matches!(
            self,
            Error::TwistCoprimeFailed { .. } | Error::Obstruction { .. }
        )
    }
}
