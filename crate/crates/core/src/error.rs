use thiserror::Error;

/// Error type shared by every module of the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two operands live in different rings (different prime, coefficient
    /// domain, or an illegal coercion direction).
    #[error("ring mismatch: {0}")]
    DomainMismatch(String),

    /// A stated precondition of the operation does not hold for the input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The element has no inverse in the integral group ring.
    #[error("not a unit")]
    NotAUnit,

    /// r² + s² = −1 has no solution in Z[ε_p]: the multiplicative order of 2
    /// modulo p is odd, so the split 2×2 representation does not exist.
    #[error("no solution for p = {p}: the multiplicative order of 2 modulo p is odd")]
    NoSolution { p: u64 },

    /// The staged search ran out of configured stages without a hit.
    /// Does not occur for the supported desk-scale range of p.
    #[error("search exhausted for p = {p} without finding (r, s)")]
    SearchExhausted { p: u64 },

    /// Jordan decomposition was requested for a semisimple unit
    /// (its nilpotent part would be zero).
    #[error("input is semisimple: the nilpotent part is zero")]
    SemisimpleInput,

    /// The unit is not normalized: h₁(t) − h_z(t) ≠ 1.
    #[error("unit is not normalized: h1(t) - hz(t) != 1")]
    NotInV,

    /// Operation is specific to one prime.
    #[error("operation requires p = {expected}, got p = {got}")]
    WrongPrime { expected: u64, got: u64 },

    /// A branch of a published formula whose printed form is ambiguous;
    /// transcribed literally but refused at runtime.
    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
