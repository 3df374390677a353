use std::path::PathBuf;

/// Errors raised by graph construction, certification and the numerical oracles.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters (q = {q}, e = {e}): {reason}")]
    InvalidParams { q: u64, e: u32, reason: String },

    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("Jacobi symbol needs an odd positive modulus, got {0}")]
    EvenModulus(u64),

    #[error("{b} is not coprime to {q}")]
    NotCoprime { b: i64, q: u64 },

    #[error("vertex {vertex} is out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: u64, n: u64 },

    #[error("sets A and B overlap at vertex {0}")]
    OverlappingSets(u64),

    #[error("duplicate point {0} in tuple")]
    DuplicatePoint(u64),

    #[error("t = {t} is out of range: need 1 <= t <= {max}")]
    InvalidT { t: u32, max: u64 },

    #[error("estimated cost {cost:.3e} word-ops exceeds budget {budget:.3e}")]
    BudgetExceeded { cost: f64, budget: f64 },

    #[error("{what} refused: n = {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: u64, cap: u64 },

    #[error("edge probability p = {0} is not in (0, 1)")]
    InvalidProbability(f64),

    #[error("trend needs at least two instances, got {0}")]
    TooFewInstances(usize),

    #[error("trend instances must share e: found e = {0} and e = {1}")]
    MixedExponents(u32, u32),

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
