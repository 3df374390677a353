//! Quadratic unitary Cayley graphs `G_{q^e}` over `Z/q^e` for primes
//! `q = 1 (mod 4)` and odd `e`: construction, t-existential-closure
//! certification, the exact Gauss-sum spectrum and pseudo-randomness
//! measurements.

pub mod bitset;
pub mod cayley;
pub mod ec_check;
pub mod error;
pub mod number_theory;
pub mod pseudorandom;
pub mod spectrum;

pub use bitset::Bitset;
pub use cayley::{build_graph, CayleyGraph};
pub use ec_check::{
    brute_force_ec, char_sums, extender, find_least_q1, forbidden_set, sufficient_condition,
    verify_weil_bound, BruteForceOptions, CharSumReport, Counterexample, EcCertificate, Method,
    WeilCheck,
};
pub use error::{Error, Result};
pub use number_theory::{GraphParams, QuadraticCharacter};
pub use pseudorandom::{FamilyTrendReport, MixingSample, MixingScan, QuasiRandomStats};
pub use spectrum::{ExactEigenvalue, SpectrumReport};
