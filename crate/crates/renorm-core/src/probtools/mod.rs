//! Bernoulli sign fields and exact checks of the hypercontractive moment
//! inequalities behind the starred (admissible) sums.

mod boolean;
mod khintchine;
mod omega;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use boolean::{
    bonami_check, bonami_suite, cube_moment, exact_moment, moment_equivalence_check, random_poly, walsh_hadamard,
    BonamiOutcome, BonamiReport, BonamiTrial, BooleanPoly, MomentOutcome, MAX_EXACT_VARIABLES,
};
pub use khintchine::{
    diagonal_witness, khintchine_check, khintchine_suite, ChainWeights, EmpiricalConstant, KhintchineOutcome,
    KhintchineReport, Mode, NegativeControl, Restriction, MAX_EXACT_SITES, S2_P2_BOUND, TUPLE_LIMIT,
};
pub use omega::{omega_at, sample_omega, OmegaField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("{0} variables exceed the exact-enumeration limit of 20")]
    TooManyVariables(usize),
    #[error("enumeration of {0:e} terms exceeds the limit")]
    TooLarge(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Generator for the random test objects of a suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
