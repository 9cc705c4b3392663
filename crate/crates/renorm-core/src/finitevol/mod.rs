//! Finite-volume H_ω = −Δ + Ṽ: assembly, Green's columns, decay fits and
//! the extended state.

mod decay;
mod extended;
mod hamiltonian;
mod lattice;
mod potential;
mod solver;

use thiserror::Error;

use crate::kernels::KernelError;

pub use decay::{
    axis_fit, decay_experiment, decay_survey, survey_fits, survey_sources, DecaySurvey, SourceFit, DECAY_EPSILON,
    PASS_FRACTION,
};
pub use extended::{
    extended_state, extended_sweep, ExtendedStateResult, ExtendedSweep, NeumannTerm, SweepPoint, WOperator,
    NEUMANN_RATIO, SQRT_SPREAD_LIMIT, W_RADIUS,
};
pub use hamiltonian::{
    assemble, assemble_with, ConstantSource, GreenColumn, Hamiltonian, HamiltonianConfig, PdCertificate, GREEN_TOL,
    LANCZOS_STEPS,
};
pub use lattice::{profile, Boundary, BoxGeometry, MAX_SITES};
pub use potential::{
    counterterms, default_r6_radius, r6_diagonal, Counterterms, FreeData, PotentialStage, FREE_RADIUS, R6_RADIUS_MAX,
    R6_WORK_BUDGET,
};
pub use solver::{conjugate_gradient, dot, lanczos_min, norm2, norm_inf, LanczosEstimate, Solve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("box of {0:e} sites exceeds the limit")]
    TooLarge(f64),
    #[error("operator is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Neumann series term {term} shrank only by {ratio}")]
    NeumannDivergence { term: usize, ratio: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
