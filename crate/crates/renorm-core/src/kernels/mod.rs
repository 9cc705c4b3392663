//! Lattice Green's kernels of −Δ + m², the constants σ, ρ, η, the derived
//! kernels of the renormalization, and numerical checks of the power-law
//! decay and summation bounds.

mod constants;
mod fit;
mod green;
mod lemmas;
mod orthant;
mod special;

use thiserror::Error;

pub use constants::{cube_tail_bound, derived_kernels, renorm_constants, DerivedKernels, RenormConstants, TAIL_LIMIT};
pub use fit::{decay_fit, DecayFit};
pub use green::{
    free_green, laplacian_symbol, torus_extrapolated, torus_green, torus_green_projected, Geometry, GreenKernel,
    FREE_TOL,
};
pub use lemmas::{
    convolution_lemma, difference_lemma, weighted_convolution_lemma, LemmaProbe, LemmaReport, DEFAULT_SPREAD,
};
pub use orthant::{EvenTransform, Orthant};
pub use special::{gauss_legendre, scaled_bessel_i};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("massless free kernel needs d ≥ 3, got d = {0}")]
    DimensionTooSmall(usize),
    #[error("quadrature did not reach tolerance: {0}")]
    QuadratureFailure(String),
    #[error("torus Laplacian is singular without a mass")]
    SingularOperator,
    #[error("tail Σ|G|³ beyond the box bounded by {bound:e}, above {limit:e}")]
    TailTooLarge { bound: f64, limit: f64 },
    #[error("fewer than four distinct radii or a zero value ({0} points)")]
    InsufficientData(usize),
    #[error("lemma parameters out of range: {0}")]
    ParameterViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Values of |kernel| along the first axis for r in the window.
pub fn axis_points(values: &Orthant, window: (usize, usize)) -> Vec<(f64, f64)> {
    (window.0..=window.1.min(values.side - 1))
        .map(|r| {
            let mut c = vec![0; values.d];
            c[0] = r;
            (r as f64, values.get(&c))
        })
        .collect()
}
