//! Numerics and exact algebra for the sixth-order renormalization of
//! −Δ + V_ω on Z^d with a decaying Bernoulli potential.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod finitevol;
pub mod graphcalc;
pub mod kernels;
pub mod opalgebra;
pub mod probtools;
