//! Operator words on concrete finite instances: the special operators, the
//! degree-graded Born expansion, the closed forms of its sixth- and
//! seventh-order remainders and the rearrangements of the resolvent.

mod boxed;
mod checks;
mod graded;
mod instance;
mod special;
mod word;

use thiserror::Error;

pub use boxed::{
    boxed_all, boxed_term, boxed_terms, rearranged, rearranged_closed_forms, refined6, refined7, sum_terms, Term,
};
pub use checks::{
    born7, check_lemma_iteration, check_rearrangements, full_green, identity_suite, partition_check,
    rearrangement_degrees, rel_diff, require_rearrangements, IdentityReport, IdentityRow, BORN_TOL, IDENTITY_TOL,
};
pub use graded::{
    all_stages, born_residual, full_potential, graded_born, potential_pieces, BornResidual, GradedOperator, MAX_DEGREE,
};
pub use instance::{diag, max_abs, scale_cols, scale_rows, ConstantChoice, InstanceConfig, LatticeInstance, Mat};
pub use special::{special_operators, Form, SpecialOps};
pub use word::{admissible_tuple, eval, evaluate_word, Context, Word, STAR_LIMIT};

use crate::kernels::KernelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    #[error("enumeration of {0:e} terms exceeds the limit")]
    TooLarge(f64),
    #[error("degree {0} exceeds the supported maximum of 8")]
    DegreeOverflow(usize),
    #[error("unknown token `{0}` in operator word")]
    UnknownToken(String),
    #[error("malformed operator word `{0}`")]
    MalformedWord(String),
    #[error("rearrangement fails at degree {degree}: residual {residual:e}")]
    RearrangementFailure { degree: usize, residual: f64 },
    #[error("H = H₀ + Ṽ is singular on this instance")]
    Singular,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph calculus: {0}")]
    Graph(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
