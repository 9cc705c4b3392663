//! Characteristic-graph calculus: which Born-series tuples survive, with what
//! coefficient, and which diagonal counterterms the renormalized potential needs.

mod offsets;
mod pattern;
mod poly;
mod source;
mod tables;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use offsets::{
    c6_patterns, pattern_words, verify_offset_order6, verify_offset_order7, verify_offsets,
    verify_offsets_with_eta_shift, LinComb, Node, OffsetReport, OffsetsSummary, Promotion, Tok, Word,
};
pub use pattern::{
    admissible, cancels, compositions, sequence_label, CharGraph, Edge, GraphError, Species, TuplePattern,
};
pub use poly::{CoeffPoly, Monomial, PolyParseError, Rational};
pub use source::{born_source_terms, coefficient_of, sixth_order_counterterm, stages, SourceTerm, Stage, StageSpec};
pub use tables::{
    coefficient_table, coefficient_tables, published_rows_partition_compositions, sequence_coefficient,
    sources_for_order, stages_for_order, TableRow,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphCalcError {
    #[error("expansion order {0} is outside the supported range")]
    OrderOutOfRange(usize),
    #[error("graph of order {graph} compared with a source word of order {word}")]
    LengthMismatch { graph: usize, word: usize },
    #[error("coefficient table differs from the published rows: {0:?}")]
    TableMismatch(Vec<String>),
    #[error("offset bookkeeping left a residual: {0}")]
    OffsetFailure(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Counterterm of a given order and the non-random operators left behind.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RenormReport {
    pub order: usize,
    /// Coefficient of v^order in the counterterm.
    pub scalar: CoeffPoly,
    /// Named diagonal operators in the counterterm with their coefficients.
    pub diagonal_operators: Vec<(String, CoeffPoly)>,
    /// Non-random operator words remaining in the Born expansion.
    pub leftovers: Vec<(String, CoeffPoly)>,
}

impl RenormReport {
    pub fn counterterm(&self) -> String {
        let mut parts = vec![format!("({})*v^{}", self.scalar, self.order)];
        for (name, c) in &self.diagonal_operators {
            parts.push(format!("({c})*{name}"));
        }
        parts.join(" + ")
    }
}

/// Counterterm bookkeeping at order 2, 4 or 6. The diagonal part collects
/// the all-solid graph, the diagonal shed by M₄ = M + (σ³−ρ) in every W₄-type
/// pattern and, at order 6, η from C₆ = C + ηv⁶.
pub fn renormalization_report(order: usize) -> Result<RenormReport, GraphCalcError> {
    let sources = sources_for_order(order)?;
    let coef = |labels: &[u8]| coefficient_of(&TuplePattern::new(labels).graph(), &sources);
    let w_shift = CoeffPoly::parse("s^3-r").expect("static");
    let all_solid = sequence_coefficient(&[order], &sources)?;
    match order {
        2 => Ok(RenormReport { order, scalar: all_solid, diagonal_operators: vec![], leftovers: vec![] }),
        4 => {
            let c = coef(&[0, 1, 0, 1])?;
            Ok(RenormReport {
                order,
                scalar: all_solid + &c * &w_shift,
                diagonal_operators: vec![],
                leftovers: vec![("G0WG0".into(), c)],
            })
        }
        6 => {
            // Two-vertex patterns v²M₄v⁴ and v⁴M₄v²: each sheds (σ³−ρ)v⁶.
            let w_patterns: [&[u8]; 4] =
                [&[0, 1, 0, 1, 1, 1], &[1, 0, 1, 1, 1, 0], &[0, 1, 1, 1, 0, 1], &[1, 1, 1, 0, 1, 0]];
            let mut scalar = all_solid;
            let mut wv = CoeffPoly::zero();
            for p in w_patterns {
                let c = coef(p)?;
                scalar = scalar + &c * &w_shift;
                wv = wv + c;
            }
            let mut c6 = CoeffPoly::zero();
            for p in c6_patterns() {
                let c = coefficient_of(&p.graph(), &sources)?;
                scalar = scalar + &c * &CoeffPoly::eta();
                c6 = c6 + c;
            }
            let r6_1 = coef(&[0, 1, 1, 1, 1, 0])?;
            let r6_2 = coef(&[0, 1, 2, 1, 2, 0])?;
            let half = CoeffPoly::constant(Rational::new(1, 2));
            Ok(RenormReport {
                order,
                scalar,
                diagonal_operators: vec![("R6_1".into(), r6_1), ("R6_2".into(), r6_2)],
                leftovers: vec![("G0CG0".into(), c6), ("G0v2WG0".into(), &wv * &half), ("G0Wv2G0".into(), &wv * &half)],
            })
        }
        _ => Err(GraphCalcError::OrderOutOfRange(order)),
    }
}
