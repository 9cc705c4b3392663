//! Coefficient tables of the sixth- and seventh-order remainders, computed by
//! the graph calculus and compared with the published rows.

use serde::{Deserialize, Serialize};

use super::pattern::{compositions, sequence_label, CharGraph, Edge, Species, TuplePattern};
use super::poly::CoeffPoly;
use super::source::{born_source_terms, coefficient_of, stages, SourceTerm, Stage};
use super::GraphCalcError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub class: String,
    pub coefficient: CoeffPoly,
    pub published: CoeffPoly,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.coefficient == self.published
    }
}

/// Stages active when the order-`k` remainder is expanded.
pub fn stages_for_order(k: usize) -> Vec<Stage> {
    match k {
        0..=2 => vec![Stage::V],
        3..=4 => vec![Stage::V, Stage::Sigma2],
        5..=6 => vec![Stage::V, Stage::Sigma2, Stage::Rho4],
        _ => vec![Stage::V, Stage::Sigma2, Stage::Rho4, Stage::C6, Stage::R6],
    }
}

pub fn sources_for_order(k: usize) -> Result<Vec<SourceTerm>, GraphCalcError> {
    born_source_terms(k, &stages(&stages_for_order(k)))
}

/// Coefficient of the complete graph with component sequence `seq`.
pub fn sequence_coefficient(seq: &[usize], sources: &[SourceTerm]) -> Result<CoeffPoly, GraphCalcError> {
    coefficient_of(&CharGraph::from_sequence(seq), sources)
}

enum Classes {
    Seqs(&'static [&'static [usize]]),
    Perms(&'static [usize]),
    OnlyOnesAndTwos,
}

impl Classes {
    fn expand(&self, order: usize) -> Vec<Vec<usize>> {
        match self {
            Classes::Seqs(list) => list.iter().map(|s| s.to_vec()).collect(),
            Classes::Perms(multiset) => {
                let mut key = multiset.to_vec();
                key.sort_unstable();
                compositions(order)
                    .into_iter()
                    .filter(|c| {
                        let mut s = c.clone();
                        s.sort_unstable();
                        s == key
                    })
                    .collect()
            }
            Classes::OnlyOnesAndTwos => {
                compositions(order).into_iter().filter(|c| c.iter().all(|&a| a <= 2) && c.contains(&2)).collect()
            }
        }
    }
}

/// Published component-sequence rows; every composition appears exactly once.
fn published_sequence_rows(order: usize) -> Vec<(Classes, &'static str)> {
    use Classes::*;
    match order {
        6 => vec![
            (Seqs(&[&[6]]), "s^5+r*s^2"),
            (Seqs(&[&[1, 5], &[5, 1]]), "2*r*s"),
            (Seqs(&[&[2, 4], &[4, 2]]), "0"),
            (Perms(&[4, 1, 1]), "r-s^3"),
            (Seqs(&[&[3, 3]]), "s^4"),
            (Perms(&[3, 2, 1]), "0"),
            (Perms(&[3, 1, 1, 1]), "-s^2"),
            (Seqs(&[&[2, 2, 2]]), "0"),
            (Perms(&[2, 2, 1, 1]), "0"),
            (Perms(&[2, 1, 1, 1, 1]), "0"),
            (Seqs(&[&[1, 1, 1, 1, 1, 1]]), "1"),
        ],
        7 => vec![
            (Seqs(&[&[7]]), "8*e*s-7*s^6+12*s^3*r"),
            (Seqs(&[&[6, 1], &[1, 6]]), "4*e+4*s^2*r-4*s^5"),
            (Seqs(&[&[5, 2], &[2, 5]]), "0"),
            (Perms(&[5, 1, 1]), "-2*s*r"),
            (Seqs(&[&[4, 3], &[3, 4]]), "s^2*r-s^5"),
            (Perms(&[4, 2, 1]), "0"),
            (Perms(&[4, 1, 1, 1]), "s^3-r"),
            (Perms(&[3, 3, 1]), "-s^4"),
            (Perms(&[3, 2, 2]), "0"),
            (Perms(&[3, 2, 1, 1]), "0"),
            (Perms(&[3, 1, 1, 1, 1]), "s^2"),
            (OnlyOnesAndTwos, "0"),
            (Seqs(&[&[1, 1, 1, 1, 1, 1, 1]]), "-1"),
        ],
        _ => Vec::new(),
    }
}

/// Published two-vertex cancelled patterns at order 6 (labels 1, 2 = n₁, n₂).
const PUBLISHED_TWO_VERTEX: &[(&[u8], &str)] = &[
    (&[1, 1, 2, 2, 2, 2], "0"),
    (&[2, 2, 2, 2, 1, 1], "0"),
    (&[2, 2, 1, 1, 2, 2], "0"),
    (&[2, 1, 1, 2, 2, 2], "0"),
    (&[2, 2, 2, 1, 1, 2], "0"),
    (&[1, 2, 2, 2, 2, 1], "r-s^3"),
    (&[1, 2, 1, 2, 2, 2], "-s^2"),
    (&[2, 1, 2, 2, 2, 1], "-s^2"),
    (&[1, 2, 2, 2, 1, 2], "-s^2"),
    (&[2, 2, 2, 1, 2, 1], "-s^2"),
    (&[1, 2, 2, 1, 2, 2], "0"),
    (&[2, 2, 1, 2, 2, 1], "0"),
    (&[2, 1, 2, 1, 2, 2], "0"),
    (&[2, 1, 2, 2, 1, 2], "0"),
    (&[2, 2, 1, 2, 1, 2], "0"),
];

fn r6_graph(first: Species, edge: Edge) -> CharGraph {
    let second = if first == Species::R6 { Species::Site } else { Species::R6 };
    CharGraph::new(vec![first, second], vec![edge])
}

/// Coefficient rows of the given order (no comparison verdict is applied).
pub fn coefficient_table(order: usize) -> Result<Vec<TableRow>, GraphCalcError> {
    if order != 6 && order != 7 {
        return Err(GraphCalcError::OrderOutOfRange(order));
    }
    let sources = sources_for_order(order)?;
    let mut rows = Vec::new();
    if order == 7 {
        let one = CoeffPoly::one();
        for (label, first) in [("G0R6G~0VG0", Species::R6), ("G0VG~0R6G0", Species::Site)] {
            rows.push(TableRow {
                class: label.into(),
                coefficient: coefficient_of(&r6_graph(first, Edge::Dotted), &sources)?,
                published: one.clone(),
            });
        }
        let solid = coefficient_of(&r6_graph(Species::R6, Edge::Solid), &sources)?
            + coefficient_of(&r6_graph(Species::Site, Edge::Solid), &sources)?;
        rows.push(TableRow {
            class: "G0R6VG0".into(),
            coefficient: solid,
            published: CoeffPoly::parse("2*s").expect("static"),
        });
    }
    for (classes, published) in published_sequence_rows(order) {
        let published = CoeffPoly::parse(published).expect("static table entry");
        for seq in classes.expand(order) {
            rows.push(TableRow {
                class: sequence_label(&seq),
                coefficient: sequence_coefficient(&seq, &sources)?,
                published: published.clone(),
            });
        }
    }
    if order == 6 {
        for (labels, published) in PUBLISHED_TWO_VERTEX {
            let pattern = TuplePattern::new(labels);
            let names: Vec<String> = labels.iter().map(|l| format!("n{l}")).collect();
            rows.push(TableRow {
                class: format!("({})", names.join(",")),
                coefficient: coefficient_of(&pattern.graph(), &sources)?,
                published: CoeffPoly::parse(published).expect("static table entry"),
            });
        }
    }
    Ok(rows)
}

/// Computes the table and fails with every differing row.
pub fn coefficient_tables(order: usize) -> Result<Vec<TableRow>, GraphCalcError> {
    let rows = coefficient_table(order)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.matches())
        .map(|r| format!("{}: computed {} vs published {}", r.class, r.coefficient, r.published))
        .collect();
    if bad.is_empty() {
        Ok(rows)
    } else {
        Err(GraphCalcError::TableMismatch(bad))
    }
}

/// Every composition of `order` is covered by exactly one published row.
pub fn published_rows_partition_compositions(order: usize) -> bool {
    let mut covered: Vec<Vec<usize>> =
        published_sequence_rows(order).iter().flat_map(|(c, _)| c.expand(order)).collect();
    covered.sort();
    let before = covered.len();
    covered.dedup();
    let mut all = compositions(order);
    all.sort();
    before == covered.len() && covered == all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_cover_every_composition_once() {
        assert!(published_rows_partition_compositions(6));
        assert!(published_rows_partition_compositions(7));
    }

    #[test]
    fn two_vertex_rows_are_cancelled_patterns() {
        for (labels, _) in PUBLISHED_TWO_VERTEX {
            let p = TuplePattern::new(labels);
            assert!(super::super::pattern::cancels(&p));
            assert_eq!(p.class_count(), 2);
        }
    }
}
