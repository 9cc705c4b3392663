//! Equality patterns of multi-indices and the characteristic graphs they induce.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which positions of an s-tuple hold equal lattice points. Labels are
/// canonical: the first occurrence of each class gets the next unused label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TuplePattern {
    labels: Vec<u8>,
}

impl TuplePattern {
    /// Builds a pattern from arbitrary labels, relabelling canonically.
    pub fn new<T: PartialEq>(labels: &[T]) -> Self {
        let mut seen: Vec<&T> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        for x in labels {
            let k = match seen.iter().position(|y| *y == x) {
                Some(k) => k,
                None => {
                    seen.push(x);
                    seen.len() - 1
                }
            };
            out.push(k as u8);
        }
        Self { labels: out }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Sub-pattern on positions `start..end`, relabelled.
    pub fn window(&self, start: usize, end: usize) -> TuplePattern {
        TuplePattern::new(&self.labels[start..end])
    }

    /// The complete characteristic graph: solid where neighbours coincide.
    pub fn graph(&self) -> CharGraph {
        CharGraph::complete_from(
            self.labels.windows(2).map(|w| if w[0] == w[1] { Edge::Solid } else { Edge::Dotted }).collect(),
        )
    }

    /// All set partitions of `s` positions, in canonical-label form.
    pub fn all(s: usize) -> Vec<TuplePattern> {
        fn rec(prefix: &mut Vec<u8>, max: u8, s: usize, out: &mut Vec<TuplePattern>) {
            if prefix.len() == s {
                out.push(TuplePattern { labels: prefix.clone() });
                return;
            }
            for l in 0..=max {
                prefix.push(l);
                let next = if l == max { max + 1 } else { max };
                rec(prefix, next, s, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(s), 0, s, &mut out);
        out
    }
}

impl fmt::Display for TuplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.labels.iter().map(|l| format!("n{}", l + 1)).collect();
        write!(f, "({})", names.join(","))
    }
}

/// Every class occurs an even number of times (the ω-product is identically 1).
pub fn cancels(pattern: &TuplePattern) -> bool {
    parity_mask(pattern.labels()) == 0
}

fn parity_mask(labels: &[u8]) -> u64 {
    labels.iter().fold(0u64, |m, &l| m ^ (1u64 << l))
}

/// No contiguous window of length ≥ 2 cancels.
pub fn admissible(pattern: &TuplePattern) -> bool {
    // Window [i, j) cancels iff the prefix parities at i and j agree.
    let mut prefixes = Vec::with_capacity(pattern.len() + 1);
    let mut m = 0u64;
    prefixes.push(m);
    for &l in pattern.labels() {
        m ^= 1u64 << l;
        if prefixes.contains(&m) {
            return false;
        }
        prefixes.push(m);
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Edge {
    Solid,
    Dotted,
    Vacuum,
}

/// Kind of vertex: an ordinary v-position, or the opaque diagonal R₆ node
/// (which carries six powers of v but occupies one vertex).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Species {
    Site,
    R6,
}

impl Species {
    pub fn order(self) -> usize {
        match self {
            Species::Site => 1,
            Species::R6 => 6,
        }
    }
}

/// Path graph on the positions of a summation tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharGraph {
    pub species: Vec<Species>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has a vacuum edge at position {0}")]
    GraphIncomplete(usize),
}

impl CharGraph {
    pub fn new(species: Vec<Species>, edges: Vec<Edge>) -> Self {
        assert_eq!(species.len(), edges.len() + 1, "a path on s vertices has s-1 edges");
        Self { species, edges }
    }

    /// A graph of ordinary sites only.
    pub fn complete_from(edges: Vec<Edge>) -> Self {
        Self::new(vec![Species::Site; edges.len() + 1], edges)
    }

    /// The complete graph with the given component sequence.
    pub fn from_sequence(seq: &[usize]) -> Self {
        let mut edges = Vec::new();
        for (k, &a) in seq.iter().enumerate() {
            assert!(a > 0, "component lengths are positive");
            if k > 0 {
                edges.push(Edge::Dotted);
            }
            edges.extend(std::iter::repeat_n(Edge::Solid, a - 1));
        }
        Self::complete_from(edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.species.len()
    }

    /// Total power of v carried by the graph.
    pub fn order(&self) -> usize {
        self.species.iter().map(|s| s.order()).sum()
    }

    pub fn is_complete(&self) -> bool {
        !self.edges.contains(&Edge::Vacuum)
    }

    /// Replace every vacuum edge by solid and by dotted in all combinations.
    pub fn complete(&self) -> Vec<CharGraph> {
        let vac: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i] == Edge::Vacuum).collect();
        (0..1usize << vac.len())
            .map(|mask| {
                let mut g = self.clone();
                for (b, &i) in vac.iter().enumerate() {
                    g.edges[i] = if mask >> b & 1 == 1 { Edge::Solid } else { Edge::Dotted };
                }
                g
            })
            .collect()
    }

    /// Lengths of maximal solid-connected runs, left to right.
    pub fn component_sequence(&self) -> Result<Vec<usize>, GraphError> {
        if let Some(i) = self.edges.iter().position(|&e| e == Edge::Vacuum) {
            return Err(GraphError::GraphIncomplete(i));
        }
        let mut seq = vec![1];
        for e in &self.edges {
            match e {
                Edge::Solid => *seq.last_mut().expect("nonempty") += 1,
                _ => seq.push(1),
            }
        }
        Ok(seq)
    }

    /// Rule 1: `self` (complete) refines `other` (possibly incomplete).
    pub fn contained_in(&self, other: &CharGraph) -> bool {
        self.species == other.species
            && self.edges.iter().zip(&other.edges).all(|(&mine, &theirs)| theirs == Edge::Vacuum || mine == theirs)
    }
}

/// `<a,b,...>` notation.
pub fn sequence_label(seq: &[usize]) -> String {
    let parts: Vec<String> = seq.iter().map(|a| a.to_string()).collect();
    format!("<{}>", parts.join(","))
}

/// All compositions of `n`, in lexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for a in 1..=rest {
            prefix.push(a);
            rec(rest - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}
