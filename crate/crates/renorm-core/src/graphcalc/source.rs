//! Born-series source words and the Rule 1/Rule 2 coefficient sum.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::pattern::{CharGraph, Edge, Species};
use super::poly::CoeffPoly;
use super::GraphCalcError;

/// A diagonal factor of the renormalized potential Ṽ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    /// The random potential V = vω.
    V,
    /// σv².
    Sigma2,
    /// −ρv⁴.
    Rho4,
    /// c₆v⁶ with c₆ = 4η − 3σ⁵ + 5σ²ρ.
    C6,
    /// The diagonal operator R₆.
    R6,
}

impl Stage {
    pub fn order(self) -> usize {
        match self {
            Stage::V => 1,
            Stage::Sigma2 => 2,
            Stage::Rho4 => 4,
            Stage::C6 | Stage::R6 => 6,
        }
    }

    pub fn default_coefficient(self) -> CoeffPoly {
        match self {
            Stage::V | Stage::R6 => CoeffPoly::one(),
            Stage::Sigma2 => CoeffPoly::sigma(),
            Stage::Rho4 => -CoeffPoly::rho(),
            Stage::C6 => sixth_order_counterterm(),
        }
    }

    fn vertices(self) -> (Species, usize) {
        match self {
            Stage::R6 => (Species::R6, 1),
            s => (Species::Site, s.order()),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Stage::V => "V",
            Stage::Sigma2 => "v2",
            Stage::Rho4 => "v4",
            Stage::C6 => "v6",
            Stage::R6 => "R6",
        }
    }
}

/// 4η − 3σ⁵ + 5σ²ρ.
pub fn sixth_order_counterterm() -> CoeffPoly {
    CoeffPoly::parse("4*e-3*s^5+5*s^2*r").expect("static polynomial")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub stage: Stage,
    pub coefficient: CoeffPoly,
}

/// Stages with their default coefficients, in canonical order.
pub fn stages(list: &[Stage]) -> Vec<StageSpec> {
    let mut v: Vec<Stage> = list.to_vec();
    v.sort();
    v.dedup();
    v.into_iter().map(|stage| StageSpec { stage, coefficient: stage.default_coefficient() }).collect()
}

/// ± prefactor · G₀X₁G₀X₂⋯X_jG₀.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceTerm {
    pub prefactor: CoeffPoly,
    pub factors: Vec<Stage>,
}

impl SourceTerm {
    pub fn order(&self) -> usize {
        self.factors.iter().map(|s| s.order()).sum()
    }

    /// Incomplete graph: solid inside each factor, vacuum between factors.
    pub fn graph(&self) -> CharGraph {
        let mut species = Vec::new();
        let mut edges = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            if k > 0 {
                edges.push(Edge::Vacuum);
            }
            let (sp, w) = f.vertices();
            species.extend(std::iter::repeat_n(sp, w));
            edges.extend(std::iter::repeat_n(Edge::Solid, w - 1));
        }
        CharGraph::new(species, edges)
    }
}

impl fmt::Display for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*G0", self.prefactor)?;
        for s in &self.factors {
            write!(f, " {} G0", s.symbol())?;
        }
        Ok(())
    }
}

/// All words of total order `k`, with sign (−1)^j and stage coefficients.
pub fn born_source_terms(k: usize, stages: &[StageSpec]) -> Result<Vec<SourceTerm>, GraphCalcError> {
    if !(1..=8).contains(&k) {
        return Err(GraphCalcError::OrderOutOfRange(k));
    }
    fn rec(rest: usize, stages: &[StageSpec], word: &mut Vec<usize>, out: &mut Vec<SourceTerm>) {
        if rest == 0 {
            let mut prefactor = CoeffPoly::one();
            for &i in word.iter() {
                prefactor = -(&prefactor * &stages[i].coefficient);
            }
            out.push(SourceTerm { prefactor, factors: word.iter().map(|&i| stages[i].stage).collect() });
            return;
        }
        for (i, s) in stages.iter().enumerate() {
            if s.stage.order() <= rest {
                word.push(i);
                rec(rest - s.stage.order(), stages, word, out);
                word.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(k, stages, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Σ over sources containing `target` of prefactor · σ^(vacuum edges made solid).
pub fn coefficient_of(target: &CharGraph, sources: &[SourceTerm]) -> Result<CoeffPoly, GraphCalcError> {
    let order = target.order();
    let mut total = CoeffPoly::zero();
    for src in sources {
        if src.order() != order {
            return Err(GraphCalcError::LengthMismatch { graph: order, word: src.order() });
        }
        let g = src.graph();
        if !target.contained_in(&g) {
            continue;
        }
        let promoted =
            g.edges.iter().zip(&target.edges).filter(|(&e, &t)| e == Edge::Vacuum && t == Edge::Solid).count();
        total = total + &src.prefactor * &CoeffPoly::sigma_pow(promoted as u16);
    }
    Ok(total)
}
