//! The generalized Khintchine inequality for chain sums
//! Σ* ω_{n₁}⋯ω_{n_s} a⁽⁰⁾_{n₁} a⁽¹⁾_{n₁n₂} ⋯ a⁽ˢ⁾_{n_s}, with the
//! outer indices n, n′ held fixed.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boolean::{cube_moment, walsh_hadamard};
use super::omega::sample_omega;
use super::ProbError;
use crate::graphcalc::{admissible, TuplePattern};

/// Exact mode enumerates {±1}^sites, so sites are capped here.
pub const MAX_EXACT_SITES: usize = 14;
/// Cap on the number of tuples (sites^s) enumerated.
pub const TUPLE_LIMIT: f64 = 1e7;
/// Recorded constant for s = 2, p = 2 (empirical, not from the inequality).
pub const S2_P2_BOUND: f64 = 4.0;

/// a⁽⁰⁾ as a vector over n₁, a⁽¹⁾..a⁽ˢ⁻¹⁾ as matrices, a⁽ˢ⁾ as a vector over n_s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainWeights {
    pub first: Vec<f64>,
    pub middle: Vec<Vec<Vec<f64>>>,
    pub last: Vec<f64>,
}

impl ChainWeights {
    pub fn sites(&self) -> usize {
        self.first.len()
    }

    pub fn s(&self) -> usize {
        self.middle.len() + 1
    }

    fn validate(&self) -> Result<(), ProbError> {
        let n = self.sites();
        let square = self.middle.iter().all(|m| m.len() == n && m.iter().all(|r| r.len() == n));
        if n == 0 || self.last.len() != n || !square {
            return Err(ProbError::InvalidParameter("chain weights must share one site set".into()));
        }
        Ok(())
    }

    /// Product a⁽⁰⁾a⁽¹⁾⋯a⁽ˢ⁾ along a tuple.
    pub fn weight(&self, tuple: &[usize]) -> f64 {
        let mut w = self.first[tuple[0]];
        for (j, m) in self.middle.iter().enumerate() {
            w *= m[tuple[j]][tuple[j + 1]];
        }
        w * self.last[tuple[tuple.len() - 1]]
    }

    /// Independent uniform [0, 1] entries.
    pub fn random<R: Rng>(rng: &mut R, sites: usize, s: usize) -> Self {
        let vec = |rng: &mut R| (0..sites).map(|_| rng.gen::<f64>()).collect::<Vec<_>>();
        let first = vec(rng);
        let middle = (1..s).map(|_| (0..sites).map(|_| vec(rng)).collect()).collect();
        let last = vec(rng);
        ChainWeights { first, middle, last }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Restriction {
    Admissible,
    /// Every tuple, cancelled windows included (negative control).
    Unrestricted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineOutcome {
    pub s: usize,
    pub p: f64,
    pub sites: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs; 0 when both vanish.
    pub ratio: f64,
    pub tuples_kept: usize,
}

/// Collapse the chain sum onto parity masks: Σ_mask c(mask) Π_{i∈mask} ω_i.
/// Returns the coefficients, Σ over all tuples of weight², and the number
/// of tuples kept.
fn collapse(w: &ChainWeights, restriction: Restriction) -> (BTreeMap<u64, f64>, f64, usize) {
    let (n, s) = (w.sites(), w.s());
    let parts: Vec<(BTreeMap<u64, f64>, f64, usize)> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut coef = BTreeMap::new();
            let mut sq = 0.0;
            let mut kept = 0;
            let mut tuple = vec![0usize; s];
            tuple[0] = first;
            let rest = n.pow(s as u32 - 1);
            for code in 0..rest {
                let mut c = code;
                for slot in tuple[1..].iter_mut().rev() {
                    *slot = c % n;
                    c /= n;
                }
                let x = w.weight(&tuple);
                sq += x * x;
                if restriction == Restriction::Admissible && !admissible(&TuplePattern::new(&tuple)) {
                    continue;
                }
                kept += 1;
                if x != 0.0 {
                    let mask = tuple.iter().fold(0u64, |m, &i| m ^ (1 << i));
                    *coef.entry(mask).or_insert(0.0) += x;
                }
            }
            (coef, sq, kept)
        })
        .collect();
    let mut coef = BTreeMap::new();
    let mut sq = 0.0;
    let mut kept = 0;
    for (c, q, k) in parts {
        for (mask, x) in c {
            *coef.entry(mask).or_insert(0.0) += x;
        }
        sq += q;
        kept += k;
    }
    (coef, sq, kept)
}

pub fn khintchine_check(
    w: &ChainWeights,
    p: f64,
    mode: Mode,
    restriction: Restriction,
) -> Result<KhintchineOutcome, ProbError> {
    w.validate()?;
    if p < 1.0 {
        return Err(ProbError::InvalidParameter(format!("moment order {p} < 1")));
    }
    let (n, s) = (w.sites(), w.s());
    let tuples = (n as f64).powi(s as i32);
    if tuples > TUPLE_LIMIT || n > 64 {
        return Err(ProbError::TooLarge(tuples));
    }
    let (coef, sq, kept) = collapse(w, restriction);
    let lhs = match mode {
        Mode::Exact => {
            if n > MAX_EXACT_SITES {
                return Err(ProbError::TooLarge(2f64.powi(n as i32)));
            }
            let mut table = vec![0.0; 1 << n];
            for (&mask, &x) in &coef {
                table[mask as usize] += x;
            }
            walsh_hadamard(&mut table);
            cube_moment(&table, p).powf(1.0 / p)
        }
        Mode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(ProbError::InvalidParameter("zero Monte Carlo samples".into()));
            }
            let field = sample_omega(seed, samples * n);
            let values: Vec<f64> = field
                .values
                .chunks(n)
                .map(|omega| {
                    let neg = omega.iter().enumerate().fold(0u64, |m, (i, &o)| if o < 0 { m | 1 << i } else { m });
                    coef.iter().map(|(&mask, &x)| if (mask & neg).count_ones() % 2 == 0 { x } else { -x }).sum()
                })
                .collect();
            cube_moment(&values, p).powf(1.0 / p)
        }
    };
    let rhs = sq.sqrt();
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(KhintchineOutcome { s, p, sites: n, lhs, rhs, ratio, tuples_kept: kept })
}

/// Weights carried entirely by the cancelled tuples (n₁, n₁): a⁽⁰⁾ = a⁽²⁾ = 1,
/// a⁽¹⁾ = I. Unrestricted, the sum is the constant `sites`; its rhs is √sites.
pub fn diagonal_witness(sites: usize) -> ChainWeights {
    let id = (0..sites).map(|i| (0..sites).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    ChainWeights { first: vec![1.0; sites], middle: vec![id], last: vec![1.0; sites] }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstant {
    pub s: usize,
    pub p: f64,
    pub sites: usize,
    pub trials: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativeControl {
    pub sites: usize,
    pub admissible: KhintchineOutcome,
    pub unrestricted: KhintchineOutcome,
    /// Unrestricted lhs > rhs.
    pub exceeds_rhs: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhintchineReport {
    pub seed: u64,
    /// Worst |ratio − 1| over the s = 1, p = 2 trials.
    pub s1_p2_deviation: f64,
    pub constants: Vec<EmpiricalConstant>,
    pub s2_p2_bound: f64,
    pub s2_p2_holds: bool,
    pub negative_control: NegativeControl,
}

/// Random nonnegative chains for (s, p) ∈ {1,2,3} × {2,4}, plus the
/// negative control.
pub fn khintchine_suite(seed: u64, trials: usize, sites: usize) -> Result<KhintchineReport, ProbError> {
    let mut rng = super::rng(seed);
    let mut constants = Vec::new();
    let mut s1_p2_deviation: f64 = 0.0;
    for s in 1..=3 {
        for p in [2.0, 4.0] {
            let mut max_ratio: f64 = 0.0;
            for _ in 0..trials {
                let w = ChainWeights::random(&mut rng, sites, s);
                let out = khintchine_check(&w, p, Mode::Exact, Restriction::Admissible)?;
                if s == 1 && p == 2.0 {
                    s1_p2_deviation = s1_p2_deviation.max((out.ratio - 1.0).abs());
                }
                max_ratio = max_ratio.max(out.ratio);
            }
            constants.push(EmpiricalConstant { s, p, sites, trials, max_ratio });
        }
    }
    let s2_p2 = constants.iter().find(|c| c.s == 2 && c.p == 2.0).map_or(0.0, |c| c.max_ratio);
    let witness = diagonal_witness(sites);
    let admissible = khintchine_check(&witness, 2.0, Mode::Exact, Restriction::Admissible)?;
    let unrestricted = khintchine_check(&witness, 2.0, Mode::Exact, Restriction::Unrestricted)?;
    let exceeds_rhs = unrestricted.lhs > unrestricted.rhs;
    Ok(KhintchineReport {
        seed,
        s1_p2_deviation,
        constants,
        s2_p2_bound: S2_P2_BOUND,
        s2_p2_holds: s2_p2 <= S2_P2_BOUND,
        negative_control: NegativeControl { sites, admissible, unrestricted, exceeds_rhs },
    })
}
