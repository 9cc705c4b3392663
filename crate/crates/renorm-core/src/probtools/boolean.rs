//! Polynomials in Bernoulli signs Y₁..Y_m and their exact moments by
//! enumeration of the cube.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProbError;

/// Largest m for exact enumeration.
pub const MAX_EXACT_VARIABLES: usize = 20;

/// Σ c·Y_{i₁}⋯Y_{i_k}; a monomial may repeat a variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanPoly {
    pub m: usize,
    pub terms: Vec<(Vec<usize>, f64)>,
}

impl BooleanPoly {
    pub fn new(m: usize, terms: Vec<(Vec<usize>, f64)>) -> Result<Self, ProbError> {
        if let Some(&bad) = terms.iter().flat_map(|(mono, _)| mono).find(|&&i| i >= m) {
            return Err(ProbError::InvalidParameter(format!("variable {bad} out of range for m = {m}")));
        }
        Ok(BooleanPoly { m, terms })
    }

    /// Y_i.
    pub fn variable(m: usize, i: usize) -> Result<Self, ProbError> {
        Self::new(m, vec![(vec![i], 1.0)])
    }

    /// Declared degree: the largest monomial length, multiplicity counted.
    pub fn degree(&self) -> usize {
        self.terms.iter().filter(|(_, c)| *c != 0.0).map(|(mono, _)| mono.len()).max().unwrap_or(0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        BooleanPoly { m: self.m, terms: self.terms.iter().map(|(mono, x)| (mono.clone(), x * c)).collect() }
    }

    /// Coefficients f̂(S) after Y² = 1, indexed by the bitmask of S.
    pub fn multilinear(&self) -> Result<Vec<f64>, ProbError> {
        if self.m > MAX_EXACT_VARIABLES {
            return Err(ProbError::TooManyVariables(self.m));
        }
        let mut hat = vec![0.0; 1 << self.m];
        for (mono, c) in &self.terms {
            let mask = mono.iter().fold(0usize, |acc, &i| acc ^ (1 << i));
            hat[mask] += c;
        }
        Ok(hat)
    }

    /// f on every sign vector; bit i of the index set means Y_i = −1.
    pub fn values(&self) -> Result<Vec<f64>, ProbError> {
        let mut f = self.multilinear()?;
        walsh_hadamard(&mut f);
        Ok(f)
    }
}

/// In-place unnormalized Walsh–Hadamard transform: maps f̂ to
/// x ↦ Σ_S f̂(S)(−1)^{|S∩x|}.
pub fn walsh_hadamard(a: &mut [f64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}

/// E|g|^p over the uniform cube, from the table of values. Chunks are
/// summed in parallel and reduced in index order, so the result does not
/// depend on the thread count.
pub fn cube_moment(values: &[f64], p: f64) -> f64 {
    let pow = |x: f64| {
        let a = x.abs();
        if p.fract() == 0.0 && p <= 64.0 {
            a.powi(p as i32)
        } else {
            a.powf(p)
        }
    };
    let partial: Vec<f64> = values.par_chunks(4096).map(|c| c.iter().map(|&x| pow(x)).sum()).collect();
    partial.iter().sum::<f64>() / values.len() as f64
}

/// E|f|^p by summing over all 2^m sign vectors.
pub fn exact_moment(f: &BooleanPoly, p: f64) -> Result<f64, ProbError> {
    if p <= 0.0 || !p.is_finite() {
        return Err(ProbError::InvalidParameter(format!("moment order {p}")));
    }
    Ok(cube_moment(&f.values()?, p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonamiOutcome {
    pub degree: usize,
    pub e2: f64,
    pub e4: f64,
    /// E f⁴ / (9^s (E f²)²); 0 for the zero polynomial.
    pub ratio: f64,
    pub holds: bool,
}

pub fn bonami_check(f: &BooleanPoly) -> Result<BonamiOutcome, ProbError> {
    let values = f.values()?;
    let e2 = cube_moment(&values, 2.0);
    let e4 = cube_moment(&values, 4.0);
    let s = f.degree();
    let ratio = if e2 > 0.0 { e4 / (9f64.powi(s as i32) * e2 * e2) } else { 0.0 };
    Ok(BonamiOutcome { degree: s, e2, e4, ratio, holds: ratio <= 1.0 + 1e-12 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentOutcome {
    pub p: f64,
    /// E_p|f| / E_2|f|; 0 for the zero polynomial.
    pub ratio: f64,
    /// 1 for p ≤ 2, else 3^{s·⌈log₂ p⌉}.
    pub bound: f64,
    pub holds: bool,
}

pub fn moment_equivalence_check(f: &BooleanPoly, p: f64) -> Result<MomentOutcome, ProbError> {
    if p < 1.0 {
        return Err(ProbError::InvalidParameter(format!("moment order {p} < 1")));
    }
    let values = f.values()?;
    let e2 = cube_moment(&values, 2.0).sqrt();
    let ep = cube_moment(&values, p).powf(1.0 / p);
    let ratio = if e2 > 0.0 { ep / e2 } else { 0.0 };
    let bound = if p <= 2.0 { 1.0 } else { 3f64.powi((f.degree() as f64 * p.log2().ceil()) as i32) };
    Ok(MomentOutcome { p, ratio, bound, holds: ratio <= bound * (1.0 + 1e-12) })
}

/// Random multilinear polynomial of degree exactly s: up to `max_terms`
/// monomials with distinct variables, coefficients uniform in [−1, 1].
pub fn random_poly<R: Rng>(rng: &mut R, m: usize, s: usize, max_terms: usize) -> Result<BooleanPoly, ProbError> {
    if s > m || s == 0 || max_terms == 0 {
        return Err(ProbError::InvalidParameter(format!("degree {s} with m = {m}, {max_terms} terms")));
    }
    let count = rng.gen_range(1..=max_terms);
    let mut terms = Vec::with_capacity(count);
    for k in 0..count {
        let len = if k == 0 { s } else { rng.gen_range(0..=s) };
        let mono = rand::seq::index::sample(rng, m, len).into_vec();
        terms.push((mono, rng.gen_range(-1.0..=1.0)));
    }
    BooleanPoly::new(m, terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonamiTrial {
    pub trial: usize,
    pub degree: usize,
    pub terms: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonamiReport {
    pub seed: u64,
    pub m: usize,
    pub smax: usize,
    pub trials: Vec<BonamiTrial>,
    pub max_ratio: f64,
    pub all_hold: bool,
}

/// Bonami on `trials` random polynomials with s uniform in 1..=smax.
pub fn bonami_suite(trials: usize, m: usize, smax: usize, seed: u64) -> Result<BonamiReport, ProbError> {
    let mut rng = super::rng(seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let s = rng.gen_range(1..=smax);
        let f = random_poly(&mut rng, m, s, 40)?;
        let out = bonami_check(&f)?;
        rows.push(BonamiTrial { trial, degree: out.degree, terms: f.terms.len(), ratio: out.ratio });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(BonamiReport { seed, m, smax, all_hold: max_ratio <= 1.0 + 1e-12, trials: rows, max_ratio })
}
