//! Brute-force checks of the power-law summation bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::KernelError;

/// Sup-norm with the convention |0| = 1.
fn norm(x: f64) -> f64 {
    x.max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaProbe {
    pub probe: f64,
    pub sum: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub probes: Vec<LemmaProbe>,
    /// max ratio / min ratio over the probes.
    pub spread: f64,
    pub limit: f64,
    pub pass: bool,
}

impl LemmaReport {
    fn new(lemma: String, probes: Vec<LemmaProbe>, limit: f64) -> Self {
        let max = probes.iter().map(|p| p.ratio).fold(0.0, f64::max);
        let min = probes.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
        let spread = max / min;
        LemmaReport { lemma, probes, spread, limit, pass: spread.is_finite() && spread <= limit }
    }
}

/// Default ratio spread allowed across probes.
pub const DEFAULT_SPREAD: f64 = 50.0;

/// Number of points of Z^k with |n|_∞ = q.
fn shell(k: usize, q: usize) -> f64 {
    if q == 0 {
        1.0
    } else {
        let k = k as i32;
        (2.0 * q as f64 + 1.0).powi(k) - (2.0 * q as f64 - 1.0).powi(k)
    }
}

/// Σ_{n ∈ Z^d} f(|n − x₁e₁|, |n − x₂e₁|, |n|): points on the first axis
/// enter only through n₁ and q = max_{i≥2}|n_i|, so the box of the given
/// radius is summed exactly in O(radius²) grouped terms. Outside the box the
/// summand is replaced by `tail(|n|)`.
fn axis_sum(d: usize, radius: usize, f: impl Fn(f64, f64) -> f64 + Sync, tail: impl Fn(f64) -> f64) -> f64 {
    let r = radius as i64;
    let inner: f64 = (-r..=r)
        .into_par_iter()
        .map(|n1| (0..=radius).map(|q| shell(d - 1, q) * f(n1 as f64, q as f64)).sum::<f64>())
        .sum();
    let mut outer = 0.0;
    for s in radius + 1..200_000 {
        outer += shell(d, s) * tail(s as f64);
    }
    inner + outer
}

/// Σ_n |n|^{−a} |m−n|^{−b} against |m|^{−min{a, b, a+b−d}} for m = r e₁.
pub fn convolution_lemma(
    d: usize,
    a: f64,
    b: f64,
    radius: usize,
    probes: &[usize],
    limit: f64,
) -> Result<LemmaReport, KernelError> {
    if a <= 0.0 || b <= 0.0 || a + b <= d as f64 || a.max(b) == d as f64 {
        return Err(KernelError::ParameterViolation(format!("a={a}, b={b}, d={d}")));
    }
    check_probes(probes, radius)?;
    let expo = a.min(b).min(a + b - d as f64);
    let rows = probes
        .iter()
        .map(|&m| {
            let mf = m as f64;
            let sum = axis_sum(
                d,
                radius,
                |n1, q| norm(n1.abs().max(q)).powf(-a) * norm((mf - n1).abs().max(q)).powf(-b),
                |s| s.powf(-a - b),
            );
            let bound = norm(mf).powf(-expo);
            LemmaProbe { probe: mf, sum, bound, ratio: sum / bound }
        })
        .collect();
    Ok(LemmaReport::new(format!("summation a={a} b={b} d={d}"), rows, limit))
}

/// Σ_{n₁} |n−n₁|^{−a} |n₁|^{−ε} |n₁−n'|^{−b} with n = r e₁, n' = −r e₁, against
/// |n−n'|^{−a} (|n|∧|n'|)^{−min{ε, a, ε+b−d}}.
pub fn weighted_convolution_lemma(
    d: usize,
    a: f64,
    b: f64,
    eps: f64,
    radius: usize,
    probes: &[usize],
    limit: f64,
) -> Result<LemmaReport, KernelError> {
    let df = d as f64;
    if !(eps > 0.0 && eps < df && a > 0.0 && a <= b && b + eps > df && b != df) {
        return Err(KernelError::ParameterViolation(format!("a={a}, b={b}, eps={eps}, d={d}")));
    }
    check_probes(probes, radius)?;
    let expo = eps.min(a).min(eps + b - df);
    let rows = probes
        .iter()
        .map(|&r| {
            let rf = r as f64;
            let sum = axis_sum(
                d,
                radius,
                |n1, q| {
                    norm((rf - n1).abs().max(q)).powf(-a)
                        * norm(n1.abs().max(q)).powf(-eps)
                        * norm((n1 + rf).abs().max(q)).powf(-b)
                },
                |s| s.powf(-a - b - eps),
            );
            let bound = norm(2.0 * rf).powf(-a) * norm(rf).powf(-expo);
            LemmaProbe { probe: rf, sum, bound, ratio: sum / bound }
        })
        .collect();
    Ok(LemmaReport::new(format!("weighted summation a={a} b={b} eps={eps} d={d}"), rows, limit))
}

/// ||n₁|^{−α} − |n₂|^{−α}| against |n₁−n₂| / ((|n₁|+|n₂|)(|n₁|∧|n₂|)^α) over
/// the given pairs of lattice points.
pub fn difference_lemma(alpha: f64, pairs: &[(Vec<i64>, Vec<i64>)], limit: f64) -> Result<LemmaReport, KernelError> {
    if alpha <= 0.0 {
        return Err(KernelError::ParameterViolation(format!("alpha={alpha}")));
    }
    let sup = |v: &[i64]| norm(v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64);
    let rows = pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|(x, y)| {
            let (nx, ny) = (sup(x), sup(y));
            let diff: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let sum = (nx.powf(-alpha) - ny.powf(-alpha)).abs();
            let bound = sup(&diff) / ((nx + ny) * nx.min(ny).powf(alpha));
            LemmaProbe { probe: sup(&diff), sum, bound, ratio: sum / bound }
        })
        .collect::<Vec<_>>();
    // A ratio of 0 (|n₁| = |n₂|) is trivially within the bound; the spread
    // is taken over the nonzero ratios and the max ratio must stay ≤ limit.
    let nonzero: Vec<LemmaProbe> = rows.iter().filter(|p| p.ratio > 0.0).cloned().collect();
    let max = nonzero.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(LemmaReport { lemma: format!("difference alpha={alpha}"), spread: max, limit, pass: max <= limit, probes: rows })
}

fn check_probes(probes: &[usize], radius: usize) -> Result<(), KernelError> {
    if probes.is_empty() || probes.iter().any(|&m| m == 0 || 4 * m > radius) {
        return Err(KernelError::ParameterViolation(format!("probes must lie in 1..=radius/4 = {}", radius / 4)));
    }
    Ok(())
}
