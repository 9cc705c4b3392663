//! Operator words such as `G0 V Gt W G0` and their plain or starred
//! (admissible-tuple) evaluation.

use rayon::prelude::*;

use super::instance::{scale_cols, LatticeInstance, Mat};
use super::special::SpecialOps;
use super::OpError;

/// Largest number of tuples a starred evaluation may enumerate.
pub const STAR_LIMIT: f64 = 1e8;

#[derive(Clone, Debug, PartialEq)]
enum Factor {
    Matrix(String),
    /// Diagonal; `random` when it carries a factor of V.
    Diagonal {
        tokens: Vec<String>,
        random: bool,
    },
}

/// A parsed word: whitespace-separated tokens, consecutive diagonal tokens
/// merged into one diagonal factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    text: String,
    factors: Vec<Factor>,
}

const MATRICES: &[&str] = &[
    "G0",
    "Gt",
    "I",
    "W",
    "W4",
    "M4",
    "M",
    "N",
    "Nt",
    "C",
    "C6",
    "C1",
    "C2",
    "C3",
    "S",
    "St",
    "P6",
    "P6p",
    "P6pp",
    "Q1",
    "Q2",
    "Q1printed",
    "Q2printed",
];
const DIAGONALS: &[&str] = &["V", "v2", "v4", "v6", "D4", "R6", "R61", "R62", "D61", "D62", "D7"];

impl Word {
    pub fn parse(text: &str) -> Result<Self, OpError> {
        let mut factors: Vec<Factor> = Vec::new();
        for tok in text.split_whitespace() {
            if MATRICES.contains(&tok) {
                factors.push(Factor::Matrix(tok.to_string()));
            } else if DIAGONALS.contains(&tok) {
                let random = tok == "V";
                match factors.last_mut() {
                    Some(Factor::Diagonal { tokens, random: r }) => {
                        tokens.push(tok.to_string());
                        *r |= random;
                    }
                    _ => factors.push(Factor::Diagonal { tokens: vec![tok.to_string()], random }),
                }
            } else {
                return Err(OpError::UnknownToken(tok.to_string()));
            }
        }
        if factors.is_empty() {
            return Err(OpError::MalformedWord(text.to_string()));
        }
        Ok(Word { text: text.to_string(), factors })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Number of V positions.
    pub fn random_positions(&self) -> usize {
        self.factors.iter().filter(|f| matches!(f, Factor::Diagonal { random: true, .. })).count()
    }
}

/// Instance plus its special operators: everything a word can name.
pub struct Context<'a> {
    pub inst: &'a LatticeInstance,
    pub ops: &'a SpecialOps,
}

impl Context<'_> {
    fn matrix(&self, name: &str) -> Mat {
        let o = self.ops;
        match name {
            "G0" => self.inst.g0.clone(),
            "Gt" => o.gt.clone(),
            "I" => Mat::identity(self.inst.sites, self.inst.sites),
            "W" => o.w.clone(),
            "W4" => o.w4.clone(),
            "M4" => o.m4.clone(),
            "M" => o.m.clone(),
            "N" => o.n.clone(),
            "Nt" => o.nt.clone(),
            "C" => o.c.clone(),
            "C6" => o.c6.clone(),
            "C1" => o.c1.clone(),
            "C2" => o.c2.clone(),
            "C3" => o.c3.clone(),
            "S" => o.s.clone(),
            "St" => o.st.clone(),
            "P6" => o.p6.clone(),
            "P6p" => o.p6p.clone(),
            "P6pp" => o.p6pp.clone(),
            "Q1" => o.q1.clone(),
            "Q2" => o.q2.clone(),
            "Q1printed" => o.q1_printed.clone(),
            "Q2printed" => o.q2_printed.clone(),
            _ => unreachable!("token validated at parse time"),
        }
    }

    fn diagonal(&self, tokens: &[String]) -> Vec<f64> {
        let mut out = vec![1.0; self.inst.sites];
        for t in tokens {
            let d: Vec<f64> = match t.as_str() {
                "V" => self.inst.potential(),
                "v2" => self.inst.v_pow(2),
                "v4" => self.inst.v_pow(4),
                "v6" => self.inst.v_pow(6),
                "D4" => self.ops.d4.clone(),
                "R6" => self.ops.r6.clone(),
                "R61" => self.ops.r6_1.clone(),
                "R62" => self.ops.r6_2.clone(),
                "D61" => self.ops.d6_1.clone(),
                "D62" => self.ops.d6_2.clone(),
                "D7" => self.ops.d7.clone(),
                _ => unreachable!("token validated at parse time"),
            };
            out.iter_mut().zip(d).for_each(|(o, x)| *o *= x);
        }
        out
    }

    fn product(&self, factors: &[Factor]) -> Mat {
        let n = self.inst.sites;
        let mut acc = Mat::identity(n, n);
        for f in factors {
            acc = match f {
                Factor::Matrix(name) => acc * self.matrix(name),
                Factor::Diagonal { tokens, .. } => scale_cols(&acc, &self.diagonal(tokens)),
            };
        }
        acc
    }
}

/// Plain matrix product, or with `star` the sum restricted to admissible
/// tuples of V positions.
pub fn evaluate_word(word: &Word, ctx: &Context, star: bool) -> Result<Mat, OpError> {
    let s = word.random_positions();
    if !star || s <= 1 {
        return Ok(ctx.product(&word.factors));
    }
    let n = ctx.inst.sites;
    let terms = (n as f64).powi(s as i32);
    if terms > STAR_LIMIT {
        return Err(OpError::TooLarge(terms));
    }
    if n > 128 {
        return Err(OpError::TooLarge(terms));
    }
    // Split at the random diagonals: K₀ f₁ K₁ f₂ ⋯ f_s K_s.
    let mut kernels: Vec<Vec<Factor>> = vec![Vec::new()];
    let mut weights: Vec<Vec<f64>> = Vec::new();
    for f in &word.factors {
        match f {
            Factor::Diagonal { tokens, random: true } => {
                weights.push(ctx.diagonal(tokens));
                kernels.push(Vec::new());
            }
            other => kernels.last_mut().expect("non-empty").push(other.clone()),
        }
    }
    let k: Vec<Mat> = kernels.iter().map(|f| ctx.product(f)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut row = vec![0.0; n];
            let mut masks = Vec::with_capacity(s + 1);
            masks.push(0u128);
            let m = 1u128 << first;
            masks.push(m);
            walk(&k, &weights, 1, first, m, weights[0][first], &mut masks, &mut row);
            row
        })
        .collect();
    let inner = Mat::from_fn(n, n, |i, j| rows[i][j]);
    Ok(&k[0] * inner * &k[s])
}

/// Depth-first over admissible continuations: a tuple is admissible iff its
/// prefix parity masks are pairwise distinct.
#[allow(clippy::too_many_arguments)]
fn walk(
    k: &[Mat],
    w: &[Vec<f64>],
    depth: usize,
    at: usize,
    mask: u128,
    value: f64,
    masks: &mut Vec<u128>,
    row: &mut [f64],
) {
    if depth == w.len() {
        row[at] += value;
        return;
    }
    let n = row.len();
    let edge = &k[depth];
    for next in 0..n {
        let m = mask ^ (1u128 << next);
        if masks.contains(&m) {
            continue;
        }
        let x = value * edge[(at, next)] * w[depth][next];
        masks.push(m);
        walk(k, w, depth + 1, next, m, x, masks, row);
        masks.pop();
    }
}

/// Admissibility of a tuple of sites (prefix-parity form).
pub fn admissible_tuple(tuple: &[usize]) -> bool {
    let mut masks = vec![0u128];
    let mut m = 0u128;
    for &x in tuple {
        m ^= 1u128 << x;
        if masks.contains(&m) {
            return false;
        }
        masks.push(m);
    }
    true
}

/// Parse and evaluate.
pub fn eval(text: &str, ctx: &Context, star: bool) -> Result<Mat, OpError> {
    evaluate_word(&Word::parse(text)?, ctx, star)
}
