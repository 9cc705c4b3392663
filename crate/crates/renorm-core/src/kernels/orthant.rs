//! Storage for functions that are even in every coordinate and the cosine
//! transform that diagonalizes convolution on a periodic box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Values on {0,…,side−1}^d, row-major with coordinate 0 slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orthant {
    pub d: usize,
    pub side: usize,
    pub data: Vec<f64>,
}

impl Orthant {
    pub fn zeros(d: usize, side: usize) -> Self {
        Orthant { d, side, data: vec![0.0; side.pow(d as u32)] }
    }

    pub fn from_fn(d: usize, side: usize, f: impl Fn(&[usize]) -> f64 + Sync) -> Self {
        let len = side.pow(d as u32);
        let data = (0..len)
            .into_par_iter()
            .map_init(
                || vec![0; d],
                |c, i| {
                    decode(i, side, c);
                    f(c)
                },
            )
            .collect();
        Orthant { d, side, data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn index(&self, c: &[usize]) -> usize {
        c.iter().fold(0, |acc, &x| acc * self.side + x)
    }

    pub fn coords(&self, i: usize) -> Vec<usize> {
        let mut c = vec![0; self.d];
        decode(i, self.side, &mut c);
        c
    }

    pub fn get(&self, c: &[usize]) -> f64 {
        self.data[self.index(c)]
    }

    /// Number of lattice points folding onto entry `i`; `period` is the torus
    /// side, or `None` for Z^d.
    pub fn multiplicity(&self, i: usize, period: Option<usize>) -> f64 {
        let mut c = vec![0; self.d];
        decode(i, self.side, &mut c);
        c.iter().map(|&x| axis_weight(x, period)).product()
    }

    /// Σ over every lattice point of the unfolded function.
    pub fn unfolded_sum(&self, period: Option<usize>, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        let side = self.side;
        let d = self.d;
        let parts: Vec<f64> = self
            .data
            .par_chunks(side)
            .enumerate()
            .map(|(chunk, vals)| {
                let mut c = vec![0; d];
                decode(chunk * side, side, &mut c);
                let outer: f64 = c[..d - 1].iter().map(|&x| axis_weight(x, period)).product();
                let inner: f64 = vals.iter().enumerate().map(|(k, &v)| axis_weight(k, period) * f(v)).sum();
                outer * inner
            })
            .collect();
        parts.iter().sum()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync) -> Orthant {
        Orthant { d: self.d, side: self.side, data: self.data.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Orthant, f: impl Fn(f64, f64) -> f64 + Sync) -> Orthant {
        assert_eq!((self.d, self.side), (other.d, other.side));
        Orthant {
            d: self.d,
            side: self.side,
            data: self.data.par_iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Apply a side×side matrix along every axis (separable transform).
    pub fn separable(&self, t: &[f64]) -> Orthant {
        let side = self.side;
        assert_eq!(t.len(), side * side);
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        for _ in 0..self.d {
            // Transform the last axis, then rotate it to the front.
            cur.par_chunks_mut(side).for_each_init(
                || vec![0.0; side],
                |buf, row| {
                    for (k, b) in buf.iter_mut().enumerate() {
                        let tk = &t[k * side..(k + 1) * side];
                        *b = tk.iter().zip(row.iter()).map(|(a, x)| a * x).sum();
                    }
                    row.copy_from_slice(buf);
                },
            );
            let rest = cur.len() / side;
            next.par_chunks_mut(rest).enumerate().for_each(|(last, out)| {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = cur[r * side + last];
                }
            });
            std::mem::swap(&mut cur, &mut next);
        }
        Orthant { d: self.d, side, data: cur }
    }
}

fn decode(mut i: usize, side: usize, c: &mut [usize]) {
    for x in c.iter_mut().rev() {
        *x = i % side;
        i /= side;
    }
}

fn axis_weight(x: usize, period: Option<usize>) -> f64 {
    match period {
        _ if x == 0 => 1.0,
        Some(p) if 2 * x == p => 1.0,
        _ => 2.0,
    }
}

/// Cosine transform on the torus Z_P^d restricted to even functions, stored on
/// the folded orthant {0,…,⌊P/2⌋}^d.
#[derive(Clone, Debug)]
pub struct EvenTransform {
    pub period: usize,
    pub d: usize,
    forward: Vec<f64>,
    backward: Vec<f64>,
}

impl EvenTransform {
    pub fn new(d: usize, period: usize) -> Self {
        let side = period / 2 + 1;
        let mut forward = vec![0.0; side * side];
        let mut backward = vec![0.0; side * side];
        let p = period as f64;
        for k in 0..side {
            for n in 0..side {
                // Reduce k·n mod P before the cosine to keep the phase exact.
                let c = (2.0 * std::f64::consts::PI * ((k * n) % period) as f64 / p).cos();
                forward[k * side + n] = axis_weight(n, Some(period)) * c;
                backward[n * side + k] = axis_weight(k, Some(period)) * c / p;
            }
        }
        EvenTransform { period, d, forward, backward }
    }

    pub fn side(&self) -> usize {
        self.period / 2 + 1
    }

    /// f̂(k) = Σ_{n ∈ Z_P^d} f(n) cos(2π k·n/P).
    pub fn forward(&self, f: &Orthant) -> Orthant {
        assert_eq!((f.d, f.side), (self.d, self.side()));
        f.separable(&self.forward)
    }

    /// f(n) = P^{−d} Σ_k f̂(k) cos(2π k·n/P).
    pub fn backward(&self, fh: &Orthant) -> Orthant {
        assert_eq!((fh.d, fh.side), (self.d, self.side()));
        fh.separable(&self.backward)
    }

    /// Periodic convolution of two even functions.
    pub fn convolve(&self, a: &Orthant, b: &Orthant) -> Orthant {
        let ah = self.forward(a);
        let bh = self.forward(b);
        self.backward(&ah.zip_map(&bh, |x, y| x * y))
    }
}
