//! Conjugate gradients and a Lanczos estimate of the bottom of the spectrum
//! for symmetric operators given by their action.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FvError;

const CHUNK: usize = 4096;

/// Dot product summed in fixed chunks, reduced in order (thread-count
/// independent).
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> =
        a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum()).collect();
    partial.iter().sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// y ← y + c·x
fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    y.par_chunks_mut(CHUNK).zip(x.par_chunks(CHUNK)).for_each(|(ys, xs)| {
        ys.iter_mut().zip(xs).for_each(|(a, b)| *a += c * b);
    });
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solve {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// ‖b − Ax‖₂ / ‖b‖₂ (recomputed, not the recursive estimate).
    pub relative_residual: f64,
}

/// Solve Ax = b for symmetric positive definite A. Fails with
/// `NotPositiveDefinite` when a search direction has pᵀAp ≤ 0.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Solve, FvError> {
    let n = b.len();
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(Solve { x: vec![0.0; n], iterations: 0, relative_residual: 0.0 });
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    while rr.sqrt() > tol * bnorm {
        if iterations == max_iter {
            return Err(FvError::NoConvergence { iterations, residual: rr.sqrt() / bnorm });
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(FvError::NotPositiveDefinite(format!("CG direction with pᵀHp = {pap:e}")));
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        p.par_chunks_mut(CHUNK).zip(r.par_chunks(CHUNK)).for_each(|(ps, rs)| {
            ps.iter_mut().zip(rs).for_each(|(a, b)| *a = b + beta * *a);
        });
        iterations += 1;
    }
    apply(&x, &mut ap);
    let res: Vec<f64> = b.iter().zip(&ap).map(|(u, v)| u - v).collect();
    Ok(Solve { relative_residual: norm2(&res) / bnorm, x, iterations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanczosEstimate {
    pub steps: usize,
    /// Smallest Ritz value (an upper bound on λ_min).
    pub ritz_min: f64,
    /// |β_k s_k| for that Ritz pair; λ_min lies within this of some Ritz value.
    pub residual: f64,
}

/// k steps of Lanczos with full reorthogonalization from `start`.
pub fn lanczos_min(apply: impl Fn(&[f64], &mut [f64]), start: &[f64], k: usize) -> Result<LanczosEstimate, FvError> {
    let n = start.len();
    let k = k.min(n).max(1);
    let s = norm2(start);
    if s == 0.0 {
        return Err(FvError::InvalidParameter("zero Lanczos start vector".into()));
    }
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / s).collect()];
    let mut alphas = Vec::with_capacity(k);
    let mut betas: Vec<f64> = Vec::with_capacity(k);
    let mut w = vec![0.0; n];
    for j in 0..k {
        apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alphas.push(a);
        for q in &basis {
            let c = dot(&w, q);
            axpy(-c, q, &mut w);
        }
        let b = norm2(&w);
        betas.push(b);
        if j + 1 == k || b <= 1e-12 * a.abs().max(1.0) {
            break;
        }
        basis.push(w.iter().map(|x| x / b).collect());
    }
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (imin, &ritz_min) =
        eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty tridiagonal");
    let residual = (betas[m - 1] * eig.eigenvectors[(m - 1, imin)]).abs();
    Ok(LanczosEstimate { steps: m, ritz_min, residual })
}
