//! Degree-graded Born expansion of (H₀ + Ṽ(t))⁻¹ with Ṽ(t) = Σ_j t^j D_j.

use serde::{Deserialize, Serialize};

use super::instance::{max_abs, scale_rows, LatticeInstance, Mat};
use super::special::SpecialOps;
use super::OpError;
use crate::graphcalc::Stage;

/// Highest degree carried.
pub const MAX_DEGREE: usize = 8;

/// Coefficients C₀..C_k of t⁰..t^k under v → t·v.
#[derive(Clone, Debug)]
pub struct GradedOperator {
    pub coeffs: Vec<Mat>,
}

impl GradedOperator {
    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self, k: usize) -> &Mat {
        &self.coeffs[k]
    }

    /// Truncated product.
    pub fn mul(&self, other: &GradedOperator) -> GradedOperator {
        let top = self.max_degree().min(other.max_degree());
        let n = self.coeffs[0].nrows();
        let coeffs = (0..=top)
            .map(|k| (0..=k).fold(Mat::zeros(n, n), |acc, i| acc + &self.coeffs[i] * &other.coeffs[k - i]))
            .collect();
        GradedOperator { coeffs }
    }

    /// Σ_k C_k (t = 1).
    pub fn total(&self) -> Mat {
        let n = self.coeffs[0].nrows();
        self.coeffs.iter().fold(Mat::zeros(n, n), |acc, c| acc + c)
    }
}

/// The diagonal pieces D_j of Ṽ by degree j, for the chosen stages.
pub fn potential_pieces(inst: &LatticeInstance, ops: &SpecialOps, stages: &[Stage]) -> Vec<(usize, Vec<f64>)> {
    let mut by_degree: Vec<(usize, Vec<f64>)> = Vec::new();
    for &stage in stages {
        let piece: Vec<f64> = match stage {
            Stage::V => inst.potential(),
            Stage::Sigma2 => inst.v_pow(2).iter().map(|x| inst.sigma * x).collect(),
            Stage::Rho4 => inst.v_pow(4).iter().map(|x| -inst.rho * x).collect(),
            Stage::C6 => inst.v_pow(6).iter().map(|x| inst.c6() * x).collect(),
            Stage::R6 => ops.r6.clone(),
        };
        let j = stage.order();
        match by_degree.iter_mut().find(|(d, _)| *d == j) {
            Some((_, acc)) => acc.iter_mut().zip(&piece).for_each(|(a, p)| *a += p),
            None => by_degree.push((j, piece)),
        }
    }
    by_degree.sort_by_key(|(d, _)| *d);
    by_degree
}

/// Ṽ at t = 1.
pub fn full_potential(inst: &LatticeInstance, ops: &SpecialOps, stages: &[Stage]) -> Vec<f64> {
    let mut out = vec![0.0; inst.sites];
    for (_, p) in potential_pieces(inst, ops, stages) {
        out.iter_mut().zip(&p).for_each(|(o, x)| *o += x);
    }
    out
}

/// All five stages.
pub fn all_stages() -> Vec<Stage> {
    vec![Stage::V, Stage::Sigma2, Stage::Rho4, Stage::C6, Stage::R6]
}

/// C₀ = G₀, C_k = −G₀ Σ_j D_j C_{k−j}.
pub fn graded_born(
    inst: &LatticeInstance,
    ops: &SpecialOps,
    stages: &[Stage],
    max_deg: usize,
) -> Result<GradedOperator, OpError> {
    if max_deg > MAX_DEGREE {
        return Err(OpError::DegreeOverflow(max_deg));
    }
    let pieces = potential_pieces(inst, ops, stages);
    let n = inst.sites;
    let mut coeffs: Vec<Mat> = vec![inst.g0.clone()];
    for k in 1..=max_deg {
        let mut s = Mat::zeros(n, n);
        for (j, d) in &pieces {
            if *j <= k {
                s += scale_rows(&coeffs[k - j], d);
            }
        }
        coeffs.push(-(&inst.g0 * s));
    }
    Ok(GradedOperator { coeffs })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornResidual {
    /// max_k ‖H₀C_k + Σ_j D_j C_{k−j} − δ_{k0}I‖_max / ‖C_k‖_max.
    pub max_relative: f64,
    pub per_degree: Vec<f64>,
}

/// Defining recurrence checked with H₀ (not G₀).
pub fn born_residual(inst: &LatticeInstance, ops: &SpecialOps, stages: &[Stage], g: &GradedOperator) -> BornResidual {
    let pieces = potential_pieces(inst, ops, stages);
    let n = inst.sites;
    let per_degree: Vec<f64> = (0..=g.max_degree())
        .map(|k| {
            let mut r = &inst.h0 * &g.coeffs[k];
            for (j, d) in &pieces {
                if *j <= k {
                    r += scale_rows(&g.coeffs[k - j], d);
                }
            }
            if k == 0 {
                r -= Mat::identity(n, n);
            }
            let scale = max_abs(&g.coeffs[k]);
            if scale > 0.0 {
                max_abs(&r) / scale
            } else {
                max_abs(&r)
            }
        })
        .collect();
    BornResidual { max_relative: per_degree.iter().cloned().fold(0.0, f64::max), per_degree }
}
