//! Concrete finite instances: a torus, its Green's matrix, v and ω.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::OpError;
use crate::kernels::{renorm_constants, torus_green};
use crate::probtools::sample_omega;

pub type Mat = DMatrix<f64>;

/// Where ρ and η come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantChoice {
    /// ρ = σ³ − Σ_{n≠0} G³ and η = Σ_n N(n) on the same torus.
    Canonical,
    /// Canonical values shifted to (ρ + 1, η − 1).
    Perturbed,
    Custom {
        rho: f64,
        eta: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub d: usize,
    pub side: usize,
    pub mass: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub seed: u64,
    pub constants: ConstantChoice,
}

impl InstanceConfig {
    /// One-dimensional torus with `sites` sites and the default parameters.
    pub fn ring(sites: usize, seed: u64) -> Self {
        InstanceConfig {
            d: 1,
            side: sites,
            mass: 1.0,
            kappa: 0.4,
            alpha: 0.3,
            seed,
            constants: ConstantChoice::Canonical,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LatticeInstance {
    pub config: InstanceConfig,
    /// L^d sites, row-major over [0, L)^d.
    pub sites: usize,
    pub g0: Mat,
    /// −Δ + m² on the torus, so that g0 = h0⁻¹.
    pub h0: Mat,
    pub sigma: f64,
    pub rho: f64,
    pub eta: f64,
    pub v: Vec<f64>,
    pub omega: Vec<f64>,
}

fn coords(mut i: usize, d: usize, side: usize) -> Vec<i64> {
    let mut c = vec![0i64; d];
    for k in (0..d).rev() {
        c[k] = (i % side) as i64;
        i /= side;
    }
    c
}

fn index(c: &[i64], side: usize) -> usize {
    c.iter().fold(0, |acc, &x| acc * side + x as usize)
}

fn torus_sup(a: &[i64], b: &[i64], side: usize) -> i64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let r = (x - y).rem_euclid(side as i64);
            r.min(side as i64 - r)
        })
        .max()
        .unwrap_or(0)
}

impl LatticeInstance {
    pub fn new(config: InstanceConfig) -> Result<Self, OpError> {
        let InstanceConfig { d, side, mass, kappa, alpha, seed, constants } = config.clone();
        if d == 0 || side < 2 || !(kappa >= 0.0) || !(alpha >= 0.0) {
            return Err(OpError::InvalidParameter(format!("d={d}, L={side}, kappa={kappa}, alpha={alpha}")));
        }
        let sites = side.checked_pow(d as u32).filter(|&n| n <= 4096).ok_or(OpError::TooLarge(side as f64))?;
        let kernel = torus_green(d, side, mass)?;
        let pts: Vec<Vec<i64>> = (0..sites).map(|i| coords(i, d, side)).collect();
        let g0 = Mat::from_fn(sites, sites, |i, j| {
            let diff: Vec<i64> = pts[i].iter().zip(&pts[j]).map(|(a, b)| a - b).collect();
            kernel.value(&diff).expect("torus kernel covers every offset")
        });
        let mut h0 = Mat::from_diagonal_element(sites, sites, 2.0 * d as f64 + mass * mass);
        for (i, p) in pts.iter().enumerate() {
            for k in 0..d {
                for step in [1, side as i64 - 1] {
                    let mut q = p.clone();
                    q[k] = (q[k] + step) % side as i64;
                    h0[(i, index(&q, side))] -= 1.0;
                }
            }
        }
        let origin = vec![(side / 2) as i64; d];
        let v = pts.iter().map(|p| kappa * (torus_sup(p, &origin, side).max(1) as f64).powf(-alpha)).collect();
        let omega = sample_omega(seed, sites).as_f64();
        let canon = renorm_constants(&kernel)?;
        let (rho, eta) = match constants {
            ConstantChoice::Canonical => (canon.rho, canon.eta),
            ConstantChoice::Perturbed => (canon.rho + 1.0, canon.eta - 1.0),
            ConstantChoice::Custom { rho, eta } => (rho, eta),
        };
        Ok(LatticeInstance { config, sites, g0, h0, sigma: canon.sigma, rho, eta, v, omega })
    }

    /// Same instance with v → c·v (κ → cκ).
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.config.kappa *= c;
        out.v.iter_mut().for_each(|x| *x *= c);
        out
    }

    /// Same geometry and field with other ρ, η.
    pub fn with_constants(&self, rho: f64, eta: f64) -> Self {
        let mut out = self.clone();
        out.config.constants = ConstantChoice::Custom { rho, eta };
        out.rho = rho;
        out.eta = eta;
        out
    }

    /// G̃₀ = G₀ − σI.
    pub fn gt(&self) -> Mat {
        let mut g = self.g0.clone();
        for i in 0..self.sites {
            g[(i, i)] -= self.sigma;
        }
        g
    }

    pub fn v_pow(&self, k: i32) -> Vec<f64> {
        self.v.iter().map(|x| x.powi(k)).collect()
    }

    /// V = vω.
    pub fn potential(&self) -> Vec<f64> {
        self.v.iter().zip(&self.omega).map(|(v, w)| v * w).collect()
    }

    /// 4η − 3σ⁵ + 5σ²ρ.
    pub fn c6(&self) -> f64 {
        4.0 * self.eta - 3.0 * self.sigma.powi(5) + 5.0 * self.sigma.powi(2) * self.rho
    }
}

/// diag(d)·m.
pub fn scale_rows(m: &Mat, d: &[f64]) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)])
}

/// m·diag(d).
pub fn scale_cols(m: &Mat, d: &[f64]) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[j])
}

pub fn diag(d: &[f64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

/// Largest |entry|.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}
