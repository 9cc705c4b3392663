//! H_ω = −Δ + Ṽ on a box, its positivity certificate and Green's columns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::{Boundary, BoxGeometry};
use super::potential::{counterterms, Counterterms, FreeData, PotentialStage};
use super::solver::{conjugate_gradient, dot, lanczos_min, LanczosEstimate};
use super::FvError;
use crate::probtools::sample_omega;

/// Lanczos steps used by the positivity check.
pub const LANCZOS_STEPS: usize = 40;
/// Default CG tolerance for Green's columns.
pub const GREEN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantSource {
    /// Free-lattice σ, ρ, η for the box dimension.
    Canonical,
    /// Free-lattice σ with the given ρ, η.
    Custom { rho: f64, eta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianConfig {
    pub d: usize,
    pub side: usize,
    pub boundary: Boundary,
    pub stage: PotentialStage,
    pub kappa: f64,
    pub alpha: f64,
    pub seed: u64,
    pub constants: ConstantSource,
    /// R₆ truncation radius; `None` picks the largest radius ≤ 6 within the
    /// work budget.
    pub r6_radius: Option<usize>,
}

impl HamiltonianConfig {
    pub fn dirichlet(d: usize, side: usize, stage: PotentialStage, kappa: f64, alpha: f64, seed: u64) -> Self {
        HamiltonianConfig {
            d,
            side,
            boundary: Boundary::Dirichlet,
            stage,
            kappa,
            alpha,
            seed,
            constants: ConstantSource::Canonical,
            r6_radius: None,
        }
    }

    pub fn geometry(&self) -> Result<BoxGeometry, FvError> {
        BoxGeometry::new(self.d, self.side, self.boundary)
    }

    /// Free kernel and constants this configuration asks for.
    pub fn free_data(&self) -> Result<FreeData, FvError> {
        let radius = 2 * self.r6_radius.unwrap_or(super::potential::R6_RADIUS_MAX) + 2;
        match self.constants {
            ConstantSource::Canonical => FreeData::canonical(self.d, radius),
            ConstantSource::Custom { rho, eta } => FreeData::with_constants(self.d, radius, rho, eta),
        }
    }

    /// ω-independent part, reusable across seeds.
    pub fn counterterms(&self, free: &FreeData) -> Result<Counterterms, FvError> {
        counterterms(&self.geometry()?, self.stage, self.kappa, self.alpha, free, self.r6_radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PdCertificate {
    /// floor(−Δ) − max|Ṽ| > 0, a rigorous bound.
    Weyl { floor: f64, max_potential: f64 },
    /// Smallest Ritz value after a few Lanczos steps.
    Lanczos(LanczosEstimate),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub config: HamiltonianConfig,
    pub geometry: BoxGeometry,
    pub v: Vec<f64>,
    pub omega: Vec<f64>,
    /// Ṽ(n) for the configured stage.
    pub potential: Vec<f64>,
    /// 2d (+m²) + Ṽ(n).
    pub diagonal: Vec<f64>,
    pub r6_radius: Option<usize>,
    pub certificate: PdCertificate,
}

/// Assemble from scratch (computes the free data and counterterms).
pub fn assemble(config: &HamiltonianConfig) -> Result<Hamiltonian, FvError> {
    let free = config.free_data()?;
    let ct = config.counterterms(&free)?;
    assemble_with(config, &ct)
}

/// Assemble with precomputed counterterms; only ω depends on the seed.
pub fn assemble_with(config: &HamiltonianConfig, ct: &Counterterms) -> Result<Hamiltonian, FvError> {
    let geometry = config.geometry()?;
    if ct.values.len() != geometry.sites()
        || ct.stage != config.stage
        || ct.kappa != config.kappa
        || ct.alpha != config.alpha
    {
        return Err(FvError::InvalidParameter("counterterms do not match the configuration".into()));
    }
    let omega = sample_omega(config.seed, geometry.sites()).as_f64();
    let potential: Vec<f64> = ct.v.iter().zip(&omega).zip(&ct.values).map(|((v, w), c)| v * w + c).collect();
    let base = 2.0 * config.d as f64
        + match config.boundary {
            Boundary::Torus { mass } => mass * mass,
            Boundary::Dirichlet => 0.0,
        };
    let diagonal = potential.iter().map(|p| base + p).collect();
    let mut h = Hamiltonian {
        config: config.clone(),
        geometry,
        v: ct.v.clone(),
        omega,
        potential,
        diagonal,
        r6_radius: ct.r6_radius,
        certificate: PdCertificate::Weyl { floor: 0.0, max_potential: 0.0 },
    };
    h.certificate = h.certify()?;
    Ok(h)
}

impl Hamiltonian {
    pub fn sites(&self) -> usize {
        self.diagonal.len()
    }

    /// y = Hx.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.geometry.apply_laplacian(x, y);
        y.par_iter_mut().zip(x).zip(&self.potential).for_each(|((yi, xi), p)| *yi += p * xi);
    }

    fn certify(&self) -> Result<PdCertificate, FvError> {
        let floor = self.geometry.laplacian_floor();
        let max_potential = self.potential.iter().fold(0.0, |m: f64, p| m.max(p.abs()));
        if floor > max_potential {
            return Ok(PdCertificate::Weyl { floor, max_potential });
        }
        let start: Vec<f64> = (0..self.sites()).map(|i| 1.0 + 0.01 * ((i % 7) as f64)).collect();
        let est = lanczos_min(|x, y| self.apply(x, y), &start, LANCZOS_STEPS)?;
        if est.ritz_min <= 0.0 {
            return Err(FvError::NotPositiveDefinite(format!("smallest Ritz value {:e}", est.ritz_min)));
        }
        Ok(PdCertificate::Lanczos(est))
    }

    /// Solve Hx = b to relative tolerance `tol`.
    pub fn solve(&self, b: &[f64], tol: f64) -> Result<super::solver::Solve, FvError> {
        conjugate_gradient(|x, y| self.apply(x, y), b, tol, 20 * self.sites().max(500))
    }

    /// Column G(·, source) = H⁻¹e_source.
    pub fn green_column(&self, source: usize, tol: f64) -> Result<GreenColumn, FvError> {
        if source >= self.sites() {
            return Err(FvError::InvalidParameter(format!("source {source} outside the box")));
        }
        let mut e = vec![0.0; self.sites()];
        e[source] = 1.0;
        let s = self.solve(&e, tol)?;
        let mut hx = vec![0.0; self.sites()];
        self.apply(&s.x, &mut hx);
        let rayleigh = dot(&s.x, &hx);
        if !(rayleigh > 0.0) {
            return Err(FvError::NotPositiveDefinite(format!("xᵀHx = {rayleigh:e}")));
        }
        Ok(GreenColumn {
            source,
            values: s.x,
            iterations: s.iterations,
            relative_residual: s.relative_residual,
            rayleigh,
        })
    }

    /// Several columns solved in parallel, returned in source order.
    pub fn green_columns(&self, sources: &[usize], tol: f64) -> Result<Vec<GreenColumn>, FvError> {
        sources.par_iter().map(|&s| self.green_column(s, tol)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenColumn {
    pub source: usize,
    pub values: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
    /// xᵀHx, positive for a positive definite H.
    pub rayleigh: f64,
}
