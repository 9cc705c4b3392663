//! The renormalized potential V + σv² − ρv⁴ + c₆v⁶ + R₆ on a box, with the
//! free-lattice constants and R₆ from truncated free-kernel sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::BoxGeometry;
use super::FvError;
use crate::kernels::{free_green, renorm_constants, GreenKernel, RenormConstants};

/// Largest R₆ radius considered.
pub const R6_RADIUS_MAX: usize = 6;
/// Work budget (sites × ball²) used to pick the default R₆ radius.
pub const R6_WORK_BUDGET: f64 = 1e10;
/// Free-kernel box used for the constants.
pub const FREE_RADIUS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialStage {
    /// V = vω only.
    Bare,
    /// V + σv².
    V2,
    /// V + σv² − ρv⁴.
    V4,
    /// V + σv² − ρv⁴ + (4η − 3σ⁵ + 5σ²ρ)v⁶ + R₆.
    V6,
}

impl std::str::FromStr for PotentialStage {
    type Err = FvError;

    fn from_str(s: &str) -> Result<Self, FvError> {
        match s.to_ascii_lowercase().as_str() {
            "bare" => Ok(PotentialStage::Bare),
            "v2" => Ok(PotentialStage::V2),
            "v4" => Ok(PotentialStage::V4),
            "v6" => Ok(PotentialStage::V6),
            other => Err(FvError::InvalidParameter(format!("unknown stage `{other}`"))),
        }
    }
}

/// Free kernel G₀ on Z^d plus σ, ρ, η.
#[derive(Clone, Debug)]
pub struct FreeData {
    pub kernel: GreenKernel,
    pub sigma: f64,
    /// `None` when d ≤ 4 and none were supplied (Σ G³ diverges).
    pub rho_eta: Option<(f64, f64)>,
    pub constants: Option<RenormConstants>,
}

impl FreeData {
    /// Canonical free-lattice values; ρ, η only where they converge.
    pub fn canonical(d: usize, radius: usize) -> Result<Self, FvError> {
        let kernel = free_green(d, 0.0, radius.max(FREE_RADIUS))?;
        let sigma = kernel.sigma();
        let constants = if d >= 5 { Some(renorm_constants(&kernel)?) } else { None };
        Ok(FreeData { sigma, rho_eta: constants.as_ref().map(|c| (c.rho, c.eta)), constants, kernel })
    }

    /// Free kernel with user-supplied ρ, η.
    pub fn with_constants(d: usize, radius: usize, rho: f64, eta: f64) -> Result<Self, FvError> {
        let kernel = free_green(d, 0.0, radius.max(2))?;
        Ok(FreeData { sigma: kernel.sigma(), rho_eta: Some((rho, eta)), constants: None, kernel })
    }

    pub fn rho_eta(&self) -> Result<(f64, f64), FvError> {
        self.rho_eta
            .ok_or_else(|| FvError::InvalidParameter(format!("ρ, η diverge for d = {}; supply them", self.kernel.d)))
    }

    pub fn c6(&self) -> Result<f64, FvError> {
        let (rho, eta) = self.rho_eta()?;
        let s = self.sigma;
        Ok(4.0 * eta - 3.0 * s.powi(5) + 5.0 * s * s * rho)
    }

    fn gt(&self, a: &[i64]) -> Result<f64, FvError> {
        if a.iter().all(|&x| x == 0) {
            return Ok(0.0);
        }
        self.kernel
            .value(a)
            .ok_or_else(|| FvError::InvalidParameter(format!("free kernel box too small for offset {a:?}")))
    }
}

fn ball(d: usize, r: usize) -> Vec<Vec<i64>> {
    let side = 2 * r + 1;
    (0..side.pow(d as u32))
        .map(|mut i| {
            let mut c = vec![0i64; d];
            for x in c.iter_mut().rev() {
                *x = (i % side) as i64 - r as i64;
                i /= side;
            }
            c
        })
        .collect()
}

/// Largest radius ≤ 6 whose R₆ sum fits the work budget (at least 1).
pub fn default_r6_radius(geom: &BoxGeometry) -> usize {
    (1..=R6_RADIUS_MAX)
        .rev()
        .find(|&r| geom.sites() as f64 * ((2 * r + 1) as f64).powi(2 * geom.d as i32) <= R6_WORK_BUDGET)
        .unwrap_or(1)
}

/// R₆(n) = v²_n Σ_{a,c} G̃(a) v²_{n+a} M(c) v²_{n+a+c} G̃(a+c) over
/// |a|_∞, |c|_∞ ≤ radius, M(0) = ρ − σ³, M(c) = G̃(c)³. Points outside a
/// Dirichlet box keep their Z^d profile.
pub fn r6_diagonal(
    geom: &BoxGeometry,
    kappa: f64,
    alpha: f64,
    free: &FreeData,
    radius: usize,
) -> Result<Vec<f64>, FvError> {
    let (rho, _) = free.rho_eta()?;
    let d = geom.d;
    if free.kernel.d != d {
        return Err(FvError::InvalidParameter("free kernel dimension differs from the box".into()));
    }
    if kappa == 0.0 {
        return Ok(vec![0.0; geom.sites()]);
    }
    let offsets = ball(d, radius);
    let m = |c: &[i64]| -> Result<f64, FvError> {
        if c.iter().all(|&x| x == 0) {
            Ok(rho - free.sigma.powi(3))
        } else {
            Ok(free.gt(c)?.powi(3))
        }
    };
    let mut coef = Vec::with_capacity(offsets.len() * offsets.len());
    for a in &offsets {
        let ga = free.gt(a)?;
        for c in &offsets {
            let ac: Vec<i64> = a.iter().zip(c).map(|(x, y)| x + y).collect();
            coef.push(ga * m(c)? * free.gt(&ac)?);
        }
    }
    // v² on the box padded by 2·radius.
    let pad = 2 * radius as i64;
    let ext = geom.side + 4 * radius;
    let strides: Vec<usize> = (0..d).map(|k| ext.pow((d - 1 - k) as u32)).collect();
    let w: Vec<f64> = (0..ext.pow(d as u32))
        .into_par_iter()
        .map(|mut i| {
            let mut c = vec![0i64; d];
            for x in c.iter_mut().rev() {
                *x = (i % ext) as i64 - pad;
                i /= ext;
            }
            (kappa * geom.norm(&c).powf(-alpha)).powi(2)
        })
        .collect();
    let lin = |c: &[i64]| -> isize { c.iter().zip(&strides).map(|(&x, &s)| x as isize * s as isize).sum() };
    let off: Vec<isize> = offsets.iter().map(|c| lin(c)).collect();
    let nb = offsets.len();
    let values = (0..geom.sites())
        .into_par_iter()
        .map(|i| {
            let c = geom.coords(i);
            let base = lin(&c.iter().map(|x| x + pad).collect::<Vec<_>>());
            let mut s = 0.0;
            for (ia, &oa) in off.iter().enumerate() {
                let row = &coef[ia * nb..(ia + 1) * nb];
                let pa = base + oa;
                let mut inner = 0.0;
                for (k, &oc) in off.iter().enumerate() {
                    inner += row[k] * w[(pa + oc) as usize];
                }
                s += w[pa as usize] * inner;
            }
            w[base as usize] * s
        })
        .collect();
    Ok(values)
}

/// ω-independent part of the potential and the profile v.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterterms {
    pub stage: PotentialStage,
    pub kappa: f64,
    pub alpha: f64,
    pub v: Vec<f64>,
    /// σv² − ρv⁴ + c₆v⁶ + R₆ truncated to the stage.
    pub values: Vec<f64>,
    pub r6_radius: Option<usize>,
}

pub fn counterterms(
    geom: &BoxGeometry,
    stage: PotentialStage,
    kappa: f64,
    alpha: f64,
    free: &FreeData,
    r6_radius: Option<usize>,
) -> Result<Counterterms, FvError> {
    if !(kappa >= 0.0 && kappa.is_finite() && alpha >= 0.0 && alpha.is_finite()) {
        return Err(FvError::InvalidParameter(format!("κ = {kappa}, α = {alpha}")));
    }
    let v = super::lattice::profile(geom, kappa, alpha);
    let sigma = free.sigma;
    let mut values: Vec<f64> = match stage {
        PotentialStage::Bare => vec![0.0; v.len()],
        _ => v.iter().map(|x| sigma * x * x).collect(),
    };
    if matches!(stage, PotentialStage::V4 | PotentialStage::V6) {
        let (rho, _) = free.rho_eta()?;
        values.iter_mut().zip(&v).for_each(|(y, x)| *y -= rho * x.powi(4));
    }
    let mut radius_used = None;
    if stage == PotentialStage::V6 {
        let c6 = free.c6()?;
        let radius = r6_radius.unwrap_or_else(|| default_r6_radius(geom));
        let r6 = r6_diagonal(geom, kappa, alpha, free, radius)?;
        values.iter_mut().zip(&v).zip(&r6).for_each(|((y, x), r)| *y += c6 * x.powi(6) + r);
        radius_used = Some(radius);
    }
    Ok(Counterterms { stage, kappa, alpha, v, values, r6_radius: radius_used })
}
