//! σ, ρ, η and the derived kernels K, M₄, M, N, Ñ, G₀Ñ.

use serde::{Deserialize, Serialize};

use super::green::{Geometry, GreenKernel};
use super::orthant::{EvenTransform, Orthant};
use super::KernelError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormConstants {
    pub d: usize,
    pub sigma: f64,
    pub rho: f64,
    pub eta: f64,
    /// |Σ_n M(n)| with M(0) = ρ − σ³.
    pub residual_m0: f64,
    /// |Σ_n (N(n) − η δ_{n,0})|.
    pub residual_n0: f64,
    /// Bound on the discarded Σ_{|n|>R} |G(n)|³ (0 on a torus).
    pub tail_bound: f64,
    pub source: String,
}

impl RenormConstants {
    /// Canonical constants with ρ, η shifted (σ is fixed by G₀'s diagonal).
    pub fn perturbed(&self, d_rho: f64, d_eta: f64) -> Self {
        RenormConstants {
            rho: self.rho + d_rho,
            eta: self.eta + d_eta,
            source: format!("{} perturbed", self.source),
            ..self.clone()
        }
    }
}

/// Largest tail allowed when truncating the free-lattice sums.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Periodic workspace for the convolutions behind N and G₀Ñ.
struct Workspace {
    tr: EvenTransform,
    period: Option<usize>,
    /// Box side of the stored kernel (free) or folded torus side.
    side: usize,
}

impl Workspace {
    fn new(kernel: &GreenKernel) -> Result<Self, KernelError> {
        match kernel.geometry {
            Geometry::Torus { side, .. } => {
                Ok(Workspace { tr: EvenTransform::new(kernel.d, side), period: Some(side), side: kernel.values.side })
            }
            Geometry::Free { radius } | Geometry::Extrapolated { side: radius } => {
                let radius = if matches!(kernel.geometry, Geometry::Extrapolated { .. }) { radius / 4 } else { radius };
                // Period ≥ 3R + 1 keeps box-restricted convolutions alias free.
                Ok(Workspace { tr: EvenTransform::new(kernel.d, 3 * radius + 2), period: None, side: radius + 1 })
            }
        }
    }

    fn embed(&self, f: &Orthant) -> Orthant {
        if self.period.is_some() {
            return f.clone();
        }
        let side = self.side;
        Orthant::from_fn(f.d, self.tr.side(), |c| if c.iter().all(|&x| x < side) { f.get(c) } else { 0.0 })
    }

    fn restrict(&self, f: &Orthant) -> Orthant {
        if self.period.is_some() {
            return f.clone();
        }
        Orthant::from_fn(f.d, self.side, |c| f.get(c))
    }

    /// Box- or torus-restricted convolution a ∗ b.
    fn convolve(&self, a: &Orthant, b: &Orthant) -> Orthant {
        self.restrict(&self.tr.convolve(&self.embed(a), &self.embed(b)))
    }
}

pub fn renorm_constants(kernel: &GreenKernel) -> Result<RenormConstants, KernelError> {
    let ws = Workspace::new(kernel)?;
    let sigma = kernel.sigma();
    let gt = kernel.tilde();
    let tail_bound = cube_tail_bound(kernel);
    if tail_bound > TAIL_LIMIT {
        return Err(KernelError::TailTooLarge { bound: tail_bound, limit: TAIL_LIMIT });
    }
    let cube_sum = gt.unfolded_sum(ws.period, |v| v * v * v);
    let rho = sigma.powi(3) - cube_sum;
    let f = gt.map(|v| v * v);
    let ff = ws.convolve(&f, &f);
    let n = gt.zip_map(&ff, |a, b| a * b);
    let eta = match ws.period {
        // Parseval: η = L^{−d} Σ_k Ĝ̃(k) F̂(k)², an independent route to Σ N.
        Some(p) => {
            let gh = ws.tr.forward(&gt);
            let fh = ws.tr.forward(&f);
            let prod = gh.zip_map(&fh, |g, f| g * f * f);
            prod.unfolded_sum(Some(p), |v| v) / (p as f64).powi(kernel.d as i32)
        }
        None => n.unfolded_sum(None, |v| v),
    };
    let m_sum = cube_sum + (rho - sigma.powi(3));
    let n_sum = n.unfolded_sum(ws.period, |v| v) - eta;
    Ok(RenormConstants {
        d: kernel.d,
        sigma,
        rho,
        eta,
        residual_m0: m_sum.abs(),
        residual_n0: n_sum.abs(),
        tail_bound,
        source: kernel.describe(),
    })
}

/// Σ_{|n|_∞ > R} |G(n)|³ bounded with |G(n)| ≤ C |n|_∞^{−(d−2)}, C fitted on
/// the outer half of the box with a 10% margin.
pub fn cube_tail_bound(kernel: &GreenKernel) -> f64 {
    let radius = match kernel.geometry {
        Geometry::Torus { .. } => return 0.0,
        Geometry::Free { radius } => radius,
        Geometry::Extrapolated { side } => side / 4,
    };
    let d = kernel.d as i32;
    let p = (d - 2) as f64;
    let mut c: f64 = 0.0;
    for i in 0..kernel.values.len() {
        let co = kernel.values.coords(i);
        let r = *co.iter().max().unwrap();
        if 2 * r >= radius && r > 0 {
            c = c.max(kernel.values.data[i].abs() * (r as f64).powf(p));
        }
    }
    let c = 1.1 * c;
    let shell = |r: f64| (2.0 * r + 1.0).powi(d) - (2.0 * r - 1.0).powi(d);
    let q = 3.0 * p;
    if q <= d as f64 {
        return f64::INFINITY;
    }
    let mut s = 0.0;
    let cutoff = 20_000usize;
    for r in radius + 1..=cutoff {
        let r = r as f64;
        s += shell(r) * r.powf(-q);
    }
    // shell(r) ≤ 2d(2r+1)^{d−1}·… ≤ 2d·3^{d−1} r^{d−1} for r ≥ 1.
    let k = 2.0 * d as f64 * 3f64.powi(d - 1);
    let rest = k * (cutoff as f64).powf(d as f64 - q) / (q - d as f64);
    c.powi(3) * (s + rest)
}

/// K, M₄, M, N, Ñ and G₀Ñ as translation-invariant kernels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivedKernels {
    pub k: Orthant,
    pub m4: Orthant,
    pub m: Orthant,
    pub n: Orthant,
    pub ntilde: Orthant,
    pub g0n: Orthant,
    pub period: Option<usize>,
    /// Set for free kernels, whose sums are truncated to the stored box.
    pub truncation_warning: Option<String>,
}

pub fn derived_kernels(kernel: &GreenKernel, c: &RenormConstants) -> Result<DerivedKernels, KernelError> {
    let ws = Workspace::new(kernel)?;
    let gt = kernel.tilde();
    let k = kernel.values.map(|v| v * v * v);
    let m4 = gt.map(|v| v * v * v);
    let mut m = m4.clone();
    m.data[0] = c.rho - c.sigma.powi(3);
    let f = gt.map(|v| v * v);
    let n = gt.zip_map(&ws.convolve(&f, &f), |a, b| a * b);
    let mut ntilde = n.clone();
    ntilde.data[0] -= c.eta;
    let g0n = match ws.period {
        Some(_) => {
            // Σ_n Ñ(n) = 0 by the choice of η, so the k = 0 mode of G₀ (1/m²
            // on a massive torus) multiplies an exact zero; it is dropped
            // rather than amplifying round-off.
            let mut prod = ws.tr.forward(&kernel.values).zip_map(&ws.tr.forward(&ntilde), |a, b| a * b);
            prod.data[0] = 0.0;
            ws.tr.backward(&prod)
        }
        None => ws.convolve(&kernel.values, &ntilde),
    };
    let truncation_warning = ws.period.is_none().then(|| format!("sums truncated to |n|_∞ ≤ {}", ws.side - 1));
    Ok(DerivedKernels { k, m4, m, n, ntilde, g0n, period: ws.period, truncation_warning })
}
