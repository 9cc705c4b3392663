//! The extended state ζ = ξ − G(W + Ṽ)ξ with ξ = δ̂₀ + Σ_{k≥1}(G₀W)^k δ̂₀.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{assemble_with, Hamiltonian, HamiltonianConfig, GREEN_TOL};
use super::lattice::BoxGeometry;
use super::potential::FreeData;
use super::solver::{conjugate_gradient, norm2, norm_inf};
use super::FvError;

/// Default truncation radius of W.
pub const W_RADIUS: usize = 2;
/// Largest successive-term ratio accepted in the Neumann series.
pub const NEUMANN_RATIO: f64 = 0.5;
pub const NEUMANN_MAX_TERMS: usize = 60;
/// Bound on dev(κ)/√κ across the sweep (max / min).
pub const SQRT_SPREAD_LIMIT: f64 = 4.0;

/// W x(n) = v²_n Σ_{|a|_∞ ≤ r} M(a) v²_{n+a} x(n+a), M(0) = ρ − σ³,
/// M(a) = G̃(a)³, restricted to the box.
#[derive(Clone, Debug)]
pub struct WOperator {
    geom: BoxGeometry,
    w: Vec<f64>,
    offsets: Vec<(Vec<i64>, f64)>,
    pub radius: usize,
    /// max v⁴ · Σ_{|a|_∞ > r} |M(a)| over the free-kernel box.
    pub tail: f64,
}

impl WOperator {
    pub fn new(geom: &BoxGeometry, v: &[f64], free: &FreeData, radius: usize) -> Result<Self, FvError> {
        let (rho, _) = free.rho_eta()?;
        let sigma3 = free.sigma.powi(3);
        let values = free.kernel.tilde();
        let period = free.kernel.period();
        let d = geom.d;
        let mut offsets = Vec::new();
        let mut tail = 0.0;
        for i in 0..values.len() {
            let c = values.coords(i);
            let m = if c.iter().all(|&x| x == 0) { rho - sigma3 } else { values.get(&c).powi(3) };
            let sup = c.iter().copied().max().unwrap_or(0);
            if sup > radius {
                tail += m.abs() * values.multiplicity(i, period);
                continue;
            }
            // Unfold the orthant representative to every sign pattern.
            let nz: Vec<usize> = (0..d).filter(|&k| c[k] != 0).collect();
            for signs in 0..(1usize << nz.len()) {
                let mut a: Vec<i64> = c.iter().map(|&x| x as i64).collect();
                for (b, &k) in nz.iter().enumerate() {
                    if signs >> b & 1 == 1 {
                        a[k] = -a[k];
                    }
                }
                offsets.push((a, m));
            }
        }
        let w: Vec<f64> = v.iter().map(|x| x * x).collect();
        let wmax = w.iter().fold(0.0, |m: f64, x| m.max(*x));
        Ok(WOperator { geom: geom.clone(), w, offsets, radius, tail: wmax * wmax * tail })
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = &self.geom;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            if self.w[i] == 0.0 {
                *yi = 0.0;
                return;
            }
            let c = g.coords(i);
            let mut s = 0.0;
            let mut t = c.clone();
            for (a, m) in &self.offsets {
                for k in 0..c.len() {
                    t[k] = c[k] + a[k];
                }
                if let Some(j) = g.index(&t) {
                    s += m * self.w[j] * x[j];
                }
            }
            *yi = self.w[i] * s;
        });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeumannTerm {
    pub k: usize,
    pub norm_inf: f64,
    /// ‖term_k‖∞ / ‖term_{k−1}‖∞.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedStateResult {
    pub kappa: f64,
    pub seed: u64,
    pub zeta: Vec<f64>,
    pub xi: Vec<f64>,
    /// ‖Hζ‖∞ over the inner half-box.
    pub residual_inf: f64,
    /// ‖ζ − 1‖∞ over the inner half-box.
    pub deviation_inf: f64,
    pub neumann: Vec<NeumannTerm>,
    pub w_radius: usize,
    pub w_tail: f64,
    /// Neumann remainder plus W tail, propagated to the residual.
    pub truncation_estimate: f64,
    /// Solver tolerance times the norms of the solved right-hand sides.
    pub solver_estimate: f64,
    pub solve_iterations: usize,
}

impl ExtendedStateResult {
    /// residual_inf ≤ 10 × (truncation + solver estimates).
    pub fn within_budget(&self) -> bool {
        self.residual_inf <= 10.0 * (self.truncation_estimate + self.solver_estimate)
    }
}

pub fn extended_state(
    h: &Hamiltonian,
    free: &FreeData,
    w_radius: usize,
    tol: f64,
) -> Result<ExtendedStateResult, FvError> {
    let geom = &h.geometry;
    let n = geom.sites();
    let wop = WOperator::new(geom, &h.v, free, w_radius)?;
    let laplacian = |x: &[f64], y: &mut [f64]| geom.apply_laplacian(x, y);
    let max_iter = 20 * n.max(500);

    let mut u = vec![0.0; n];
    let mut term = vec![1.0; n];
    let mut wt = vec![0.0; n];
    let mut neumann = Vec::new();
    let mut solver_estimate = 0.0;
    let mut prev = 1.0;
    let mut remainder = 0.0;
    for k in 1..=NEUMANN_MAX_TERMS {
        wop.apply(&term, &mut wt);
        let wn = norm2(&wt);
        if wn == 0.0 {
            break;
        }
        solver_estimate += tol * wn;
        term = conjugate_gradient(laplacian, &wt, tol, max_iter)?.x;
        let size = norm_inf(&term);
        let ratio = size / prev;
        neumann.push(NeumannTerm { k, norm_inf: size, ratio });
        if k >= 2 && ratio >= NEUMANN_RATIO {
            return Err(FvError::NeumannDivergence { term: k, ratio });
        }
        u.iter_mut().zip(&term).for_each(|(a, b)| *a += b);
        prev = size;
        if size <= 1e-15 * norm_inf(&u) {
            wop.apply(&term, &mut wt);
            remainder = norm_inf(&wt);
            break;
        }
        if k == NEUMANN_MAX_TERMS {
            return Err(FvError::NoConvergence { iterations: k, residual: size });
        }
    }
    let xi: Vec<f64> = u.iter().map(|x| 1.0 + x).collect();

    let mut rhs = vec![0.0; n];
    wop.apply(&xi, &mut rhs);
    rhs.iter_mut().zip(&h.potential).zip(&xi).for_each(|((r, p), x)| *r += p * x);
    let rn = norm2(&rhs);
    solver_estimate += tol * rn;
    let solve = h.solve(&rhs, tol)?;
    let zeta: Vec<f64> = xi.iter().zip(&solve.x).map(|(a, b)| a - b).collect();

    let mut hz = vec![0.0; n];
    h.apply(&zeta, &mut hz);
    let inner = geom.inner_sites();
    let residual_inf = inner.iter().fold(0.0, |m: f64, &i| m.max(hz[i].abs()));
    let deviation_inf = inner.iter().fold(0.0, |m: f64, &i| m.max((zeta[i] - 1.0).abs()));
    Ok(ExtendedStateResult {
        kappa: h.config.kappa,
        seed: h.config.seed,
        zeta,
        residual_inf,
        deviation_inf,
        w_radius,
        w_tail: wop.tail,
        truncation_estimate: remainder + wop.tail * norm_inf(&xi),
        solver_estimate,
        solve_iterations: solve.iterations,
        neumann,
        xi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kappa: f64,
    pub deviation_inf: f64,
    pub residual_inf: f64,
    pub within_budget: bool,
    /// deviation_inf / √κ.
    pub scaled: f64,
    pub neumann_terms: usize,
    pub r6_radius: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedSweep {
    pub points: Vec<SweepPoint>,
    /// max / min of deviation_inf / √κ.
    pub spread: f64,
    pub spread_limit: f64,
    pub bounded: bool,
    /// Least-squares slope of log deviation against log κ.
    pub fitted_power: f64,
    /// ‖ζ − 1‖∞ at κ = 0 (zero means ζ ≡ 1 exactly).
    pub kappa_zero_deviation: f64,
    pub kappa_zero_exact: bool,
}

/// Run the extended state at each κ (same seed and geometry), plus κ = 0.
pub fn extended_sweep(base: &HamiltonianConfig, kappas: &[f64], w_radius: usize) -> Result<ExtendedSweep, FvError> {
    if kappas.iter().any(|&k| !(k > 0.0)) {
        return Err(FvError::InvalidParameter("sweep values of κ must be positive".into()));
    }
    let free = base.free_data()?;
    let run = |kappa: f64| -> Result<(ExtendedStateResult, Option<usize>), FvError> {
        let cfg = HamiltonianConfig { kappa, ..base.clone() };
        let ct = cfg.counterterms(&free)?;
        let h = assemble_with(&cfg, &ct)?;
        Ok((extended_state(&h, &free, w_radius, GREEN_TOL)?, h.r6_radius))
    };
    let (zero, _) = run(0.0)?;
    let zero_exact = zero.zeta.iter().all(|&z| z == 1.0);
    let mut points = Vec::new();
    for &kappa in kappas {
        let (r, r6) = run(kappa)?;
        points.push(SweepPoint {
            kappa,
            deviation_inf: r.deviation_inf,
            residual_inf: r.residual_inf,
            within_budget: r.within_budget(),
            scaled: r.deviation_inf / kappa.sqrt(),
            neumann_terms: r.neumann.len(),
            r6_radius: r6,
        });
    }
    let max = points.iter().map(|p| p.scaled).fold(f64::MIN, f64::max);
    let min = points.iter().map(|p| p.scaled).fold(f64::MAX, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    let xs: Vec<f64> = points.iter().map(|p| p.kappa.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.deviation_inf.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(ExtendedSweep {
        spread,
        spread_limit: SQRT_SPREAD_LIMIT,
        bounded: spread <= SQRT_SPREAD_LIMIT,
        fitted_power: if sxx > 0.0 { sxy / sxx } else { f64::NAN },
        kappa_zero_deviation: zero.deviation_inf,
        kappa_zero_exact: zero_exact,
        points,
    })
}
