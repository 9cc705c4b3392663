//! Free-lattice and torus Green's kernels of −Δ + m².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orthant::{EvenTransform, Orthant};
use super::special::{asymptotic_coefficients, gauss_legendre, scaled_bessel_i};
use super::KernelError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// Z^d, values stored for |n|_∞ ≤ radius.
    Free { radius: usize },
    /// Periodic box of the given side. `projected` drops the k = 0 mode.
    Torus { side: usize, projected: bool },
    /// Richardson extrapolation of projected tori of sides `side` and `side/2`,
    /// valid for |n|_∞ ≤ side/4.
    Extrapolated { side: usize },
}

/// Translation-invariant kernel G(n), stored on the folded orthant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenKernel {
    pub d: usize,
    pub geometry: Geometry,
    pub mass: f64,
    pub values: Orthant,
}

impl GreenKernel {
    /// Period for folding, `None` on Z^d.
    pub fn period(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Torus { side, .. } => Some(side),
            _ => None,
        }
    }

    pub fn fold(&self, n: &[i64]) -> Option<Vec<usize>> {
        assert_eq!(n.len(), self.d);
        n.iter()
            .map(|&x| {
                let c = match self.period() {
                    Some(p) => {
                        let r = x.rem_euclid(p as i64) as usize;
                        r.min(p - r)
                    }
                    None => x.unsigned_abs() as usize,
                };
                (c < self.values.side).then_some(c)
            })
            .collect()
    }

    pub fn value(&self, n: &[i64]) -> Option<f64> {
        self.fold(n).map(|c| self.values.get(&c))
    }

    pub fn sigma(&self) -> f64 {
        self.values.data[0]
    }

    /// G̃ = G with the n = 0 entry replaced by 0.
    pub fn tilde(&self) -> Orthant {
        let mut t = self.values.clone();
        t.data[0] = 0.0;
        t
    }

    /// Values along the first coordinate axis for r in 0..=rmax.
    pub fn axis(&self, rmax: usize) -> Vec<(usize, f64)> {
        (0..=rmax.min(self.values.side - 1))
            .map(|r| {
                let mut c = vec![0; self.d];
                c[0] = r;
                (r, self.values.get(&c))
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        match self.geometry {
            Geometry::Free { radius } => format!("free d={} m={} R={radius}", self.d, self.mass),
            Geometry::Torus { side, projected } => {
                format!("torus d={} L={side} m={}{}", self.d, self.mass, if projected { " projected" } else { "" })
            }
            Geometry::Extrapolated { side } => format!("extrapolated torus d={} L={side}", self.d),
        }
    }
}

/// −Δ̂(ξ) = 2d − 2 Σ_j cos 2πξ_j.
pub fn laplacian_symbol(xi: &[f64]) -> f64 {
    xi.iter().map(|&x| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * x).cos()).sum()
}

fn torus_symbol(d: usize, side: usize, mass: f64, drop_zero: bool) -> Orthant {
    let half = side / 2 + 1;
    let lam: Vec<f64> =
        (0..half).map(|k| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * k as f64 / side as f64).cos()).collect();
    Orthant::from_fn(d, half, |c| {
        if drop_zero && c.iter().all(|&x| x == 0) {
            0.0
        } else {
            1.0 / (mass * mass + c.iter().map(|&k| lam[k]).sum::<f64>())
        }
    })
}

/// G(n) = L^{−d} Σ_k e^{2πik·n/L} / (m² + 2d − 2Σ cos 2πk_j/L).
pub fn torus_green(d: usize, side: usize, mass: f64) -> Result<GreenKernel, KernelError> {
    check_dims(d, side)?;
    if mass <= 0.0 || !mass.is_finite() {
        return Err(KernelError::SingularOperator);
    }
    let tr = EvenTransform::new(d, side);
    let values = tr.backward(&torus_symbol(d, side, mass, false));
    Ok(GreenKernel { d, geometry: Geometry::Torus { side, projected: false }, mass, values })
}

/// Torus kernel with the constant mode removed (mass 0 allowed).
pub fn torus_green_projected(d: usize, side: usize, mass: f64) -> Result<GreenKernel, KernelError> {
    check_dims(d, side)?;
    if mass < 0.0 || !mass.is_finite() {
        return Err(KernelError::InvalidParameter(format!("mass {mass}")));
    }
    let tr = EvenTransform::new(d, side);
    let values = tr.backward(&torus_symbol(d, side, mass, true));
    Ok(GreenKernel { d, geometry: Geometry::Torus { side, projected: true }, mass, values })
}

/// Richardson extrapolation R(L) = (2^p G_L − G_{L/2}) / (2^p − 1), p = d − 2,
/// of zero-mode-projected massless tori: removes the leading L^{−(d−2)}
/// finite-size shift and approximates the free kernel for |n|_∞ ≤ L/4.
pub fn torus_extrapolated(d: usize, side: usize) -> Result<GreenKernel, KernelError> {
    if d < 3 {
        return Err(KernelError::DimensionTooSmall(d));
    }
    if side < 8 || !side.is_multiple_of(4) {
        return Err(KernelError::InvalidParameter(format!("extrapolation needs L divisible by 4, got {side}")));
    }
    let big = torus_green_projected(d, side, 0.0)?;
    let small = torus_green_projected(d, side / 2, 0.0)?;
    let w = 2f64.powi(d as i32 - 2);
    let values = Orthant::from_fn(d, side / 4 + 1, |c| (w * big.values.get(c) - small.values.get(c)) / (w - 1.0));
    Ok(GreenKernel { d, geometry: Geometry::Extrapolated { side }, mass: 0.0, values })
}

fn check_dims(d: usize, side: usize) -> Result<(), KernelError> {
    if d == 0 {
        return Err(KernelError::InvalidParameter("d must be ≥ 1".into()));
    }
    if side < 2 {
        return Err(KernelError::InvalidParameter(format!("torus side {side} < 2")));
    }
    Ok(())
}

/// Heat-kernel quadrature G(n) = ∫₀^∞ e^{−m²t} Π_i e^{−2t} I_{|n_i|}(2t) dt on
/// the box |n|_∞ ≤ radius. The integral is taken in u = ln t with
/// Gauss–Legendre panels, halving the panel width until two successive
/// resolutions agree to `FREE_TOL`; for m = 0 the tail beyond t = T is
/// integrated term by term from the large-argument Bessel series.
pub fn free_green(d: usize, mass: f64, radius: usize) -> Result<GreenKernel, KernelError> {
    if d == 0 || radius < 1 {
        return Err(KernelError::InvalidParameter(format!("d={d}, R={radius}")));
    }
    if mass < 0.0 || !mass.is_finite() {
        return Err(KernelError::InvalidParameter(format!("mass {mass}")));
    }
    if mass == 0.0 && d < 3 {
        return Err(KernelError::DimensionTooSmall(d));
    }
    let tuples = sorted_tuples(d, radius);
    let m2 = mass * mass;
    let t_max = if mass > 0.0 { 60.0 / m2 } else { 1000.0 + 100.0 * (radius * radius) as f64 };
    let (u_min, u_max) = (-38.0f64, t_max.ln());
    let (gx, gw) = gauss_legendre(16);

    let integrate = |panels: usize| -> Vec<f64> {
        let h = (u_max - u_min) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * gx.len());
        for p in 0..panels {
            let a = u_min + p as f64 * h;
            for (x, w) in gx.iter().zip(&gw) {
                let u = a + 0.5 * h * (x + 1.0);
                let t = u.exp();
                nodes.push((0.5 * h * w * t * (-m2 * t).exp(), 2.0 * t));
            }
        }
        let table: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&(_, x)| {
                let mut s = vec![0.0; radius + 1];
                scaled_bessel_i(x, radius, &mut s);
                s
            })
            .collect();
        tuples
            .par_iter()
            .map(|tup| {
                nodes.iter().zip(&table).map(|(&(w, _), s)| w * tup.iter().map(|&k| s[k]).product::<f64>()).sum()
            })
            .collect()
    };

    let mut panels = 32;
    let mut prev = integrate(panels);
    let mut converged = None;
    for _ in 0..6 {
        panels *= 2;
        let cur = integrate(panels);
        let err =
            prev.iter().zip(&cur).map(|(a, b)| ((a - b) / b.abs().max(f64::MIN_POSITIVE)).abs()).fold(0.0, f64::max);
        if err < FREE_TOL {
            converged = Some(cur);
            break;
        }
        prev = cur;
    }
    let Some(mut vals) = converged else {
        return Err(KernelError::QuadratureFailure(format!("no convergence at {panels} panels")));
    };
    if mass == 0.0 {
        for (v, tup) in vals.iter_mut().zip(&tuples) {
            *v += massless_tail(tup, t_max, d);
        }
    }
    let lookup: std::collections::HashMap<&Vec<usize>, f64> = tuples.iter().zip(vals.iter().copied()).collect();
    let values = Orthant::from_fn(d, radius + 1, |c| {
        let mut c = c.to_vec();
        c.sort_unstable_by(|a, b| b.cmp(a));
        lookup[&c]
    });
    Ok(GreenKernel { d, geometry: Geometry::Free { radius }, mass, values })
}

/// Relative agreement demanded between successive quadrature resolutions.
pub const FREE_TOL: f64 = 1e-11;

/// ∫_T^∞ Π_i e^{−2t}I_{k_i}(2t) dt from the product of the large-x series.
fn massless_tail(tup: &[usize], t: f64, d: usize) -> f64 {
    const TERMS: usize = 10;
    let mut prod = vec![0.0; TERMS];
    prod[0] = 1.0;
    for &k in tup {
        let a = asymptotic_coefficients(k, TERMS);
        let mut next = vec![0.0; TERMS];
        for i in 0..TERMS {
            for j in 0..TERMS - i {
                next[i + j] += prod[i] * a[j];
            }
        }
        prod = next;
    }
    // Π (2π·2t)^{−1/2} Σ_j c_j (2t)^{−j}
    let half_d = d as f64 / 2.0;
    let pref = (4.0 * std::f64::consts::PI).powf(-half_d);
    prod.iter()
        .enumerate()
        .map(|(j, c)| {
            let p = half_d + j as f64;
            pref * c * 2f64.powi(-(j as i32)) * t.powf(1.0 - p) / (p - 1.0)
        })
        .sum()
}

/// All non-increasing d-tuples with entries in 0..=radius.
fn sorted_tuples(d: usize, radius: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for k in 0..=max {
            cur.push(k);
            rec(d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, radius, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_torus_by_hand() {
        let g = torus_green(1, 2, 1.0).unwrap();
        assert!((g.value(&[0]).unwrap() - 0.6).abs() < 1e-15);
        assert!((g.value(&[1]).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(laplacian_symbol(&[0.0; 4]), 0.0);
        assert!((laplacian_symbol(&[0.5]) - 4.0).abs() < 1e-15);
        assert!((laplacian_symbol(&[0.5; 5]) - 20.0).abs() < 1e-14);
    }

    #[test]
    fn massive_free_kernel_is_a_resolvent() {
        // (−Δ + m²) G = δ, checked at a few offsets in d = 2.
        let m = 0.8;
        let g = free_green(2, m, 8).unwrap();
        let at = |x: i64, y: i64| g.value(&[x, y]).unwrap();
        for &(x, y) in &[(0i64, 0i64), (1, 0), (2, 1), (3, 3)] {
            let lhs = (4.0 + m * m) * at(x, y) - at(x + 1, y) - at(x - 1, y) - at(x, y + 1) - at(x, y - 1);
            let want = if (x, y) == (0, 0) { 1.0 } else { 0.0 };
            assert!((lhs - want).abs() < 1e-10, "{x},{y}: {lhs}");
        }
    }

    #[test]
    fn massless_free_kernel_is_a_resolvent() {
        let g = free_green(3, 0.0, 6).unwrap();
        let at = |n: [i64; 3]| g.value(&n).unwrap();
        for n in [[0i64, 0, 0], [1, 0, 0], [2, 1, 0], [3, 2, 1]] {
            let mut lhs = 6.0 * at(n);
            for a in 0..3 {
                for s in [-1, 1] {
                    let mut m = n;
                    m[a] += s;
                    lhs -= at(m);
                }
            }
            let want = if n == [0, 0, 0] { 1.0 } else { 0.0 };
            assert!((lhs - want).abs() < 1e-10, "{n:?}: {lhs}");
        }
    }
}
