//! Finite boxes [0, L)^d, their boundary conditions and the profile v.

use serde::{Deserialize, Serialize};

use super::FvError;

/// Largest number of sites a box may have.
pub const MAX_SITES: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Boundary {
    /// Zero outside the box.
    Dirichlet,
    /// Periodic, with m² added to the diagonal.
    Torus { mass: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxGeometry {
    pub d: usize,
    pub side: usize,
    pub boundary: Boundary,
}

impl BoxGeometry {
    pub fn new(d: usize, side: usize, boundary: Boundary) -> Result<Self, FvError> {
        if d == 0 || side < 2 {
            return Err(FvError::InvalidParameter(format!("box d={d}, L={side}")));
        }
        if let Boundary::Torus { mass } = boundary {
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(FvError::InvalidParameter(format!("torus needs a positive mass, got {mass}")));
            }
        }
        let sites = (side as f64).powi(d as i32);
        if sites > MAX_SITES as f64 {
            return Err(FvError::TooLarge(sites));
        }
        Ok(BoxGeometry { d, side, boundary })
    }

    pub fn sites(&self) -> usize {
        self.side.pow(self.d as u32)
    }

    /// Row-major coordinates of site i.
    pub fn coords(&self, mut i: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.d];
        for k in (0..self.d).rev() {
            c[k] = (i % self.side) as i64;
            i /= self.side;
        }
        c
    }

    /// Site index of c, wrapped on a torus; `None` outside a Dirichlet box.
    pub fn index(&self, c: &[i64]) -> Option<usize> {
        let l = self.side as i64;
        let mut i = 0usize;
        for &x in c {
            let x = match self.boundary {
                Boundary::Torus { .. } => x.rem_euclid(l),
                Boundary::Dirichlet if (0..l).contains(&x) => x,
                Boundary::Dirichlet => return None,
            };
            i = i * self.side + x as usize;
        }
        Some(i)
    }

    /// ⌊L/2⌋ in every axis.
    pub fn origin(&self) -> Vec<i64> {
        vec![(self.side / 2) as i64; self.d]
    }

    /// Displacement b − a, reduced to the nearest image on a torus.
    pub fn displacement(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let l = self.side as i64;
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let r = y - x;
                match self.boundary {
                    Boundary::Torus { .. } => {
                        let r = r.rem_euclid(l);
                        if 2 * r > l {
                            r - l
                        } else {
                            r
                        }
                    }
                    Boundary::Dirichlet => r,
                }
            })
            .collect()
    }

    /// |n| = max_i |n_i − origin_i| ∨ 1 for any lattice point (inside the
    /// box or not).
    pub fn norm(&self, c: &[i64]) -> f64 {
        let o = self.origin();
        self.displacement(&o, c).iter().map(|x| x.abs()).max().unwrap_or(0).max(1) as f64
    }

    /// Coordinates within ⌊L/4⌋ of either face are boundary layer.
    pub fn in_inner_half(&self, c: &[i64]) -> bool {
        let margin = (self.side / 4) as i64;
        c.iter().all(|&x| x >= margin && x < self.side as i64 - margin)
    }

    pub fn inner_sites(&self) -> Vec<usize> {
        (0..self.sites()).filter(|&i| self.in_inner_half(&self.coords(i))).collect()
    }

    /// Smallest eigenvalue of −Δ on the box (plus m² on a torus).
    pub fn laplacian_floor(&self) -> f64 {
        match self.boundary {
            Boundary::Dirichlet => {
                2.0 * self.d as f64 * (1.0 - (std::f64::consts::PI / (self.side as f64 + 1.0)).cos())
            }
            Boundary::Torus { mass } => mass * mass,
        }
    }

    /// y = −Δx (+ m²x on a torus).
    pub fn apply_laplacian(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        let diag = 2.0 * self.d as f64
            + match self.boundary {
                Boundary::Torus { mass } => mass * mass,
                Boundary::Dirichlet => 0.0,
            };
        let strides: Vec<usize> = (0..self.d).map(|k| self.side.pow((self.d - 1 - k) as u32)).collect();
        let side = self.side;
        let torus = matches!(self.boundary, Boundary::Torus { .. });
        y.par_chunks_mut(4096).enumerate().for_each(|(chunk, out)| {
            for (j, yi) in out.iter_mut().enumerate() {
                let i = chunk * 4096 + j;
                let mut acc = diag * x[i];
                for &st in &strides {
                    let c = (i / st) % side;
                    if c + 1 < side {
                        acc -= x[i + st];
                    } else if torus {
                        acc -= x[i + st - side * st];
                    }
                    if c > 0 {
                        acc -= x[i - st];
                    } else if torus {
                        acc -= x[i + (side - 1) * st];
                    }
                }
                *yi = acc;
            }
        });
    }
}

/// v_n = κ|n|^{−α} on every site of the box.
pub fn profile(geom: &BoxGeometry, kappa: f64, alpha: f64) -> Vec<f64> {
    (0..geom.sites()).map(|i| kappa * geom.norm(&geom.coords(i)).powf(-alpha)).collect()
}
