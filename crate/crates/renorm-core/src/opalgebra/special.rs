//! The non-random and diagonal operators of the sixth-order scheme, built
//! entrywise on an instance.

use super::instance::{diag, scale_cols, scale_rows, LatticeInstance, Mat};

/// Which form of a display to build: the one the algebra requires, or the
/// one as typeset (kept to document the discrepancy).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Verified,
    Printed,
}

#[derive(Clone, Debug)]
pub struct SpecialOps {
    pub gt: Mat,
    /// G̃∘³ (zero diagonal).
    pub m4: Mat,
    /// M₄ − (σ³−ρ)I.
    pub m: Mat,
    pub w4: Mat,
    /// v²Mv².
    pub w: Mat,
    pub d4: Vec<f64>,
    /// N(n₁,n₃) = G̃(n₁,n₃) Σ G̃(n₁,n₂)² G̃(n₂,n₃)².
    pub n: Mat,
    /// N − ηI.
    pub nt: Mat,
    pub c6: Mat,
    /// C₆ − ηv⁶.
    pub c: Mat,
    pub c1: Mat,
    pub c2: Mat,
    pub c3: Mat,
    pub p12: Mat,
    pub p13: Mat,
    pub p23: Mat,
    pub pt12: Mat,
    pub pt13: Mat,
    pub pt23: Mat,
    /// Sum of the six P's.
    pub p6p: Mat,
    pub p6pp: Mat,
    /// (v⁴_{n₁}−v⁴_{n₂})(v²_{n₁}−v²_{n₂}) M(n₁,n₂).
    pub p6: Mat,
    pub r6: Vec<f64>,
    pub r6_1: Vec<f64>,
    pub r6_2: Vec<f64>,
    pub d6_1: Vec<f64>,
    pub d6_2: Vec<f64>,
    pub d7: Vec<f64>,
    pub s: Mat,
    pub st: Mat,
    pub q1: Mat,
    pub q2: Mat,
    pub q1_printed: Mat,
    pub q2_printed: Mat,
}

impl SpecialOps {
    pub fn q1(&self, form: Form) -> &Mat {
        match form {
            Form::Verified => &self.q1,
            Form::Printed => &self.q1_printed,
        }
    }

    pub fn q2(&self, form: Form) -> &Mat {
        match form {
            Form::Verified => &self.q2,
            Form::Printed => &self.q2_printed,
        }
    }
}

fn hadamard(a: &Mat, b: &Mat) -> Mat {
    a.component_mul(b)
}

/// G̃(n₁,n₃) Σ_{n₂} w(n₁,n₂,n₃) G̃(n₁,n₂)² G̃(n₂,n₃)², by direct loops.
fn triangle(gt: &Mat, w: impl Fn(usize, usize, usize) -> f64) -> Mat {
    let n = gt.nrows();
    Mat::from_fn(n, n, |a, c| {
        if gt[(a, c)] == 0.0 {
            return 0.0;
        }
        let s: f64 = (0..n).map(|b| w(a, b, c) * gt[(a, b)].powi(2) * gt[(b, c)].powi(2)).sum();
        gt[(a, c)] * s
    })
}

fn diagonal_of(m: &Mat) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

pub fn special_operators(inst: &LatticeInstance) -> SpecialOps {
    let (sigma, rho, eta) = (inst.sigma, inst.rho, inst.eta);
    let v2 = inst.v_pow(2);
    let v4 = inst.v_pow(4);
    let v6 = inst.v_pow(6);
    let gt = inst.gt();
    let f = hadamard(&gt, &gt);
    let m4 = gt.map(|x| x.powi(3));
    let shift = sigma.powi(3) - rho;
    let m = &m4 - Mat::identity(inst.sites, inst.sites) * shift;
    let sandwich = |a: &Mat| scale_cols(&scale_rows(a, &v2), &v2);
    let w4 = sandwich(&m4);
    let w = sandwich(&m);
    let g4v2 = gt.map(|x| x.powi(4)) * diag(&v2);
    let d4: Vec<f64> = (0..inst.sites).map(|i| v2[i] * g4v2.row(i).sum()).collect();

    let n = hadamard(&gt, &(&f * &f));
    let nt = &n - Mat::identity(inst.sites, inst.sites) * eta;
    let eta_v6 = diag(&v6) * eta;
    let c6 = sandwich(&hadamard(&gt, &(&f * diag(&v2) * &f)));
    let c = &c6 - &eta_v6;
    let c1 = scale_rows(&nt, &v6);
    let c3 = scale_cols(&nt, &v6);
    let c2 = hadamard(&gt, &(&f * diag(&v6) * &f)) - &eta_v6;

    let p12 = triangle(&gt, |a, b, c| v2[c] * (v2[a] - v2[b]).powi(2));
    let p13 = triangle(&gt, |a, b, c| v2[b] * (v2[a] - v2[c]).powi(2));
    let p23 = triangle(&gt, |a, b, c| v2[a] * (v2[b] - v2[c]).powi(2));
    let sym = |x: usize, y: usize| (v4[x] - v4[y]) * (v2[x] - v2[y]);
    let pt12 = triangle(&gt, |a, b, _| sym(a, b));
    let pt13 = triangle(&gt, |a, _, c| sym(a, c));
    let pt23 = triangle(&gt, |_, b, c| sym(b, c));
    let p6p = &p12 + &p13 + &p23 + &pt12 + &pt13 + &pt23;
    let p6pp = triangle(&gt, |a, b, _| v6[b] - v6[a]);
    let p6 = Mat::from_fn(inst.sites, inst.sites, |a, b| sym(a, b) * m[(a, b)]);

    let r6 = diagonal_of(&(&gt * &w * &gt)).iter().zip(&v2).map(|(x, v)| x * v).collect();
    let r6_1 = (0..inst.sites).map(|i| v2[i] * (0..inst.sites).map(|j| f[(i, j)] * v4[j]).sum::<f64>()).collect();
    let r6_2 = diagonal_of(&(&gt * &w4 * &gt)).iter().zip(&v2).map(|(x, v)| x * v).collect();
    let d6_1 =
        (0..inst.sites).map(|i| v2[i] * (0..inst.sites).map(|j| v4[j] * gt[(i, j)].powi(4)).sum::<f64>()).collect();
    let d6_2 = diagonal_of(&(&f * diag(&v2) * &f * diag(&v2) * &f)).iter().zip(&v2).map(|(x, v)| x * v).collect();
    let v3w: Vec<f64> = inst.v.iter().zip(&inst.omega).map(|(v, o)| v.powi(3) * o).collect();
    let d7 =
        (0..inst.sites).map(|i| v4[i] * (0..inst.sites).map(|j| v3w[j] * gt[(i, j)].powi(6)).sum::<f64>()).collect();
    let s = sandwich(&hadamard(&f, &(&m4 * diag(&v2) * &gt)));
    let st = s.transpose();

    let q1_with = |last: &dyn Fn(usize, usize) -> f64| {
        Mat::from_fn(inst.sites, inst.sites, |a, b| (v2[b] * (v4[a] - v4[b]) + v4[b] * last(a, b)) * m[(a, b)])
    };
    let q1 = q1_with(&|a, b| v2[a] - v2[b]);
    let q1_printed = q1_with(&|a, b| v2[a] - v4[b]);
    let dv6nt = Mat::from_fn(inst.sites, inst.sites, |a, c| (v6[a] - v6[c]) * nt[(a, c)]);
    let q2_with = |p6pp_coef: f64| -&p6p / 6.0 + &p6pp * p6pp_coef + &dv6nt * (2.0 / 3.0);
    let q2 = q2_with(1.0 / 3.0);
    let q2_printed = q2_with(1.0);

    SpecialOps {
        gt,
        m4,
        m,
        w4,
        w,
        d4,
        n,
        nt,
        c6,
        c,
        c1,
        c2,
        c3,
        p12,
        p13,
        p23,
        pt12,
        pt13,
        pt23,
        p6p,
        p6pp,
        p6,
        r6,
        r6_1,
        r6_2,
        d6_1,
        d6_2,
        d7,
        s,
        st,
        q1,
        q2,
        q1_printed,
        q2_printed,
    }
}
