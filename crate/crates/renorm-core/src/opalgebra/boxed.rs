//! Closed forms of the exact degree-i remainders boxed(G₀, i), i ≤ 7, and of
//! their refined (_r) and rearranged (_E) versions.

use super::instance::{LatticeInstance, Mat};
use super::special::Form;
use super::word::{eval, Context};
use super::OpError;

/// coefficient · word, starred or plain.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub word: &'static str,
    pub star: bool,
}

fn t(coef: f64, word: &'static str) -> Term {
    Term { coef, word, star: false }
}

fn st(coef: f64, word: &'static str) -> Term {
    Term { coef, word, star: true }
}

pub fn sum_terms(terms: &[Term], ctx: &Context) -> Result<Mat, OpError> {
    let n = ctx.inst.sites;
    let mut acc = Mat::zeros(n, n);
    for term in terms {
        if term.coef != 0.0 {
            acc += eval(term.word, ctx, term.star)? * term.coef;
        }
    }
    Ok(acc)
}

/// Display terms of boxed(G₀, i). `Form::Printed` flips the fifth-order
/// σρ term to the sign it is typeset with.
pub fn boxed_terms(i: usize, inst: &LatticeInstance, form: Form) -> Result<Vec<Term>, OpError> {
    let (s, r) = (inst.sigma, inst.rho);
    let s2 = s * s;
    Ok(match i {
        0 => vec![t(1.0, "G0")],
        1 => vec![t(-1.0, "G0 V G0")],
        2 => vec![st(1.0, "G0 V G0 V G0")],
        3 => vec![t(s2, "G0 v2 V G0"), st(-1.0, "G0 V G0 V G0 V G0")],
        4 => vec![
            st(-s2, "G0 v2 V G0 V G0"),
            st(-s2, "G0 V G0 v2 V G0"),
            st(1.0, "G0 V G0 V G0 V G0 V G0"),
            t(1.0, "G0 W G0"),
        ],
        5 => {
            let sr = if form == Form::Printed { 2.0 * s * r } else { -2.0 * s * r };
            vec![
                t(sr, "G0 v4 V G0"),
                t(1.0, "G0 V D4 G0"),
                t(-1.0, "G0 V Gt W G0"),
                t(-1.0, "G0 W Gt V G0"),
                st(s2, "G0 v2 V G0 V G0 V G0"),
                st(s2, "G0 V G0 v2 V G0 V G0"),
                st(s2, "G0 V G0 V G0 v2 V G0"),
                st(-1.0, "G0 V G0 V G0 V G0 V G0 V G0"),
            ]
        }
        6 => {
            let mut v = sixth_random(inst);
            v.extend(sixth_w_terms());
            v.extend(sixth_d4_terms());
            v.extend([t(4.0, "G0 C G0"), t(-2.0 * s2, "G0 v2 W G0"), t(-2.0 * s2, "G0 W v2 G0")]);
            v
        }
        7 => {
            let mut v = seventh_head(inst);
            v.extend(seventh_w_sigma(inst));
            v.extend(seventh_d_terms(inst));
            v.extend(seventh_w_starred());
            v.extend(seventh_tail());
            v.extend([t(-4.0, "G0 C Gt V G0"), t(-4.0, "G0 V Gt C G0")]);
            v.extend(seventh_last());
            v
        }
        _ => return Err(OpError::InvalidParameter(format!("boxed term of degree {i}"))),
    })
}

/// 2σρ(…)* + σ⁴(…)* − σ²(…)* + (V⁶)*.
fn sixth_random(inst: &LatticeInstance) -> Vec<Term> {
    let (s, r) = (inst.sigma, inst.rho);
    let s2 = s * s;
    vec![
        st(2.0 * s * r, "G0 v4 V G0 V G0"),
        st(2.0 * s * r, "G0 V G0 v4 V G0"),
        st(s2 * s2, "G0 v2 V G0 v2 V G0"),
        st(-s2, "G0 v2 V G0 V G0 V G0 V G0"),
        st(-s2, "G0 V G0 v2 V G0 V G0 V G0"),
        st(-s2, "G0 V G0 V G0 v2 V G0 V G0"),
        st(-s2, "G0 V G0 V G0 V G0 v2 V G0"),
        st(1.0, "G0 V G0 V G0 V G0 V G0 V G0 V G0"),
    ]
}

fn sixth_w_terms() -> Vec<Term> {
    vec![st(1.0, "G0 W Gt V G0 V G0"), st(1.0, "G0 V Gt W Gt V G0"), st(1.0, "G0 V G0 V Gt W G0")]
}

fn sixth_d4_terms() -> Vec<Term> {
    vec![st(-1.0, "G0 V D4 G0 V G0"), st(-1.0, "G0 V G0 V D4 G0")]
}

/// The first four groups of the seventh-order display.
fn seventh_head(inst: &LatticeInstance) -> Vec<Term> {
    let (s, r, e) = (inst.sigma, inst.rho, inst.eta);
    let s2 = s * s;
    vec![
        t(2.0 * s, "G0 V R6 G0"),
        t(8.0 * e * s - 7.0 * s.powi(6) + 12.0 * s.powi(3) * r, "G0 v6 V G0"),
        st(-2.0 * s * r, "G0 v4 V G0 V G0 V G0"),
        st(-2.0 * s * r, "G0 V G0 v4 V G0 V G0"),
        st(-2.0 * s * r, "G0 V G0 V G0 v4 V G0"),
        st(-s2 * s2, "G0 v2 V G0 v2 V G0 V G0"),
        st(-s2 * s2, "G0 v2 V G0 V G0 v2 V G0"),
        st(-s2 * s2, "G0 V G0 v2 V G0 v2 V G0"),
        st(s2, "G0 v2 V G0 V G0 V G0 V G0 V G0"),
        st(s2, "G0 V G0 v2 V G0 V G0 V G0 V G0"),
        st(s2, "G0 V G0 V G0 v2 V G0 V G0 V G0"),
        st(s2, "G0 V G0 V G0 V G0 v2 V G0 V G0"),
        st(s2, "G0 V G0 V G0 V G0 V G0 v2 V G0"),
    ]
}

fn seventh_w_sigma(inst: &LatticeInstance) -> Vec<Term> {
    let s2 = inst.sigma * inst.sigma;
    vec![
        t(s2, "G0 W Gt v2 V G0"),
        t(s2, "G0 v2 V Gt W G0"),
        t(2.0 * s2, "G0 W v2 Gt V G0"),
        t(2.0 * s2, "G0 v2 W Gt V G0"),
        t(2.0 * s2, "G0 V Gt v2 W G0"),
        t(2.0 * s2, "G0 V Gt W v2 G0"),
    ]
}

/// −3σ²G₀v²VD₄G₀ − 2σ²G₀VD₆⁽¹⁾G₀ − (V⁷)*.
fn seventh_d_terms(inst: &LatticeInstance) -> Vec<Term> {
    let s2 = inst.sigma * inst.sigma;
    vec![t(-3.0 * s2, "G0 v2 V D4 G0"), t(-2.0 * s2, "G0 V D61 G0"), st(-1.0, "G0 V G0 V G0 V G0 V G0 V G0 V G0 V G0")]
}

fn seventh_w_starred() -> Vec<Term> {
    vec![
        st(-1.0, "G0 W Gt V G0 V G0 V G0"),
        st(-1.0, "G0 V Gt W Gt V G0 V G0"),
        st(-1.0, "G0 V G0 V Gt W Gt V G0"),
        st(-1.0, "G0 V G0 V G0 V Gt W G0"),
    ]
}

/// D₄ insertions and the M₄/D₇ pair.
fn seventh_tail() -> Vec<Term> {
    vec![
        st(1.0, "G0 V D4 G0 V G0 V G0"),
        st(1.0, "G0 V G0 V D4 G0 V G0"),
        st(1.0, "G0 V G0 V G0 V D4 G0"),
        t(1.0, "G0 v2 M4 v2 V M4 v2 G0"),
        t(-1.0, "G0 D7 G0"),
    ]
}

fn seventh_last() -> Vec<Term> {
    vec![t(4.0, "G0 V D62 G0"), t(1.0, "G0 V S G0"), t(1.0, "G0 St V G0")]
}

pub fn boxed_term(i: usize, ctx: &Context) -> Result<Mat, OpError> {
    sum_terms(&boxed_terms(i, ctx.inst, Form::Verified)?, ctx)
}

/// boxed(G₀, i) for i = 0..=top.
pub fn boxed_all(ctx: &Context, top: usize) -> Result<Vec<Mat>, OpError> {
    (0..=top).map(|i| boxed_term(i, ctx)).collect()
}

/// boxed(G₀,6)_r = boxed(G₀,6) − 4G₀P₆″G₀.
pub fn refined6(b6: &Mat, ctx: &Context) -> Result<Mat, OpError> {
    Ok(b6 - eval("G0 P6pp G0", ctx, false)? * 4.0)
}

/// boxed(G₀,7)_r = boxed(G₀,7) + 4G₀VG₀P₆″G₀ + 4G₀P₆″G₀VG₀. As printed, the
/// right side starts from boxed(G₀,6); `base` selects which.
pub fn refined7(base: &Mat, ctx: &Context) -> Result<Mat, OpError> {
    Ok(base + (eval("G0 V G0 P6pp G0", ctx, false)? + eval("G0 P6pp G0 V G0", ctx, false)?) * 4.0)
}

/// boxed(G₀,i)_E, i = 4..=7, from their definitions via boxed(G₀,j) and Q₆⁽¹⁾, Q₆⁽²⁾.
pub fn rearranged(b: &[Mat], ctx: &Context, form: Form) -> Result<[Mat; 4], OpError> {
    let s2 = ctx.inst.sigma.powi(2);
    let (q1, q2) = match form {
        Form::Verified => ("Q1", "Q2"),
        Form::Printed => ("Q1printed", "Q2printed"),
    };
    let w = |left: &Mat| -> Result<Mat, OpError> { Ok(left * eval("W G0", ctx, false)?) };
    let g0q = |q: &str| eval(&format!("G0 {q} G0"), ctx, false);
    let vq = |q: &str| eval(&format!("G0 V G0 {q} G0"), ctx, false);
    let qv = |q: &str| eval(&format!("G0 {q} G0 V G0"), ctx, false);
    let e6 = &b[6] + g0q(q1)? * (2.0 * s2) - g0q(q2)? * 4.0;
    let e7 = &b[7] - vq(q1)? * (2.0 * s2) + vq(q2)? * 4.0 + qv(q2)? * 4.0;
    Ok([&b[4] - w(&b[0])?, &b[5] - w(&b[1])?, e6 - w(&b[2])?, e7 - w(&b[3])?])
}

/// The closed forms displayed for boxed(G₀,i)_E, i = 4..=7. Under
/// `Form::Printed` the seventh uses the typeset σ-powers of the (Wv²+v²W)
/// and G₀VG₀Mv⁶G₀ terms.
pub fn rearranged_closed_forms(ctx: &Context, form: Form) -> Result<[Mat; 4], OpError> {
    let inst = ctx.inst;
    let (s, r) = (inst.sigma, inst.rho);
    let s2 = s * s;
    let e4 = vec![st(-s2, "G0 v2 V G0 V G0"), st(-s2, "G0 V G0 v2 V G0"), st(1.0, "G0 V G0 V G0 V G0 V G0")];
    let e5 = vec![
        t(-2.0 * s * r, "G0 v4 V G0"),
        t(1.0, "G0 V D4 G0"),
        t(s, "G0 V W G0"),
        t(-1.0, "G0 W Gt V G0"),
        st(s2, "G0 v2 V G0 V G0 V G0"),
        st(s2, "G0 V G0 v2 V G0 V G0"),
        st(s2, "G0 V G0 V G0 v2 V G0"),
        st(-1.0, "G0 V G0 V G0 V G0 V G0 V G0"),
    ];
    let mut e6 = sixth_random(inst);
    e6.extend([st(1.0, "G0 W Gt V G0 V G0"), st(1.0, "G0 V Gt W Gt V G0"), st(-s, "G0 V G0 V W G0")]);
    e6.extend(sixth_d4_terms());
    e6.extend([t(4.0, "G0 Nt v6 G0"), t(-4.0 * s2, "G0 M v6 G0")]);
    let (wv_coef, mv6_coef) = match form {
        Form::Verified => (2.0 * s2, 4.0 * s2),
        Form::Printed => (2.0 * s, 2.0 * s2),
    };
    let mut e7 = seventh_head(inst);
    e7.extend([
        t(s2, "G0 W Gt v2 V G0"),
        t(-s2 * s, "G0 v2 V W G0"),
        t(wv_coef, "G0 W v2 Gt V G0"),
        t(wv_coef, "G0 v2 W Gt V G0"),
        t(-2.0 * s2 * s, "G0 V W v2 G0"),
        t(-2.0 * s2 * s, "G0 V v2 W G0"),
        t(mv6_coef, "G0 V G0 M v6 G0"),
    ]);
    e7.extend(seventh_d_terms(inst));
    e7.extend([
        st(-1.0, "G0 W Gt V G0 V G0 V G0"),
        st(-1.0, "G0 V Gt W Gt V G0 V G0"),
        st(-1.0, "G0 V G0 V Gt W Gt V G0"),
        st(s, "G0 V G0 V G0 V W G0"),
    ]);
    e7.extend(seventh_tail());
    e7.extend([
        t(4.0 * s, "G0 C V G0"),
        t(4.0 * s, "G0 V C G0"),
        t(-4.0, "G0 Nt v6 G0 V G0"),
        t(-4.0, "G0 V G0 Nt v6 G0"),
    ]);
    e7.extend(seventh_last());
    Ok([sum_terms(&e4, ctx)?, sum_terms(&e5, ctx)?, sum_terms(&e6, ctx)?, sum_terms(&e7, ctx)?])
}
