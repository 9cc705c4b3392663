//! Exact polynomials in the renormalization constants σ, ρ, η.
//!
//! ASCII grammar (used in reports and for parsing table entries):
//! `poly := term (('+'|'-') term)*`, `term := [coeff '*'] mono | coeff`,
//! `mono := factor ('*' factor)*`, `factor := ('s'|'r'|'e') ['^' uint]`,
//! `coeff := int ['/' uint]`. Variables: `s` = σ, `r` = ρ, `e` = η.
//! Whitespace is ignored. Printing lists monomials by descending total
//! degree, then lexicographically in (s, r, e).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = Ratio<i64>;

/// Exponents of (σ, ρ, η).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u16; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);
    pub const SIGMA: Monomial = Monomial([1, 0, 0]);
    pub const RHO: Monomial = Monomial([0, 1, 0]);
    pub const ETA: Monomial = Monomial([0, 0, 1]);

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial([self.0[0] + other.0[0], self.0[1] + other.0[1], self.0[2] + other.0[2]])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with exact rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoeffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse polynomial {input:?}: {reason}")]
pub struct PolyParseError {
    pub input: String,
    pub reason: String,
}

impl CoeffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn sigma() -> Self {
        Self::term(Rational::one(), Monomial::SIGMA)
    }

    pub fn rho() -> Self {
        Self::term(Rational::one(), Monomial::RHO)
    }

    pub fn eta() -> Self {
        Self::term(Rational::one(), Monomial::ETA)
    }

    /// σ^k.
    pub fn sigma_pow(k: u16) -> Self {
        Self::term(Rational::one(), Monomial([k, 0, 0]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms.get(&m).copied().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: Rational) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_term(*m, *a * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Numeric value at (σ, ρ, η).
    pub fn eval(&self, sigma: f64, rho: f64, eta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let c = *c.numer() as f64 / *c.denom() as f64;
                c * sigma.powi(m.0[0] as i32) * rho.powi(m.0[1] as i32) * eta.powi(m.0[2] as i32)
            })
            .sum()
    }

    pub fn parse(input: &str) -> Result<Self, PolyParseError> {
        let err = |reason: &str| PolyParseError { input: input.to_string(), reason: reason.to_string() };
        let s: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut out = Self::zero();
        let mut i = 0;
        while i < s.len() {
            let mut sign = 1i64;
            if s[i] == '+' || s[i] == '-' {
                if s[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if i > 0 {
                return Err(err("expected '+' or '-' between terms"));
            }
            let mut coeff = Rational::from_integer(sign);
            let mut mono = Monomial::ONE;
            loop {
                if i >= s.len() {
                    return Err(err("dangling operator"));
                }
                if s[i].is_ascii_digit() {
                    let (n, next) = read_uint(&s, i).ok_or_else(|| err("bad integer"))?;
                    i = next;
                    let mut value = Rational::from_integer(n);
                    if i < s.len() && s[i] == '/' {
                        let (d, next) = read_uint(&s, i + 1).ok_or_else(|| err("bad denominator"))?;
                        if d == 0 {
                            return Err(err("zero denominator"));
                        }
                        i = next;
                        value /= Rational::from_integer(d);
                    }
                    coeff *= value;
                } else {
                    let var = match s[i] {
                        's' => 0,
                        'r' => 1,
                        'e' => 2,
                        _ => return Err(err("unexpected character")),
                    };
                    i += 1;
                    let mut exp = 1u16;
                    if i < s.len() && s[i] == '^' {
                        let (e, next) = read_uint(&s, i + 1).ok_or_else(|| err("bad exponent"))?;
                        exp = u16::try_from(e).map_err(|_| err("exponent too large"))?;
                        i = next;
                    }
                    mono.0[var] += exp;
                }
                if i < s.len() && s[i] == '*' {
                    i += 1;
                    continue;
                }
                break;
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}

fn read_uint(s: &[char], start: usize) -> Option<(i64, usize)> {
    let mut i = start;
    let mut v: i64 = 0;
    while i < s.len() && s[i].is_ascii_digit() {
        v = v.checked_mul(10)?.checked_add(s[i].to_digit(10)? as i64)?;
        i += 1;
    }
    (i > start).then_some((v, i))
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                f.write_str("-")?;
            } else if k > 0 {
                f.write_str("+")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || *m == Monomial::ONE {
                factors.push(if a.is_integer() {
                    a.numer().to_string()
                } else {
                    format!("{}/{}", a.numer(), a.denom())
                });
            }
            for (var, &e) in ["s", "r", "e"].iter().zip(m.0.iter()) {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl serde::Serialize for CoeffPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for CoeffPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CoeffPoly::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for CoeffPoly {
    type Err = PolyParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Add for &CoeffPoly {
    type Output = CoeffPoly;
    fn add(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, *c);
        }
        out
    }
}

impl Sub for &CoeffPoly {
    type Output = CoeffPoly;
    fn sub(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -*c);
        }
        out
    }
}

impl Mul for &CoeffPoly {
    type Output = CoeffPoly;
    fn mul(self, rhs: &CoeffPoly) -> CoeffPoly {
        let mut out = CoeffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(*m2), *c1 * *c2);
            }
        }
        out
    }
}

impl Neg for &CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        self.scale(-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CoeffPoly {
            type Output = CoeffPoly;
            fn $m(self, rhs: CoeffPoly) -> CoeffPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CoeffPoly> for CoeffPoly {
            type Output = CoeffPoly;
            fn $m(self, rhs: &CoeffPoly) -> CoeffPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CoeffPoly {
    type Output = CoeffPoly;
    fn neg(self) -> CoeffPoly {
        -&self
    }
}

impl std::iter::Sum for CoeffPoly {
    fn sum<I: Iterator<Item = CoeffPoly>>(iter: I) -> Self {
        iter.fold(CoeffPoly::zero(), |a, b| a + b)
    }
}
