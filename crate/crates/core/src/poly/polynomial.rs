//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. The canonical printed form lists terms from the
//! highest monomial down.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent vector `[a1, ..., an]` standing for `x1^a1 * ... * xn^an`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `num_vars` real variables.
///
/// No stored coefficient is zero, so the zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::one(num_vars), c);
        p
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::var(num_vars, index), BigRational::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, merging
    /// repeated exponent vectors.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, Vec<u32>)>,
    {
        let mut p = Self::zero(num_vars);
        for (c, e) in terms {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    got: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// Convenience constructor with integer coefficients.
    pub fn from_int_terms(num_vars: usize, terms: &[(i64, &[u32])]) -> Result<Self> {
        Self::from_terms(num_vars, terms.iter().map(|(c, e)| (rat(*c), e.to_vec())))
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exponent vectors with nonzero coefficient, in graded-lex order.
    pub fn support(&self) -> Vec<Vec<u32>> {
        self.terms.keys().map(|m| m.0.clone()).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        Polynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, BigRational::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `index` (0-based).
    pub fn partial(&self, index: usize) -> Result<Self> {
        if index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index,
                num_vars: self.num_vars,
            });
        }
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[index] -= 1;
            out.add_term(dm, c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.num_vars)
            .map(|i| self.partial(i).expect("index in range"))
            .collect()
    }

    /// Floating-point evaluation with compensated summation of the terms.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        let mut acc = NeumaierSum::default();
        for (m, c) in &self.terms {
            acc.add(rat_to_f64(c) * monomial_value(&m.0, x));
        }
        Ok(acc.total())
    }

    /// Exact substitution `x_i -> polys[i]`.
    pub fn substitute(&self, polys: &[Polynomial]) -> Result<Self> {
        if polys.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: polys.len(),
            });
        }
        let target = polys.first().map_or(0, Polynomial::num_vars);
        let max_exp: Vec<u32> = (0..self.num_vars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Polynomial>> = polys
            .iter()
            .zip(&max_exp)
            .map(|(q, &k)| {
                let mut v = vec![Polynomial::constant(target, BigRational::one())];
                for j in 1..=k as usize {
                    let next = &v[j - 1] * q;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Polynomial {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical variable names: `x, y, z` for up to three variables,
    /// `x1..xN` beyond.
    pub fn variable_name(num_vars: usize, index: usize) -> String {
        if num_vars <= 3 {
            ["x", "y", "z"][index].to_string()
        } else {
            format!("x{}", index + 1)
        }
    }
}

pub(crate) fn rat_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub(crate) fn monomial_value(e: &[u32], x: &[f64]) -> f64 {
    let mut v = 1.0;
    for (&k, &xi) in e.iter().zip(x) {
        if k > 0 {
            v *= xi.powi(k as i32);
        }
    }
    v
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                let name = Polynomial::variable_name(self.num_vars, i);
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}
