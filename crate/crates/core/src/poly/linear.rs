//! Linear changes of coordinates and the reduction to a polynomial that is
//! monic-like in its last variable.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::{ComposedField, PolyField};
use super::polynomial::{rat, rat_to_f64, Polynomial};
use crate::error::{Error, Result};
use crate::rng;

/// Invertible `n x n` rational matrix acting by `x -> A x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearChange {
    n: usize,
    entries: Vec<BigRational>,
}

impl LinearChange {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
            });
        }
        let change = LinearChange {
            n,
            entries: rows.into_iter().flatten().collect(),
        };
        if change.determinant().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(change)
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = rat(1);
        }
        LinearChange { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = rat(1);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det *= &p;
            for r in col + 1..n {
                let factor = &m[r * n + col] / &p;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = &factor * &m[col * n + j];
                    m[r * n + j] -= v;
                }
            }
        }
        det
    }

    /// Row-major `f64` copy of the matrix.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rat_to_f64).collect()
    }

    /// Integer rows when every entry is integral.
    pub fn integer_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let e = self.entry(i, j);
                        if e.is_integer() {
                            e.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn rows_as_strings(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j).to_string()).collect())
            .collect()
    }

    /// Seeded random integer matrix with entries in `[-bound, bound]`;
    /// retries until invertible.
    pub fn random_integer<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Self {
        loop {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-bound..=bound)).collect())
                .collect();
            if let Ok(c) = Self::from_integers(&rows) {
                return c;
            }
        }
    }

    /// Column `j` as a vector.
    fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.n).map(|i| self.entry(i, j).clone()).collect()
    }
}

/// Exact composition `p o A`, i.e. `y -> p(A y)`.
pub fn apply_linear_change(p: &Polynomial, change: &LinearChange) -> Result<Polynomial> {
    if p.num_vars() != change.n {
        return Err(Error::DimensionMismatch {
            expected: p.num_vars(),
            got: change.n,
        });
    }
    if change.determinant().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let n = change.n;
    let images: Vec<Polynomial> = (0..n)
        .map(|i| {
            Polynomial::from_terms(
                n,
                (0..n).map(|j| {
                    let mut e = vec![0; n];
                    e[j] = 1;
                    (change.entry(i, j).clone(), e)
                }),
            )
            .expect("consistent dimensions")
        })
        .collect();
    p.substitute(&images)
}

/// `f o A` written as `a0 x_n^d + a1(x') x_n^(d-1) + ... + a_d(x')` with a
/// nonzero constant `a0`.
#[derive(Debug, Clone)]
pub struct StarForm {
    pub original: Polynomial,
    pub poly: Polynomial,
    pub change: LinearChange,
    pub leading: BigRational,
    pub attempts: usize,
}

impl StarForm {
    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn num_vars(&self) -> usize {
        self.poly.num_vars()
    }

    /// Numerical view evaluating `original(A x)`.
    pub fn field(&self) -> ComposedField {
        ComposedField::new(PolyField::new(&self.original), self.change.to_f64())
    }

    /// Coefficient polynomial `a_i` of `x_n^(d-i)`, in the first `n-1`
    /// variables (stored with `n` variables and zero last exponent).
    pub fn coefficient_poly(&self, i: u32) -> Polynomial {
        let n = self.poly.num_vars();
        let d = self.degree();
        Polynomial::from_terms(
            n,
            self.poly
                .terms()
                .filter(|(m, _)| m.exponents()[n - 1] + i == d)
                .map(|(m, c)| {
                    let mut e = m.exponents().to_vec();
                    e[n - 1] = 0;
                    (c.clone(), e)
                }),
        )
        .expect("consistent dimensions")
    }

    /// Checks the defining invariants by inspection of the terms.
    pub fn satisfies_invariants(&self) -> bool {
        let n = self.poly.num_vars();
        let d = self.degree();
        if d != self.original.degree() {
            return false;
        }
        let mut top = vec![0; n];
        top[n - 1] = d;
        if self.poly.coefficient(&top) != self.leading || self.leading.is_zero() {
            return false;
        }
        (0..=d).all(|i| self.coefficient_poly(i).degree() <= i)
            && self.coefficient_poly(0).is_constant()
    }
}

pub const STAR_FORM_RETRIES: usize = 50;
pub const STAR_FORM_ENTRY_BOUND: i64 = 3;

/// Reduces `p` to star form, trying the identity first and then seeded
/// random integer changes.
pub fn to_star_form(p: &Polynomial, seed: u64) -> Result<StarForm> {
    if p.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let n = p.num_vars();
    let d = p.degree();
    let top = p.homogeneous_part(d);
    let mut rng = rng::stream(seed, rng::tags::STAR_FORM, 0);
    for attempt in 0..=STAR_FORM_RETRIES {
        let change = if attempt == 0 {
            LinearChange::identity(n)
        } else {
            LinearChange::random_integer(&mut rng, n, STAR_FORM_ENTRY_BOUND)
        };
        // coefficient of x_n^d in p o A equals top(A e_n)
        let col = change.column(n - 1);
        let leading = eval_exact(&top, &col);
        if leading.is_zero() {
            continue;
        }
        let poly = if change.is_identity() {
            p.clone()
        } else {
            apply_linear_change(p, &change)?
        };
        return Ok(StarForm {
            original: p.clone(),
            poly,
            change,
            leading,
            attempts: attempt + 1,
        });
    }
    Err(Error::RetriesExhausted(STAR_FORM_RETRIES))
}

fn eval_exact(p: &Polynomial, x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (e, xi) in m.exponents().iter().zip(x) {
            if *e > 0 {
                t *= num_traits::pow(xi.clone(), *e as usize);
            }
        }
        acc += t;
    }
    acc
}

/// Serializable summary of a change matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChangeSummary {
    pub rows: Vec<Vec<String>>,
    pub attempts: usize,
    pub leading: String,
}

impl From<&StarForm> for ChangeSummary {
    fn from(s: &StarForm) -> Self {
        ChangeSummary {
            rows: s.change.rows_as_strings(),
            attempts: s.attempts,
            leading: s.leading.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse;

    #[test]
    fn identity_change_is_noop() {
        let f = parse("(y^2-1)^2 + (x*y-1)^2").unwrap();
        let g = apply_linear_change(&f, &LinearChange::identity(2)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn shear_of_product() {
        let f = parse("x*y").unwrap();
        let a = LinearChange::from_integers(&[vec![1, 1], vec![0, 1]]).unwrap();
        let g = apply_linear_change(&f, &a).unwrap();
        // (x + y) * y
        assert_eq!(g, parse("x*y + y^2").unwrap());
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(
            LinearChange::from_integers(&[vec![1, 2], vec![2, 4]]),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn degree_preserved_under_random_changes() {
        let f = parse("(y^2-1)^2 + (x*y-1)^2 + x^3").unwrap();
        let mut r = rng::stream(7, 99, 0);
        for _ in 0..20 {
            let a = LinearChange::random_integer(&mut r, 2, 3);
            assert_eq!(apply_linear_change(&f, &a).unwrap().degree(), f.degree());
        }
    }

    #[test]
    fn worked_example_is_already_in_star_form() {
        let f = parse("(y^2-1)^2 + (x*y-1)^2").unwrap();
        let s = to_star_form(&f, 0).unwrap();
        assert!(s.change.is_identity());
        assert_eq!(s.leading, rat(1));
        assert_eq!(s.degree(), 4);
        assert!(s.satisfies_invariants());
    }

    #[test]
    fn product_needs_a_change() {
        let f = parse("x*y").unwrap();
        let s = to_star_form(&f, 3).unwrap();
        assert!(!s.change.is_identity());
        assert!(s.satisfies_invariants());
    }

    #[test]
    fn univariate_square() {
        let s = to_star_form(&parse("x^2").unwrap(), 0).unwrap();
        assert!(s.change.is_identity());
        assert_eq!(s.leading, rat(1));
    }

    #[test]
    fn constant_rejected() {
        assert!(matches!(
            to_star_form(&parse("3").unwrap(), 0),
            Err(Error::ConstantPolynomial)
        ));
    }
}
