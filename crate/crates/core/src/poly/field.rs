//! Floating-point views of polynomials used by the numerical searches.
//!
//! [`PolyField`] evaluates a polynomial together with its exact gradient and
//! Hessian polynomials. [`ComposedField`] evaluates `f(A x)` through the
//! original polynomial instead of the expanded composition, which keeps
//! far-field evaluations well conditioned.

use num_rational::BigRational;
use twofloat::TwoFloat;

use super::polynomial::{monomial_value, rat_to_f64, NeumaierSum, Polynomial};

/// Smooth scalar function on `R^n` with exact derivatives.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Row-major `n x n` Hessian.
    fn hessian(&self, x: &[f64]) -> Vec<f64>;

    /// Partial derivative in the last coordinate.
    fn last_partial(&self, x: &[f64]) -> f64 {
        let g = self.gradient(x);
        g[g.len() - 1]
    }

    /// Gradient of the last partial derivative (last Hessian row).
    fn last_partial_gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let h = self.hessian(x);
        h[(n - 1) * n..].to_vec()
    }
}

/// Error allowed in the plain evaluation, relative to `1 + |value|`,
/// before it is redone in double-double.
const PLAIN_EVAL_TOL: f64 = 1e-12;

/// A polynomial ready for fast evaluation. Far from the origin the
/// monomials are huge and cancel almost completely; when the rounding bound
/// of the plain sum says so, the evaluation is repeated with products and
/// sums carried in double-double and rounded once at the end.
#[derive(Debug, Clone)]
struct Compiled {
    terms: Vec<(f64, Vec<u32>)>,
    exact: Vec<TwoFloat>,
    /// Largest exponent of each variable.
    max_exp: Vec<u32>,
    degree: u32,
}

fn rat_to_two_float(c: &BigRational) -> TwoFloat {
    let hi = rat_to_f64(c);
    let lo = BigRational::from_float(hi).map_or(0.0, |h| rat_to_f64(&(c - h)));
    TwoFloat::new_add(hi, lo)
}

impl Compiled {
    fn new(p: &Polynomial) -> Self {
        let mut max_exp = vec![0; p.num_vars()];
        for (m, _) in p.terms() {
            for (a, &k) in max_exp.iter_mut().zip(m.exponents()) {
                *a = (*a).max(k);
            }
        }
        Compiled {
            terms: p
                .terms()
                .map(|(m, c)| (rat_to_f64(c), m.exponents().to_vec()))
                .collect(),
            exact: p.terms().map(|(_, c)| rat_to_two_float(c)).collect(),
            max_exp,
            degree: p.degree(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = NeumaierSum::default();
        let mut magnitude = 0.0;
        for (c, e) in &self.terms {
            let t = c * monomial_value(e, x);
            magnitude += t.abs();
            acc.add(t);
        }
        let v = acc.total();
        let bound = f64::EPSILON * (self.degree as f64 + 2.0) * magnitude;
        if bound <= PLAIN_EVAL_TOL * (1.0 + v.abs()) || !bound.is_finite() {
            v
        } else {
            self.eval_two_float(x)
        }
    }

    fn eval_two_float(&self, x: &[f64]) -> f64 {
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<TwoFloat>> = self
            .max_exp
            .iter()
            .zip(x)
            .map(|(&m, &xi)| {
                let xi = TwoFloat::from(xi);
                let mut row = vec![TwoFloat::from(1.0)];
                for k in 1..=m as usize {
                    row.push(row[k - 1] * xi);
                }
                row
            })
            .collect();
        let mut acc = TwoFloat::from(0.0);
        for ((_, e), c) in self.terms.iter().zip(&self.exact) {
            let mut term = *c;
            for (row, &k) in powers.iter().zip(e) {
                if k > 0 {
                    term *= row[k as usize];
                }
            }
            acc += term;
        }
        f64::from(acc)
    }
}

/// Compiled polynomial with first and second derivatives.
#[derive(Debug, Clone)]
pub struct PolyField {
    n: usize,
    f: Compiled,
    grad: Vec<Compiled>,
    hess: Vec<Compiled>,
}

impl PolyField {
    pub fn new(p: &Polynomial) -> Self {
        let n = p.num_vars();
        let grad_polys = p.gradient();
        let mut hess = Vec::with_capacity(n * n);
        for gi in &grad_polys {
            for j in 0..n {
                hess.push(Compiled::new(&gi.partial(j).expect("index in range")));
            }
        }
        PolyField {
            n,
            f: Compiled::new(p),
            grad: grad_polys.iter().map(Compiled::new).collect(),
            hess,
        }
    }
}

impl ScalarField for PolyField {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.f.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        self.hess.iter().map(|h| h.eval(x)).collect()
    }

    fn last_partial(&self, x: &[f64]) -> f64 {
        self.grad[self.n - 1].eval(x)
    }

    fn last_partial_gradient(&self, x: &[f64]) -> Vec<f64> {
        self.hess[(self.n - 1) * self.n..]
            .iter()
            .map(|h| h.eval(x))
            .collect()
    }
}

/// `x -> f(A x)` for a fixed matrix `A`.
#[derive(Debug, Clone)]
pub struct ComposedField {
    base: PolyField,
    matrix: Vec<f64>,
}

impl ComposedField {
    pub fn new(base: PolyField, matrix: Vec<f64>) -> Self {
        assert_eq!(matrix.len(), base.n * base.n);
        ComposedField { base, matrix }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.base.n;
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[i * n + j] * x[j]).sum())
            .collect()
    }

    /// `A^T v`.
    fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.base.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.matrix[i * n + j] * v[i]).sum())
            .collect()
    }
}

impl ScalarField for ComposedField {
    fn dim(&self) -> usize {
        self.base.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.base.value(&self.apply(x))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.apply_transpose(&self.base.gradient(&self.apply(x)))
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let n = self.base.n;
        let h = self.base.hessian(&self.apply(x));
        let a = &self.matrix;
        // A^T H A
        let mut ha = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                ha[i * n + j] = (0..n).map(|k| h[i * n + k] * a[k * n + j]).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| a[k * n + i] * ha[k * n + j]).sum();
            }
        }
        out
    }

    fn last_partial(&self, x: &[f64]) -> f64 {
        let n = self.base.n;
        let g = self.base.gradient(&self.apply(x));
        (0..n).map(|i| self.matrix[i * n + n - 1] * g[i]).sum()
    }
}
