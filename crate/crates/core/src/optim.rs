//! Small dense local solvers shared by the searches: a damped Newton method
//! for minimizing a field, Levenberg-Marquardt on a sphere for residual
//! systems, and Nelder-Mead for low-dimensional derivative-free problems.

use nalgebra::{DMatrix, DVector};

use crate::poly::field::ScalarField;

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scale_to(x: &mut [f64], radius: f64) {
    let r = norm(x);
    if r > 0.0 {
        for v in x.iter_mut() {
            *v *= radius / r;
        }
    }
}

/// Solves `(A + mu * D) x = b` for symmetric positive semidefinite `A`,
/// where `D` is `diag(A)` floored at a fraction of its largest entry.
fn damped_solve(a: &[f64], b: &[f64], n: usize, mu: f64) -> Option<Vec<f64>> {
    let maxdiag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let floor = (maxdiag * 1e-12).max(1e-300);
    let mut m = DMatrix::from_row_slice(n, n, a);
    for i in 0..n {
        m[(i, i)] += mu * a[i * n + i].abs().max(floor);
    }
    let rhs = DVector::from_column_slice(b);
    m.cholesky().map(|c| c.solve(&rhs).as_slice().to_vec())
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn centered(radius: f64) -> Self {
        Ball {
            center: Vec::new(),
            radius,
        }
    }

    fn project(&self, x: &mut [f64]) {
        if self.center.is_empty() {
            if norm(x) > self.radius {
                scale_to(x, self.radius);
            }
            return;
        }
        let mut d: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        if norm(&d) > self.radius {
            scale_to(&mut d, self.radius);
            for ((xi, c), di) in x.iter_mut().zip(&self.center).zip(d) {
                *xi = c + di;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Keep iterates inside this closed ball.
    pub ball: Option<Ball>,
    /// Stop as soon as the value drops to this level.
    pub stop_below: Option<f64>,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 200,
            ball: None,
            stop_below: None,
        }
    }
}

/// Levenberg-regularized Newton descent on `field`.
pub fn damped_newton(field: &dyn ScalarField, x0: &[f64], opts: NewtonOptions) -> Minimum {
    let n = field.dim();
    let mut x = x0.to_vec();
    if let Some(b) = &opts.ball {
        b.project(&mut x);
    }
    let mut fx = field.value(&x);
    let mut mu = 1e-3;
    for _ in 0..opts.max_iter {
        if let Some(level) = opts.stop_below {
            if fx <= level {
                break;
            }
        }
        let g = field.gradient(&x);
        let gn = norm(&g);
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let h = field.hessian(&x);
        let mut accepted = false;
        while mu < 1e20 {
            // shift so that H + mu*|H| is positive definite
            let mut shifted = h.clone();
            let maxdiag = (0..n).map(|i| h[i * n + i].abs()).fold(0.0, f64::max) + gn;
            for i in 0..n {
                shifted[i * n + i] += mu * maxdiag;
            }
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let mut m = DMatrix::from_row_slice(n, n, &shifted);
            m = (&m + m.transpose()) * 0.5;
            let Some(chol) = m.cholesky() else {
                mu *= 8.0;
                continue;
            };
            let step = chol.solve(&DVector::from_column_slice(&neg));
            let mut cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Some(b) = &opts.ball {
                b.project(&mut cand);
            }
            let fc = field.value(&cand);
            if fc.is_finite() && fc < fx {
                let moved = dist(&cand, &x);
                x = cand;
                let improvement = fx - fc;
                fx = fc;
                mu = (mu / 4.0).max(1e-14);
                accepted = true;
                if moved <= 1e-15 * (1.0 + norm(&x)) || improvement <= 1e-16 * fx.abs() {
                    return finish(field, x, fx);
                }
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
    }
    finish(field, x, fx)
}

fn finish(field: &dyn ScalarField, x: Vec<f64>, value: f64) -> Minimum {
    let grad_norm = norm(&field.gradient(&x));
    Minimum { x, value, grad_norm }
}

/// Residual system `x -> (r(x), J(x))` with `J` row-major `m x n`.
pub trait Residual: Sync {
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>);
}

impl<F> Residual for F
where
    F: Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Sync,
{
    fn eval(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self(x)
    }
}

#[derive(Debug, Clone)]
pub struct SphereFit {
    pub x: Vec<f64>,
    pub cost: f64,
}

/// Unconstrained Levenberg-Marquardt for `min |r(x)|^2`.
pub fn lm(res: &dyn Residual, x0: &[f64], max_iter: usize) -> SphereFit {
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut r, mut jac) = res.eval(&x);
    let mut cost = dot(&r, &r);
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        if cost == 0.0 || !cost.is_finite() {
            break;
        }
        let (a, b) = normal_equations(&jac, &r, n);
        let mut accepted = false;
        while mu < 1e16 {
            let Some(step) = damped_solve(&a, &b, n, mu) else {
                mu *= 8.0;
                continue;
            };
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let (rc, jc) = res.eval(&cand);
            let cc = dot(&rc, &rc);
            if cc.is_finite() && cc < cost {
                let moved = dist(&cand, &x);
                x = cand;
                r = rc;
                jac = jc;
                let rel = (cost - cc) / cost;
                cost = cc;
                mu = (mu / 4.0).max(1e-12);
                accepted = true;
                if moved <= 1e-15 * (1.0 + norm(&x)) || rel < 1e-14 {
                    return SphereFit { x, cost };
                }
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
    }
    SphereFit { x, cost }
}

/// `(J^T J, -J^T r)` for a row-major `J`.
fn normal_equations(jac: &[f64], r: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = r.len();
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (0..m).map(|k| jac[k * n + i] * jac[k * n + j]).sum();
        }
        b[i] = -(0..m).map(|k| jac[k * n + i] * r[k]).sum::<f64>();
    }
    (a, b)
}

/// Levenberg-Marquardt for `min |r(x)|^2` subject to `|x| = radius`.
///
/// Steps are taken in the tangent space and retracted by normalization.
pub fn sphere_lm(res: &dyn Residual, x0: &[f64], radius: f64, max_iter: usize) -> SphereFit {
    let n = x0.len();
    let mut x = x0.to_vec();
    scale_to(&mut x, radius);
    let (mut r, mut jac) = res.eval(&x);
    let mut cost = dot(&r, &r);
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        if cost == 0.0 || !cost.is_finite() {
            break;
        }
        let m = r.len();
        let u: Vec<f64> = x.iter().map(|v| v / radius).collect();
        // J P with P = I - u u^T
        let mut jp = jac.clone();
        for row in 0..m {
            let s: f64 = (0..n).map(|j| jac[row * n + j] * u[j]).sum();
            for j in 0..n {
                jp[row * n + j] -= s * u[j];
            }
        }
        let (a, b) = normal_equations(&jp, &r, n);
        let mut accepted = false;
        while mu < 1e16 {
            let Some(mut step) = damped_solve(&a, &b, n, mu) else {
                mu *= 8.0;
                continue;
            };
            let s = dot(&step, &u);
            for j in 0..n {
                step[j] -= s * u[j];
            }
            let mut cand: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            scale_to(&mut cand, radius);
            let (rc, jc) = res.eval(&cand);
            let cc = dot(&rc, &rc);
            if cc.is_finite() && cc < cost {
                let moved = dist(&cand, &x);
                x = cand;
                r = rc;
                jac = jc;
                let rel = (cost - cc) / cost;
                cost = cc;
                mu = (mu / 4.0).max(1e-12);
                accepted = true;
                if moved <= 1e-15 * radius || rel < 1e-14 {
                    return SphereFit { x, cost };
                }
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
    }
    SphereFit { x, cost }
}

/// Nelder-Mead simplex search.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        let v = f(&p);
        simplex.push((p, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    };
    for _ in 0..max_iter {
        order(&mut simplex);
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex
            .iter()
            .map(|(p, _)| dist(p, &simplex[0].0))
            .fold(0.0, f64::max);
        if spread.abs() <= 1e-15 * (1.0 + simplex[0].1.abs()) && size < 1e-12 {
            break;
        }
        if size < 1e-13 {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let towards = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = towards(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = towards(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { towards(-0.5) } else { towards(0.5) };
            let fc = f(&xc);
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&item.0)
                        .map(|(b, q)| b + 0.5 * (q - b))
                        .collect();
                    let v = f(&p);
                    *item = (p, v);
                }
            }
        }
    }
    order(&mut simplex);
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::field::PolyField;
    use crate::poly::parse::parse;

    #[test]
    fn newton_finds_minimizer_of_worked_example() {
        let f = PolyField::new(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap());
        let m = damped_newton(&f, &[1.5, 0.7], NewtonOptions::default());
        assert!(m.value < 1e-20, "{m:?}");
        assert!(m.grad_norm < 1e-9);
    }

    #[test]
    fn newton_respects_ball() {
        let f = PolyField::new(&parse("x").unwrap());
        let m = damped_newton(
            &f,
            &[0.0],
            NewtonOptions {
                ball: Some(Ball::centered(5.0)),
                ..Default::default()
            },
        );
        assert!((m.x[0] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn sphere_lm_minimizes_gradient_norm() {
        // on the circle of radius 3, |grad(x^2 + 2 y^2)|^2 = 4x^2 + 16y^2 is
        // minimal at (+-3, 0)
        let f = PolyField::new(&parse("x^2 + 2*y^2").unwrap());
        let res = |x: &[f64]| (f.gradient(x), f.hessian(x));
        let fit = sphere_lm(&res, &[1.0, 1.0], 3.0, 100);
        assert!((fit.x[0].abs() - 3.0).abs() < 1e-8, "{fit:?}");
        assert!((fit.cost - 36.0).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let (x, v) = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 5000);
        assert!(v < 1e-10, "{x:?} {v}");
    }
}
