//! Multi-start estimate of `inf f` over `R^n`.
//!
//! Minima are computed inside the growing balls of the radius schedule. A
//! polynomial that is unbounded below shows ball minima that keep dropping
//! with the radius; one that is bounded below shows minima that settle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{PolyField, ScalarField};
use super::polynomial::Polynomial;
use crate::config::ToleranceConfig;
use crate::optim::{damped_newton, norm, Ball, NewtonOptions};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfimumEstimate {
    /// Best value found, or `-inf`.
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub value: f64,
    pub attained: bool,
    pub witness: Option<Vec<f64>>,
    /// Minimum found inside each ball of the schedule.
    pub ball_minima: Vec<f64>,
}

impl InfimumEstimate {
    pub fn is_unbounded(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    /// Whether `[f <= t]` is nonempty according to this estimate.
    pub fn admits(&self, t: f64, tol: f64) -> bool {
        if self.is_unbounded() {
            return true;
        }
        if self.attained {
            t >= self.value - tol
        } else {
            t > self.value + tol
        }
    }
}

/// For inputs this close to stationary we regard the minimum as attained.
const ATTAINED_GRAD: f64 = 1e-6;

pub fn infimum_estimate(p: &Polynomial, cfg: &ToleranceConfig) -> InfimumEstimate {
    infimum_of_field(&PolyField::new(p), cfg)
}

pub fn infimum_of_field(field: &dyn ScalarField, cfg: &ToleranceConfig) -> InfimumEstimate {
    let n = field.dim();
    let radii = cfg.radii();
    let mut best_x = vec![0.0; n];
    let mut best = field.value(&best_x);
    let mut ball_minima = Vec::with_capacity(radii.len());
    let mut attained_at: Option<Vec<f64>> = None;
    for (k, &r) in radii.iter().enumerate() {
        let starts: Vec<Vec<f64>> = (0..cfg.infimum_starts)
            .map(|i| {
                let mut g = rng::stream(cfg.seed, rng::tags::INFIMUM, (k * 10_000 + i) as u64);
                // half of the starts probe the inner unit-scale region
                let scale = if i % 2 == 0 { r } else { r.min(2.0) };
                rng::ball_point(&mut g, n, scale)
            })
            .chain(std::iter::once(best_x.clone()))
            .collect();
        let results: Vec<_> = starts
            .par_iter()
            .map(|s| {
                damped_newton(
                    field,
                    s,
                    NewtonOptions {
                        max_iter: 300,
                        ball: Some(Ball::centered(r)),
                        stop_below: None,
                    },
                )
            })
            .collect();
        for m in results {
            if m.value < best {
                best = m.value;
                best_x = m.x.clone();
            }
            if m.grad_norm <= ATTAINED_GRAD && norm(&m.x) < 0.5 * r {
                let better = match &attained_at {
                    Some(a) => m.value < field.value(a),
                    None => true,
                };
                if better {
                    attained_at = Some(m.x);
                }
            }
        }
        ball_minima.push(best);
    }
    let k = ball_minima.len();
    let step = cfg.radius_growth.log2();
    let drops = |i: usize| (ball_minima[i - 1] - ball_minima[i]) / step;
    let unbounded = k >= 3 && (k - 2..k).all(|i| drops(i) > cfg.unbounded_slope);
    if unbounded {
        return InfimumEstimate {
            value: f64::NEG_INFINITY,
            attained: false,
            witness: None,
            ball_minima,
        };
    }
    let tol = 1e-9 * (1.0 + best.abs());
    match attained_at {
        Some(a) if field.value(&a) <= best + tol => InfimumEstimate {
            value: best.min(field.value(&a)),
            attained: true,
            witness: Some(a),
            ball_minima,
        },
        _ => InfimumEstimate {
            value: best,
            attained: false,
            witness: Some(best_x),
            ball_minima,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::parse;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn sum_of_squares_attains_zero_at_origin() {
        let e = infimum_estimate(&parse("x^2 + y^2").unwrap(), &cfg());
        assert!(e.attained);
        assert!(e.value.abs() < 1e-12);
        assert!(norm(e.witness.as_ref().unwrap()) < 1e-6);
    }

    #[test]
    fn linear_is_unbounded() {
        let e = infimum_estimate(&parse("x").unwrap(), &cfg());
        assert!(e.is_unbounded());
        assert!(!e.attained);
        assert!(e.witness.is_none());
    }

    #[test]
    fn worked_example_attains_zero() {
        let f = parse("(y^2-1)^2 + (x*y-1)^2").unwrap();
        let e = infimum_estimate(&f, &cfg());
        assert!(e.attained);
        assert!(e.value.abs() < 1e-12);
        let w = e.witness.unwrap();
        assert!(f.eval(&w).unwrap().abs() < 1e-10);
        // zeros are (1, 1) and (-1, -1)
        assert!((w[0].abs() - 1.0).abs() < 1e-5 && (w[1].abs() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn infimum_approached_at_infinity_is_not_attained() {
        let e = infimum_estimate(&parse("x^2 + (x*y-1)^2").unwrap(), &cfg());
        assert!(!e.is_unbounded());
        assert!(!e.attained, "{e:?}");
        assert!(e.value >= 0.0 && e.value < 1e-3);
    }
}
