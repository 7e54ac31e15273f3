//! Samples of `V1 = {df/dx_n = 0}` on spheres of the radius schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::optim::{dist, lm, sphere_lm};
use crate::poly::{ScalarField, StarForm};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct V1Sample {
    pub point: Vec<f64>,
    pub radius: f64,
    pub value: f64,
    /// `|df/dx_n|` at the point.
    pub residual: f64,
}

/// `V1` samples grouped by radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct V1Atlas {
    pub radii: Vec<f64>,
    pub samples: Vec<Vec<V1Sample>>,
}

impl V1Atlas {
    pub fn is_empty(&self) -> bool {
        self.samples.iter().all(Vec::is_empty)
    }

    pub fn all(&self) -> impl Iterator<Item = &V1Sample> {
        self.samples.iter().flatten()
    }
}

fn last_partial_residual(field: &dyn ScalarField) -> impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Sync + '_ {
    move |x: &[f64]| (vec![field.last_partial(x)], field.last_partial_gradient(x))
}

/// Angles in the circle sweep used for two variables.
const SWEEP_ANGLES: usize = 4096;

/// Points of `V1` on the sphere `|x| = radius`, deduplicated and sorted.
///
/// In two variables the circle is swept on an angle grid and every sign
/// change of `df/dx_n` is bisected; seeded sphere-constrained least squares
/// runs in every dimension and catches tangential zeros the sweep misses.
pub fn v1_on_sphere(
    field: &dyn ScalarField,
    radius: f64,
    cfg: &ToleranceConfig,
    stream: u64,
) -> Vec<V1Sample> {
    let n = field.dim();
    if n == 1 {
        let found = vec![vec![-radius], vec![radius]];
        return collect_samples(field, found, radius, cfg.grad_tol, cfg.cluster_tol * radius);
    }
    let starts: Vec<Vec<f64>> = (0..cfg.v1_starts)
        .map(|i| {
            let mut g = rng::stream(cfg.seed, rng::tags::V1, stream * 100_000 + i as u64);
            rng::sphere_point(&mut g, n, radius)
        })
        .collect();
    let res = last_partial_residual(field);
    let mut found: Vec<Vec<f64>> = if n == 2 { circle_sweep(field, radius) } else { Vec::new() };
    found.extend(starts.par_iter().map(|s| sphere_lm(&res, s, radius, 100).x).collect::<Vec<_>>());
    collect_samples(field, found, radius, cfg.grad_tol, cfg.cluster_tol * radius)
}

fn circle_sweep(field: &dyn ScalarField, radius: f64) -> Vec<Vec<f64>> {
    let at = |theta: f64| vec![radius * theta.cos(), radius * theta.sin()];
    let g = |theta: f64| field.last_partial(&at(theta));
    let step = std::f64::consts::TAU / SWEEP_ANGLES as f64;
    let values: Vec<f64> = (0..=SWEEP_ANGLES).map(|k| g(k as f64 * step)).collect();
    let mut out = Vec::new();
    for k in 0..SWEEP_ANGLES {
        let (ga, gb) = (values[k], values[k + 1]);
        if ga == 0.0 {
            out.push(at(k as f64 * step));
        } else if ga * gb < 0.0 {
            let (mut a, mut b, mut fa) = (k as f64 * step, (k + 1) as f64 * step, ga);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let fm = g(m);
                if fm == 0.0 || m == a || m == b {
                    a = m;
                    b = m;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            let gm_a = g(a).abs();
            let gm_b = g(b).abs();
            out.push(at(if gm_a <= gm_b { a } else { b }));
        }
    }
    out
}

/// Points of `V1 ∩ {f = level}` found from seeded starts at the given
/// scales (no sphere constraint).
pub fn v1_at_level(
    field: &dyn ScalarField,
    level: f64,
    scales: &[f64],
    starts_per_scale: usize,
    cfg: &ToleranceConfig,
    stream: u64,
) -> Vec<V1Sample> {
    let n = field.dim();
    let res = move |x: &[f64]| {
        let g = field.gradient(x);
        let mut jac = g.clone();
        jac.extend(field.last_partial_gradient(x));
        (vec![field.value(x) - level, g[n - 1]], jac)
    };
    let starts: Vec<Vec<f64>> = scales
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| {
            (0..starts_per_scale).map(move |i| {
                let mut g = rng::stream(
                    cfg.seed,
                    rng::tags::V1,
                    stream * 100_000 + (k * 1000 + i) as u64 + 50_000,
                );
                rng::ball_point(&mut g, n, s)
            })
        })
        .collect();
    let found: Vec<Vec<f64>> = starts.par_iter().map(|s| lm(&res, s, 200).x).collect();
    let slack = 1e-8 * (1.0 + level.abs());
    let mut out = collect_samples(field, found, f64::NAN, cfg.grad_tol, 0.0);
    out.retain(|s| (s.value - level).abs() <= slack);
    for s in out.iter_mut() {
        s.radius = crate::optim::norm(&s.point);
    }
    out
}

/// Keeps points with residual within `tol`, drops any point within
/// `merge` (or a relative 1e-7) of a better one, and sorts the survivors.
fn collect_samples(
    field: &dyn ScalarField,
    found: Vec<Vec<f64>>,
    radius: f64,
    tol: f64,
    merge: f64,
) -> Vec<V1Sample> {
    let mut cands: Vec<V1Sample> = found
        .into_iter()
        .filter_map(|x| {
            let residual = field.last_partial(&x).abs();
            (residual <= tol).then(|| V1Sample {
                value: field.value(&x),
                point: x,
                radius,
                residual,
            })
        })
        .collect();
    cands.sort_by(|a, b| a.residual.total_cmp(&b.residual).then_with(|| lex(&a.point, &b.point)));
    let mut out: Vec<V1Sample> = Vec::new();
    for c in cands {
        let scale = crate::optim::norm(&c.point).max(1.0);
        let r = merge.max(1e-7 * scale);
        if out.iter().all(|s| dist(&s.point, &c.point) > r) {
            out.push(c);
        }
    }
    out.sort_by(|a, b| lex(&a.point, &b.point));
    out
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.total_cmp(q))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Samples of `V1` on the sphere of radius `radius`, in the coordinates of
/// the star form.
pub fn sample_v1_sphere(star: &StarForm, radius: f64, cfg: &ToleranceConfig) -> Vec<V1Sample> {
    v1_on_sphere(&star.field(), radius, cfg, 0)
}

pub fn v1_atlas(field: &dyn ScalarField, cfg: &ToleranceConfig) -> V1Atlas {
    let radii = cfg.radii();
    let samples = radii
        .iter()
        .enumerate()
        .map(|(k, &r)| v1_on_sphere(field, r, cfg, k as u64 + 1))
        .collect();
    V1Atlas { radii, samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, to_star_form};

    #[test]
    fn axis_of_sum_of_squares() {
        let s = to_star_form(&parse("x^2 + y^2").unwrap(), 0).unwrap();
        let pts = sample_v1_sphere(&s, 5.0, &ToleranceConfig::default());
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!((pts[0].point[0] + 5.0).abs() < 1e-9 && pts[0].point[1].abs() < 1e-9);
        assert!((pts[1].point[0] - 5.0).abs() < 1e-9 && pts[1].point[1].abs() < 1e-9);
    }

    #[test]
    fn worked_example_branches() {
        let s = to_star_form(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap(), 0).unwrap();
        let r = 200.0;
        let pts = sample_v1_sphere(&s, r, &ToleranceConfig::default());
        assert!(pts.len() >= 2, "{pts:?}");
        for p in &pts {
            // the unbounded branch hugs x*y = 1 with y -> 0
            assert!(p.point[1].abs() < 0.01);
            assert!((p.point[0].abs() - r).abs() < 1e-3);
            assert!((p.value - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn linear_has_no_critical_directions() {
        let s = to_star_form(&parse("x").unwrap(), 0).unwrap();
        assert!(sample_v1_sphere(&s, 10.0, &ToleranceConfig::default()).is_empty());
    }
}
