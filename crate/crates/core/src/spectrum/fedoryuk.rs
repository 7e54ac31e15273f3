//! Estimate of the Fedoryuk set: limits of `f` along sequences running to
//! infinity with vanishing gradient.
//!
//! Two searches run on each sphere of the radius schedule. The untargeted
//! search minimizes `|grad f|^2` from seeded starts and feeds the clusters.
//! The targeted search minimizes `|grad f|^2 + (f - s)^2` for a fixed set of
//! levels `s`; hits at levels away from every untargeted cluster mean the
//! values are spread over an interval, which raises `unbounded_flag`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cluster::{confirmed_clusters, Cluster, Witness, CONFIRM_RADII};
use crate::config::ToleranceConfig;
use crate::optim::{norm, sphere_lm};
use crate::poly::{PolyField, Polynomial, ScalarField};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub target: f64,
    /// Best witness at the target over the last radii, when one qualifies.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FedoryukEstimate {
    pub clusters: Vec<Cluster>,
    pub probes: Vec<Probe>,
    pub unbounded_flag: bool,
    pub radii: Vec<f64>,
}

impl FedoryukEstimate {
    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn is_finite(&self) -> bool {
        !self.unbounded_flag
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty() && !self.unbounded_flag
    }

    /// Every stored witness, untargeted ones first.
    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.clusters
            .iter()
            .flat_map(|c| c.witnesses.iter())
            .chain(self.probes.iter().filter_map(|p| p.witness.as_ref()))
    }

    /// Whether `t` lies within `tol` of a cluster or a successful probe.
    pub fn near(&self, t: f64, tol: f64) -> bool {
        self.clusters.iter().any(|c| (c.value - t).abs() <= tol)
            || self
                .probes
                .iter()
                .filter_map(|p| p.witness.as_ref())
                .any(|w| (w.value - t).abs() <= tol)
    }
}

/// Fixed probe levels; midpoints between clusters are added at run time.
pub const PROBE_TARGETS: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// Successful off-cluster probes needed to raise the flag.
const FLAG_HITS: usize = 2;

fn gradient_residual(field: &dyn ScalarField) -> impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Sync + '_ {
    move |x: &[f64]| (field.gradient(x), field.hessian(x))
}

fn targeted_residual(field: &dyn ScalarField, s: f64) -> impl Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Sync + '_ {
    move |x: &[f64]| {
        let mut r = field.gradient(x);
        let mut jac = field.hessian(x);
        jac.extend_from_slice(&r);
        r.push(field.value(x) - s);
        (r, jac)
    }
}

fn witness(field: &dyn ScalarField, x: Vec<f64>, radius: f64) -> Witness {
    Witness {
        residual: norm(&field.gradient(&x)),
        value: field.value(&x),
        point: x,
        radius,
    }
}

/// Minimizers of `|grad f|` on the sphere of the given radius that meet the
/// gradient tolerance.
pub fn sphere_critical_points(
    field: &dyn ScalarField,
    radius: f64,
    cfg: &ToleranceConfig,
    stream: u64,
) -> Vec<Witness> {
    let n = field.dim();
    let res = gradient_residual(field);
    let starts = starts_on_sphere(n, radius, cfg.fedoryuk_starts, cfg.seed, rng::tags::FEDORYUK, stream);
    let found: Vec<Witness> = starts
        .par_iter()
        .map(|s| witness(field, fit_on_sphere(&res, s, radius), radius))
        .collect();
    found.into_iter().filter(|w| w.residual <= cfg.grad_tol).collect()
}

fn starts_on_sphere(n: usize, radius: f64, count: usize, seed: u64, tag: u64, stream: u64) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![-radius], vec![radius]];
    }
    (0..count)
        .map(|i| {
            let mut g = rng::stream(seed, tag, stream * 100_000 + i as u64);
            rng::sphere_point(&mut g, n, radius)
        })
        .collect()
}

fn fit_on_sphere(res: &(dyn Fn(&[f64]) -> (Vec<f64>, Vec<f64>) + Sync), x0: &[f64], radius: f64) -> Vec<f64> {
    if x0.len() == 1 {
        x0.to_vec()
    } else {
        sphere_lm(&res, x0, radius, 200).x
    }
}

/// Best witness near level `s` over the last radii of the schedule.
fn probe(field: &dyn ScalarField, s: f64, radii: &[f64], cfg: &ToleranceConfig, stream: u64) -> Probe {
    let n = field.dim();
    let res = targeted_residual(field, s);
    let tail = &radii[radii.len().saturating_sub(CONFIRM_RADII)..];
    let mut best: Option<Witness> = None;
    for (k, &r) in tail.iter().enumerate() {
        let starts = starts_on_sphere(n, r, cfg.fedoryuk_starts, cfg.seed, rng::tags::TARGETED, stream * 8 + k as u64);
        let found: Vec<Witness> = starts
            .par_iter()
            .map(|x0| witness(field, fit_on_sphere(&res, x0, r), r))
            .collect();
        for w in found {
            if w.residual <= cfg.grad_tol && (w.value - s).abs() <= cfg.cluster_tol {
                let better = match &best {
                    None => true,
                    Some(b) => (w.radius, -w.residual) > (b.radius, -b.residual),
                };
                if better {
                    best = Some(w);
                }
            }
        }
    }
    Probe { target: s, witness: best }
}

pub fn fedoryuk_of_field(field: &dyn ScalarField, cfg: &ToleranceConfig) -> FedoryukEstimate {
    let radii = cfg.radii();
    let witnesses: Vec<Witness> = radii
        .iter()
        .enumerate()
        .flat_map(|(k, &r)| sphere_critical_points(field, r, cfg, k as u64 + 1))
        .collect();
    let clusters = confirmed_clusters(witnesses, &radii, cfg.cluster_tol, true);

    let mut targets: Vec<f64> = PROBE_TARGETS.to_vec();
    let values: Vec<f64> = clusters.iter().map(|c| c.value).collect();
    targets.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let probes: Vec<Probe> = targets
        .iter()
        .enumerate()
        .map(|(i, &s)| probe(field, s, &radii, cfg, i as u64 + 1))
        .collect();
    let hits = probes
        .iter()
        .filter(|p| p.witness.is_some())
        .filter(|p| values.iter().all(|v| (v - p.target).abs() > 2.0 * cfg.cluster_tol))
        .count();
    FedoryukEstimate {
        clusters,
        probes,
        unbounded_flag: hits >= FLAG_HITS,
        radii,
    }
}

pub fn fedoryuk_estimate(p: &Polynomial, cfg: &ToleranceConfig) -> FedoryukEstimate {
    fedoryuk_of_field(&PolyField::new(p), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    #[test]
    fn sum_of_squares_has_none() {
        let e = fedoryuk_estimate(&parse("x^2 + y^2").unwrap(), &ToleranceConfig::default());
        assert!(e.is_empty(), "{e:?}");
    }

    #[test]
    fn worked_example_single_value() {
        let e = fedoryuk_estimate(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap(), &ToleranceConfig::default());
        assert_eq!(e.clusters.len(), 1, "{:?}", e.values());
        assert!((e.clusters[0].value - 1.0).abs() < 0.05);
        assert!(!e.unbounded_flag);
        let f = PolyField::new(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap());
        for w in e.witnesses() {
            assert!(norm(&f.gradient(&w.point)) <= 1e-3 && norm(&w.point) >= 10.0 - 1e-9);
        }
    }

    #[test]
    fn dense_values_raise_the_flag() {
        let e = fedoryuk_estimate(&parse("x + x^2*y + x^4*y*z").unwrap(), &ToleranceConfig::default());
        assert!(e.unbounded_flag);
        for t in [-1.0, 0.0, 1.0] {
            let p = e.probes.iter().find(|p| p.target == t).unwrap();
            let w = p.witness.as_ref().unwrap_or_else(|| panic!("no witness at {t}"));
            assert!(w.residual <= 1e-3 && norm(&w.point) >= 100.0 && (w.value - t).abs() <= 0.1);
        }
    }
}
