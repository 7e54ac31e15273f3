//! Distance from a point to a sublevel set `[f <= t]`.
//!
//! The oracle always holds a feasible witness, so the reported distance is
//! an upper bound on the true one. Candidates come from three sources:
//!
//! * anchors, feasible points placed once per level by seeded descents and
//!   joined to the query point by a segment whose first crossing is kept;
//! * rays from the query point in a fixed set of directions, marched up to
//!   the best distance known so far;
//! * a descent started at the query point itself.
//!
//! The best candidates are then polished by walking along the level set
//! towards the foot of the perpendicular.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::optim::{damped_newton, dist, dot, norm, NewtonOptions};
use crate::poly::{PolyField, Polynomial, ScalarField};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceStatus {
    ExactZero,
    Estimated,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublevelDistanceResult {
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub distance: f64,
    pub witness: Option<Vec<f64>>,
    pub status: DistanceStatus,
}

/// Number of candidates that get polished.
const POLISHED: usize = 3;
/// Anchors tried per query, nearest first.
const SEGMENT_ANCHORS: usize = 8;
const SEGMENT_SAMPLES: usize = 64;

/// Distance oracle for one fixed level.
pub struct SublevelOracle<'a> {
    field: &'a dyn ScalarField,
    level: f64,
    slack: f64,
    anchors: Vec<Vec<f64>>,
    directions: Vec<Vec<f64>>,
    ray_steps: usize,
    polish_iters: usize,
    cap: f64,
    ray_floor: f64,
}

impl<'a> SublevelOracle<'a> {
    pub fn new(field: &'a dyn ScalarField, level: f64, cfg: &ToleranceConfig) -> Self {
        Self::with_anchors(field, level, cfg, &[])
    }

    /// Builds the oracle, adding `extra` to the seeded anchors when feasible.
    pub fn with_anchors(
        field: &'a dyn ScalarField,
        level: f64,
        cfg: &ToleranceConfig,
        extra: &[Vec<f64>],
    ) -> Self {
        let n = field.dim();
        let slack = cfg.level_slack(level);
        let mut scales: Vec<f64> = vec![0.5, 2.0];
        scales.extend(cfg.radii());
        let starts: Vec<Vec<f64>> = std::iter::once(vec![0.0; n])
            .chain((0..cfg.distance_anchor_starts).map(|i| {
                let mut g = rng::stream(cfg.seed, rng::tags::DISTANCE, i as u64);
                rng::ball_point(&mut g, n, scales[i % scales.len()])
            }))
            .chain(extra.iter().cloned())
            .collect();
        let found: Vec<Option<Vec<f64>>> = starts
            .par_iter()
            .map(|s| {
                let m = damped_newton(
                    field,
                    s,
                    NewtonOptions {
                        max_iter: 200,
                        ball: None,
                        stop_below: Some(level),
                    },
                );
                (m.value <= level + slack).then_some(m.x)
            })
            .collect();
        let mut anchors: Vec<Vec<f64>> = Vec::new();
        for a in found.into_iter().flatten() {
            if !anchors.iter().any(|b| dist(b, &a) <= 1e-9 * (1.0 + norm(&a))) {
                anchors.push(a);
            }
        }
        let rays = if cfg.distance_rays > 0 {
            cfg.distance_rays
        } else {
            match n {
                1 => 2,
                2 => 180,
                _ => 400,
            }
        };
        SublevelOracle {
            field,
            level,
            slack,
            anchors,
            directions: directions(n, rays),
            ray_steps: cfg.distance_ray_steps,
            polish_iters: cfg.distance_polish_iters,
            cap: 4.0 * cfg.max_radius(),
            ray_floor: 0.0,
        }
    }

    /// Skips the ray search when the local candidates already lie within
    /// `floor`. Callers that only compare distances against a larger
    /// threshold use this to save most of the work.
    pub fn with_ray_floor(mut self, floor: f64) -> Self {
        self.ray_floor = floor;
        self
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn is_feasible(&self, y: &[f64]) -> bool {
        self.field.value(y) <= self.level + self.slack
    }

    pub fn distance(&self, x: &[f64]) -> SublevelDistanceResult {
        if self.is_feasible(x) {
            return SublevelDistanceResult {
                distance: 0.0,
                witness: Some(x.to_vec()),
                status: DistanceStatus::ExactZero,
            };
        }
        let mut cands: Vec<Vec<f64>> = Vec::new();

        let mut near: Vec<&Vec<f64>> = self.anchors.iter().collect();
        near.sort_by(|a, b| dist(a, x).total_cmp(&dist(b, x)));
        for a in near.into_iter().take(SEGMENT_ANCHORS) {
            if let Some(b) = self.first_crossing(x, a) {
                cands.push(b);
            }
        }
        let descent = damped_newton(
            self.field,
            x,
            NewtonOptions {
                max_iter: 100,
                ball: None,
                stop_below: Some(self.level),
            },
        );
        if self.is_feasible(&descent.x) {
            if let Some(b) = self.first_crossing(x, &descent.x) {
                cands.push(b);
            }
        }

        let best0 = cands
            .iter()
            .map(|c| dist(c, x))
            .fold(f64::INFINITY, f64::min);
        if !(best0 <= self.ray_floor) {
            let reach = if best0.is_finite() { best0 } else { self.cap + norm(x) };
            cands.extend(self.march_rays(x, reach));
        }

        if cands.is_empty() {
            return SublevelDistanceResult {
                distance: f64::INFINITY,
                witness: None,
                status: DistanceStatus::Infeasible,
            };
        }
        cands.sort_by(|a, b| dist(a, x).total_cmp(&dist(b, x)));
        let mut picked: Vec<Vec<f64>> = Vec::new();
        for c in cands {
            let d = dist(&c, x);
            if picked
                .iter()
                .all(|p| dist(p, &c) > 1e-3 * d.max(1e-12))
            {
                picked.push(c);
            }
            if picked.len() == POLISHED {
                break;
            }
        }
        let best = picked
            .into_iter()
            .map(|c| self.polish(x, c))
            .min_by(|a, b| dist(a, x).total_cmp(&dist(b, x)))
            .expect("at least one candidate");
        SublevelDistanceResult {
            distance: dist(&best, x),
            witness: Some(best),
            status: DistanceStatus::Estimated,
        }
    }

    /// First feasible point on the segment from `x` (infeasible) to `a`
    /// (feasible), located by sampling and bisection.
    fn first_crossing(&self, x: &[f64], a: &[f64]) -> Option<Vec<f64>> {
        let at = |s: f64| -> Vec<f64> { x.iter().zip(a).map(|(p, q)| p + s * (q - p)).collect() };
        let mut prev = 0.0;
        for j in 1..=SEGMENT_SAMPLES {
            let s = j as f64 / SEGMENT_SAMPLES as f64;
            if self.is_feasible(&at(s)) {
                return Some(at(self.bisect(&at, prev, s)));
            }
            prev = s;
        }
        None
    }

    /// Shrinks `[lo, hi]` (infeasible, feasible) and returns the feasible end.
    fn bisect(&self, at: &dyn Fn(f64) -> Vec<f64>, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.is_feasible(&at(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1e-300) {
                break;
            }
        }
        hi
    }

    fn march_rays(&self, x: &[f64], reach: f64) -> Vec<Vec<f64>> {
        let step = reach / self.ray_steps as f64;
        let hits: Vec<Option<(f64, Vec<f64>)>> = self
            .directions
            .par_iter()
            .map(|u| {
                let at = |r: f64| -> Vec<f64> { x.iter().zip(u).map(|(p, d)| p + r * d).collect() };
                let mut prev = 0.0;
                for j in 1..=self.ray_steps {
                    let r = j as f64 * step;
                    if self.is_feasible(&at(r)) {
                        let r = self.bisect(&at, prev, r);
                        return Some((r, at(r)));
                    }
                    prev = r;
                }
                None
            })
            .collect();
        let mut hits: Vec<(f64, Vec<f64>)> = hits.into_iter().flatten().collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        hits.into_iter().take(2 * POLISHED).map(|h| h.1).collect()
    }

    /// Pulls an infeasible point back onto the sublevel set along the gradient.
    fn project(&self, y: &[f64]) -> Option<Vec<f64>> {
        let mut y = y.to_vec();
        for _ in 0..40 {
            let excess = self.field.value(&y) - self.level;
            if excess <= self.slack {
                return Some(y);
            }
            let g = self.field.gradient(&y);
            let gg = dot(&g, &g);
            if gg == 0.0 || !gg.is_finite() {
                return None;
            }
            // aim slightly inside so the final iterate is feasible
            let target = excess + 0.5 * self.slack;
            for (v, gi) in y.iter_mut().zip(&g) {
                *v -= target / gg * gi;
            }
        }
        self.is_feasible(&y).then_some(y)
    }

    /// Walks a feasible point along the level set towards `x` while the
    /// distance decreases.
    fn polish(&self, x: &[f64], mut y: Vec<f64>) -> Vec<f64> {
        let mut d = dist(x, &y);
        let mut s = 0.5;
        for _ in 0..self.polish_iters {
            let v: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let g = self.field.gradient(&y);
            let gn = norm(&g);
            let mut tangent = v.clone();
            if gn > 0.0 && gn.is_finite() {
                let c = dot(&v, &g) / (gn * gn);
                for (t, gi) in tangent.iter_mut().zip(&g) {
                    *t -= c * gi;
                }
            }
            if norm(&tangent) <= 1e-13 * (1.0 + norm(&v)) {
                break;
            }
            let mut improved = false;
            // a tangential step, and a straight step that only helps when `y`
            // is interior
            for dir in [&tangent, &v] {
                let trial: Vec<f64> = y.iter().zip(dir.iter()).map(|(a, b)| a + s * b).collect();
                if let Some(p) = self.project(&trial) {
                    let dp = dist(x, &p);
                    if dp < d * (1.0 - 1e-15) {
                        y = p;
                        d = dp;
                        improved = true;
                        break;
                    }
                }
            }
            if improved {
                s = (2.0 * s).min(1.0);
            } else {
                s *= 0.5;
                if s < 1e-9 {
                    break;
                }
            }
        }
        y
    }
}

/// Nearly uniform unit directions.
pub fn directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut g = rng::stream(0, rng::tags::DISTANCE, u64::MAX);
            (0..count).map(|_| rng::sphere_point(&mut g, n, 1.0)).collect()
        }
    }
}

/// One-shot distance query.
pub fn sublevel_distance(
    p: &Polynomial,
    t: f64,
    x: &[f64],
    cfg: &ToleranceConfig,
) -> Result<SublevelDistanceResult> {
    if x.len() != p.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: p.num_vars(),
            got: x.len(),
        });
    }
    let field = PolyField::new(p);
    let oracle = SublevelOracle::new(&field, t, cfg);
    let r = oracle.distance(x);
    if r.status == DistanceStatus::Infeasible {
        return Err(Error::InfeasibleLevel {
            level: t,
            inf: f64::NAN,
        });
    }
    Ok(r)
}
