//! Detectors for first- and second-type sequences inside `V1`.
//!
//! A second-type sequence runs to infinity with bounded values above `t`
//! while its distance to `[f <= t]` diverges; the detector fits the growth
//! of that distance against the radius. A first-type sequence has values
//! tending to `t` from above while staying a fixed distance away from the
//! sublevel set; the detector looks for such samples in a value window that
//! shrinks with the radius.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distance::{DistanceStatus, SublevelOracle};
use super::v1::{v1_atlas, V1Atlas, V1Sample};
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::optim::{damped_newton, Ball, NewtonOptions};
use crate::poly::{ComposedField, InfimumEstimate, StarForm};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Present,
    Absent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSample {
    pub point: Vec<f64>,
    pub radius: f64,
    pub value: f64,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypedSequenceEvidence {
    pub kind: SequenceKind,
    pub level: f64,
    pub samples: Vec<EvidenceSample>,
    /// Log-log slope of distance against radius (second type) or the
    /// smallest distance over the last radii (first type).
    pub fit: Option<f64>,
    pub verdict: Verdict,
}

/// Distances evaluated per radius; more samples than this are thinned
/// evenly in value.
const MAX_PER_RADIUS: usize = 12;
/// Radii that must carry first-type samples.
const FIRST_TYPE_RADII: usize = 3;

/// A star form together with its numerical view, its `V1` atlas and the
/// infimum estimate. Detectors at many levels share one context.
pub struct AsymptoticContext<'a> {
    pub star: &'a StarForm,
    pub field: ComposedField,
    pub atlas: V1Atlas,
    pub inf: InfimumEstimate,
    pub cfg: &'a ToleranceConfig,
    /// Upper end shared by the second-type value windows of all levels
    /// below it, so that lowering the level only enlarges the window.
    pub ceiling: f64,
}

impl<'a> AsymptoticContext<'a> {
    pub fn new(star: &'a StarForm, inf: InfimumEstimate, cfg: &'a ToleranceConfig) -> Self {
        let field = star.field();
        let atlas = v1_atlas(&field, cfg);
        let base = if inf.value.is_finite() { inf.value } else { 0.0 };
        let top = crate::spectrum::p_of_atlas(&atlas, cfg)
            .values()
            .into_iter()
            .fold(base, f64::max);
        AsymptoticContext {
            star,
            field,
            atlas,
            inf,
            cfg,
            ceiling: top + cfg.m_offset,
        }
    }

    pub fn check_level(&self, t: f64) -> Result<()> {
        if self.inf.admits(t, self.cfg.level_tol) {
            Ok(())
        } else {
            Err(Error::InfeasibleLevel {
                level: t,
                inf: self.inf.value,
            })
        }
    }

    /// Oracle for the detectors: distances far below `delta` never change
    /// a verdict, so the ray search is skipped for them.
    pub fn oracle(&self, t: f64) -> SublevelOracle<'_> {
        SublevelOracle::new(&self.field, t, self.cfg).with_ray_floor(0.1 * self.cfg.delta)
    }

    /// Oracle with the full search, for curves and certificates.
    pub fn exact_oracle(&self, t: f64) -> SublevelOracle<'_> {
        SublevelOracle::new(&self.field, t, self.cfg)
    }

    fn distances(&self, oracle: &SublevelOracle, picks: &[&V1Sample]) -> Vec<EvidenceSample> {
        picks
            .par_iter()
            .map(|s| {
                let r = oracle.distance(&s.point);
                EvidenceSample {
                    point: s.point.clone(),
                    radius: s.radius,
                    value: s.value,
                    distance: match r.status {
                        DistanceStatus::Infeasible => f64::INFINITY,
                        _ => r.distance,
                    },
                }
            })
            .collect()
    }

    pub fn detect_second_type(&self, t: f64) -> Result<TypedSequenceEvidence> {
        self.check_level(t)?;
        let oracle = self.oracle(t);
        let m = (t + self.cfg.m_offset).max(self.ceiling);
        let mut samples = Vec::new();
        let mut per_radius: Vec<Option<f64>> = Vec::new();
        for group in &self.atlas.samples {
            let window: Vec<&V1Sample> = group.iter().filter(|s| s.value > t && s.value <= m).collect();
            let ev = self.distances(&oracle, &thin(window));
            per_radius.push(ev.iter().map(|e| e.distance).reduce(f64::max));
            samples.extend(ev);
        }
        let k = per_radius.len();
        let tail: Vec<(f64, f64)> = (k / 2..k)
            .filter_map(|i| per_radius[i].map(|d| (self.atlas.radii[i], d)))
            .collect();
        let (fit, verdict) = if tail.is_empty() {
            (None, Verdict::Absent)
        } else if tail.iter().any(|(_, d)| !d.is_finite()) {
            (None, Verdict::Inconclusive)
        } else if tail.iter().all(|(_, d)| *d < self.cfg.delta) {
            // distances that never leave the delta scale are bounded
            (None, Verdict::Absent)
        } else if tail.len() == 1 {
            (None, Verdict::Inconclusive)
        } else {
            let pts: Vec<(f64, f64)> = tail
                .iter()
                .map(|(r, d)| (r.ln(), d.max(1e-300).ln()))
                .collect();
            let slope = fit_slope(&pts).0;
            let max = tail.iter().map(|p| p.1).fold(0.0, f64::max);
            let v = if slope >= self.cfg.slope_present {
                Verdict::Present
            } else if slope <= self.cfg.slope_absent && max <= self.cfg.max_radius() {
                Verdict::Absent
            } else {
                Verdict::Inconclusive
            };
            (Some(slope), v)
        };
        Ok(TypedSequenceEvidence {
            kind: SequenceKind::Second,
            level: t,
            samples,
            fit,
            verdict,
        })
    }

    pub fn detect_first_type(&self, t: f64) -> Result<TypedSequenceEvidence> {
        self.check_level(t)?;
        let oracle = self.oracle(t);
        let mut samples = Vec::new();
        let mut per_radius: Vec<Option<(f64, Vec<f64>)>> = Vec::new();
        for (k, group) in self.atlas.samples.iter().enumerate() {
            let w = self.cfg.first_window / self.cfg.radius_growth.powi(k as i32);
            let window: Vec<&V1Sample> = group
                .iter()
                .filter(|s| s.value > t && s.value <= t + w)
                .collect();
            let ev = self.distances(&oracle, &thin(window));
            per_radius.push(
                ev.iter()
                    .max_by(|a, b| a.distance.total_cmp(&b.distance))
                    .map(|e| (e.distance, e.point.clone())),
            );
            samples.extend(ev);
        }
        let k = per_radius.len();
        let last = &per_radius[k - FIRST_TYPE_RADII..];
        let delta = self.cfg.delta;
        let (fit, verdict) = match &per_radius[k - 1] {
            None => (None, Verdict::Absent),
            Some(_) if last.iter().all(|p| p.as_ref().is_some_and(|(d, _)| *d >= delta)) => {
                let floor = last
                    .iter()
                    .flatten()
                    .map(|(d, _)| *d)
                    .fold(f64::INFINITY, f64::min);
                let (_, x) = per_radius[k - 1].as_ref().expect("checked above");
                if self.clear_ball(&oracle, x, delta) {
                    (Some(floor), Verdict::Present)
                } else {
                    (Some(floor), Verdict::Inconclusive)
                }
            }
            Some((d, _)) if *d < delta => {
                let prev = per_radius[k - 2].as_ref().map(|p| p.0);
                let shrinking = prev.is_none_or(|p| *d <= p);
                (Some(*d), if shrinking { Verdict::Absent } else { Verdict::Inconclusive })
            }
            Some((d, _)) => (Some(*d), Verdict::Inconclusive),
        };
        Ok(TypedSequenceEvidence {
            kind: SequenceKind::First,
            level: t,
            samples,
            fit,
            verdict,
        })
    }

    /// Independent check that the ball `B(x, r)` misses `[f <= t]`: a dense
    /// seeded cloud plus a descent confined to the ball.
    fn clear_ball(&self, oracle: &SublevelOracle, x: &[f64], r: f64) -> bool {
        let n = x.len();
        let mut g = rng::stream(self.cfg.seed, rng::tags::CLOUD, 7_777);
        let cloud_hit = (0..2000).any(|_| {
            let p: Vec<f64> = rng::ball_point(&mut g, n, r)
                .iter()
                .zip(x)
                .map(|(a, b)| a + b)
                .collect();
            oracle.is_feasible(&p)
        });
        if cloud_hit {
            return false;
        }
        let m = damped_newton(
            &self.field,
            x,
            NewtonOptions {
                max_iter: 200,
                ball: Some(Ball {
                    center: x.to_vec(),
                    radius: r,
                }),
                stop_below: Some(oracle.level()),
            },
        );
        !oracle.is_feasible(&m.x)
    }
}

/// Keeps at most [`MAX_PER_RADIUS`] samples, spread evenly in value.
fn thin(mut v: Vec<&V1Sample>) -> Vec<&V1Sample> {
    if v.len() <= MAX_PER_RADIUS {
        return v;
    }
    v.sort_by(|a, b| a.value.total_cmp(&b.value));
    let n = v.len();
    (0..MAX_PER_RADIUS)
        .map(|i| v[i * (n - 1) / (MAX_PER_RADIUS - 1)])
        .collect()
}

/// Least-squares slope and RMS residual of `y` against `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

pub fn detect_second_type(
    star: &StarForm,
    t: f64,
    inf: &InfimumEstimate,
    cfg: &ToleranceConfig,
) -> Result<TypedSequenceEvidence> {
    AsymptoticContext::new(star, inf.clone(), cfg).detect_second_type(t)
}

pub fn detect_first_type(
    star: &StarForm,
    t: f64,
    inf: &InfimumEstimate,
    cfg: &ToleranceConfig,
) -> Result<TypedSequenceEvidence> {
    AsymptoticContext::new(star, inf.clone(), cfg).detect_first_type(t)
}

/// Infimum of the star form, computed in its own coordinates.
pub fn star_infimum(star: &StarForm, cfg: &ToleranceConfig) -> InfimumEstimate {
    crate::poly::infimum::infimum_of_field(&star.field(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, to_star_form};

    fn ctx_for(text: &str) -> (StarForm, ToleranceConfig) {
        (to_star_form(&parse(text).unwrap(), 0).unwrap(), ToleranceConfig::default())
    }

    #[test]
    fn worked_example_second_type() {
        let (s, cfg) = ctx_for("(y^2-1)^2 + (x*y-1)^2");
        let ctx = AsymptoticContext::new(&s, star_infimum(&s, &cfg), &cfg);
        let e = ctx.detect_second_type(0.5).unwrap();
        assert_eq!(e.verdict, Verdict::Present, "{:?}", e.fit);
        assert!(e.fit.unwrap() > 0.9);
        assert_eq!(ctx.detect_second_type(2.0).unwrap().verdict, Verdict::Absent);
        assert_eq!(ctx.detect_second_type(1.0).unwrap().verdict, Verdict::Absent);
        assert_eq!(ctx.detect_first_type(1.0).unwrap().verdict, Verdict::Absent);
        assert!(matches!(
            ctx.detect_second_type(-0.5),
            Err(Error::InfeasibleLevel { .. })
        ));
    }

    #[test]
    fn sum_of_squares_has_neither_type() {
        let (s, cfg) = ctx_for("x^2 + y^2");
        let ctx = AsymptoticContext::new(&s, star_infimum(&s, &cfg), &cfg);
        for t in [0.0, 1.0, 50.0] {
            assert_eq!(ctx.detect_second_type(t).unwrap().verdict, Verdict::Absent);
        }
        assert_eq!(ctx.detect_first_type(0.0).unwrap().verdict, Verdict::Absent);
    }

    #[test]
    fn linear_has_empty_v1() {
        let (s, cfg) = ctx_for("x");
        let ctx = AsymptoticContext::new(&s, star_infimum(&s, &cfg), &cfg);
        for t in [-3.0, 0.0, 4.0] {
            assert_eq!(ctx.detect_first_type(t).unwrap().verdict, Verdict::Absent);
            assert_eq!(ctx.detect_second_type(t).unwrap().verdict, Verdict::Absent);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let (s, r) = fit_slope(&pts);
        assert!((s - 2.0).abs() < 1e-12 && r < 1e-12);
    }
}
