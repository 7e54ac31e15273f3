//! Numerical policy shared by every stage of the analysis.
//!
//! The asymptotic notions the library works with (limits along unbounded
//! sequences, growth of distances) only become decidable once radii,
//! tolerances and sample counts are fixed. All of those knobs live here so a
//! report can embed them and a rerun can reproduce it exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Smallest radius `R0` of the schedule `R_k = R0 * growth^k`.
    pub radius0: f64,
    pub radius_growth: f64,
    /// Number `K` of radii in the schedule.
    pub radius_steps: usize,

    /// Residual bound for gradient and `df/dx_n` witnesses.
    pub grad_tol: f64,
    /// Separation used to merge limit values into clusters.
    pub cluster_tol: f64,
    /// Width `M - t` of the value window for second-type samples. The window
    /// is widened to a ceiling shared by all lower levels.
    pub m_offset: f64,
    /// Distance floor for first-type sequences.
    pub delta: f64,
    /// Initial width of the shrinking `f -> t+` window for first-type samples.
    pub first_window: f64,

    /// Ray directions used by the distance oracle (0 picks a default per dimension).
    pub distance_rays: usize,
    /// Radial samples along each ray.
    pub distance_ray_steps: usize,
    /// Seeded descent starts used to place feasible anchors.
    pub distance_anchor_starts: usize,
    pub distance_polish_iters: usize,

    /// Decrease of the ball minimum per radius doubling that signals `inf f = -inf`.
    pub unbounded_slope: f64,
    /// Starts per radius for the infimum search.
    pub infimum_starts: usize,

    pub nondegen_tol: f64,
    /// Box `[torus_lo, torus_hi]` for `|x_i|` in the face searches.
    pub torus_lo: f64,
    pub torus_hi: f64,
    pub nondegen_starts: usize,

    /// Sphere starts per radius when sampling `df/dx_n = 0`.
    pub v1_starts: usize,
    /// Sphere starts per radius for gradient-norm minimization.
    pub fedoryuk_starts: usize,

    /// Log-log slope at or above which distances count as diverging.
    pub slope_present: f64,
    /// Log-log slope at or below which distances count as bounded.
    pub slope_absent: f64,

    /// Bisection stops once the bracket is this narrow.
    pub threshold_resolution: f64,
    /// Width of the level bracket above `inf f` searched for the threshold.
    pub bracket_cap: f64,
    /// Levels within this distance of an endpoint are read as the endpoint.
    pub level_tol: f64,
    /// Grid size of the level scan used when limit values fill an interval.
    pub level_grid: usize,

    /// Relative half-width of the residual bins of the psi curve.
    pub psi_bin_halfwidth: f64,
    pub psi_tau_min: f64,
    pub psi_tau_max: f64,
    pub psi_bins_per_decade: usize,
    /// Seeded starts per residual target when sampling psi.
    pub psi_starts: usize,

    /// Points per shell of the certificate cloud.
    pub cloud_points_per_shell: usize,
    pub cloud_shells: usize,
    /// Smallest constant accepted as a certificate.
    pub certificate_floor: f64,

    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            radius0: 10.0,
            radius_growth: 2.0,
            radius_steps: 10,
            grad_tol: 1e-3,
            cluster_tol: 0.05,
            m_offset: 10.0,
            delta: 0.1,
            first_window: 1.0,
            distance_rays: 0,
            distance_ray_steps: 256,
            distance_anchor_starts: 24,
            distance_polish_iters: 200,
            unbounded_slope: 0.05,
            infimum_starts: 24,
            nondegen_tol: 1e-9,
            torus_lo: 1e-3,
            torus_hi: 1e3,
            nondegen_starts: 6,
            v1_starts: 48,
            fedoryuk_starts: 32,
            slope_present: 0.25,
            slope_absent: 0.05,
            threshold_resolution: 1e-3,
            bracket_cap: 20.0,
            level_tol: 1e-4,
            level_grid: 201,
            psi_bin_halfwidth: 0.2,
            psi_tau_min: 1e-6,
            psi_tau_max: 1e6,
            psi_bins_per_decade: 4,
            psi_starts: 12,
            cloud_points_per_shell: 24,
            cloud_shells: 14,
            certificate_floor: 1e-8,
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius0", self.radius0),
            ("grad_tol", self.grad_tol),
            ("cluster_tol", self.cluster_tol),
            ("m_offset", self.m_offset),
            ("delta", self.delta),
            ("first_window", self.first_window),
            ("unbounded_slope", self.unbounded_slope),
            ("nondegen_tol", self.nondegen_tol),
            ("torus_lo", self.torus_lo),
            ("threshold_resolution", self.threshold_resolution),
            ("bracket_cap", self.bracket_cap),
            ("level_tol", self.level_tol),
            ("psi_bin_halfwidth", self.psi_bin_halfwidth),
            ("psi_tau_min", self.psi_tau_min),
            ("certificate_floor", self.certificate_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.radius_growth > 1.0 && self.radius_growth.is_finite()) {
            return Err(Error::Config(format!(
                "radius_growth must exceed 1, got {}",
                self.radius_growth
            )));
        }
        if self.radius_steps < 4 {
            return Err(Error::Config(format!(
                "radius_steps must be at least 4, got {}",
                self.radius_steps
            )));
        }
        if self.torus_hi <= self.torus_lo {
            return Err(Error::Config("torus_hi must exceed torus_lo".into()));
        }
        if self.psi_tau_max <= self.psi_tau_min {
            return Err(Error::Config("psi_tau_max must exceed psi_tau_min".into()));
        }
        if self.slope_absent >= self.slope_present {
            return Err(Error::Config(
                "slope_absent must be below slope_present".into(),
            ));
        }
        let counts = [
            ("distance_ray_steps", self.distance_ray_steps),
            ("v1_starts", self.v1_starts),
            ("fedoryuk_starts", self.fedoryuk_starts),
            ("infimum_starts", self.infimum_starts),
            ("nondegen_starts", self.nondegen_starts),
            ("psi_bins_per_decade", self.psi_bins_per_decade),
            ("level_grid", self.level_grid),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be nonzero")));
            }
        }
        Ok(())
    }

    /// `R_k` for `k = 0..K`.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.radius_steps)
            .map(|k| self.radius0 * self.radius_growth.powi(k as i32))
            .collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.radius0 * self.radius_growth.powi(self.radius_steps as i32 - 1)
    }

    /// Tolerance for deciding `f(y) <= t` numerically.
    pub fn level_slack(&self, t: f64) -> f64 {
        1e-10 * (1.0 + t.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ToleranceConfig::default().validate().unwrap();
        assert_eq!(ToleranceConfig::default().radii().len(), 10);
        assert_eq!(ToleranceConfig::default().max_radius(), 5120.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = ToleranceConfig::default();
        c.radius_growth = 1.0;
        assert!(c.validate().is_err());
        let mut c = ToleranceConfig::default();
        c.radius_steps = 3;
        assert!(c.validate().is_err());
        let mut c = ToleranceConfig::default();
        c.grad_tol = -1.0;
        assert!(c.validate().is_err());
    }
}
