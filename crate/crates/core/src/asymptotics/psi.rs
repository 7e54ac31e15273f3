//! The curve `psi(tau)`: the largest distance to `[f <= t]` over points of
//! `V1` whose residual `[f - t]_+` equals `tau`.
//!
//! The curve is sampled on a log grid. Each grid value collects the `V1`
//! samples whose residual falls in a relative bin around it; empty bins are
//! gaps. Growth exponents are fitted at both ends of the occupied range.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detect::{fit_slope, AsymptoticContext};
use super::distance::{DistanceStatus, SublevelOracle};
use super::v1::{v1_at_level, V1Sample};
use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::poly::StarForm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiBin {
    pub tau: f64,
    /// Largest sampled distance in the bin, 0 for a gap.
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub psi: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub bins_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiCurve {
    pub level: f64,
    pub grid: Vec<PsiBin>,
    /// Exponent at small `tau`, absent when fewer than two bins qualify.
    pub alpha_tilde: Option<ExponentFit>,
    /// Exponent at large `tau`.
    pub beta_tilde: Option<ExponentFit>,
    /// The `V1` samples with positive distance, kept for certificate clouds.
    #[serde(skip)]
    pub samples: Vec<(Vec<f64>, f64, f64)>,
}

/// Decades on each end of the occupied range used by the exponent fits.
const FIT_DECADES: f64 = 3.0;
/// Start scales for the level-restricted `V1` search.
const LEVEL_SCALES: [f64; 4] = [0.5, 2.0, 8.0, 32.0];

impl PsiCurve {
    pub fn is_empty(&self) -> bool {
        self.grid.iter().all(|b| b.n_samples == 0)
    }

    /// CSV with columns `tau,psi,n_samples`; fitted exponents go in `#`
    /// comment lines at the top.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let fmt_fit = |f: &Option<ExponentFit>| match f {
            Some(f) => format!("{} (residual {}, bins {})", f.exponent, f.residual, f.bins_used),
            None => "none".to_string(),
        };
        let _ = writeln!(out, "# level: {}", self.level);
        let _ = writeln!(out, "# alpha_tilde: {}", fmt_fit(&self.alpha_tilde));
        let _ = writeln!(out, "# beta_tilde: {}", fmt_fit(&self.beta_tilde));
        if self.is_empty() {
            let _ = writeln!(out, "# no V1 samples above the level; psi is identically 0");
        }
        out.push_str("tau,psi,n_samples\n");
        for b in &self.grid {
            let _ = writeln!(out, "{},{},{}", b.tau, b.psi, b.n_samples);
        }
        out
    }
}

/// The log grid of `tau` values.
pub fn tau_grid(cfg: &ToleranceConfig) -> Vec<f64> {
    let lo = cfg.psi_tau_min.log10();
    let hi = cfg.psi_tau_max.log10();
    let steps = ((hi - lo) * cfg.psi_bins_per_decade as f64).round() as usize;
    (0..=steps)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / steps as f64))
        .collect()
}

impl AsymptoticContext<'_> {
    pub fn psi_curve(&self, t: f64) -> Result<PsiCurve> {
        self.check_level(t)?;
        let cfg = self.cfg;
        let grid = tau_grid(cfg);
        let mut samples: Vec<V1Sample> = self.atlas.all().filter(|s| s.value > t).cloned().collect();
        let per_scale = cfg.psi_starts.div_ceil(LEVEL_SCALES.len()).max(1);
        let extra: Vec<Vec<V1Sample>> = grid
            .par_iter()
            .enumerate()
            .map(|(k, &tau)| v1_at_level(&self.field, t + tau, &LEVEL_SCALES, per_scale, cfg, 10_000 + k as u64))
            .collect();
        samples.extend(extra.into_iter().flatten());

        let oracle = self.exact_oracle(t);
        let h = cfg.psi_bin_halfwidth;
        let lo_edge = grid[0] * (1.0 - h);
        let hi_edge = grid[grid.len() - 1] * (1.0 + h);
        let in_range: Vec<&V1Sample> = samples
            .iter()
            .filter(|s| {
                let tau = s.value - t;
                tau >= lo_edge && tau <= hi_edge
            })
            .collect();
        let measured: Vec<(Vec<f64>, f64, f64)> = in_range
            .par_iter()
            .map(|s| (s.point.clone(), s.value - t, distance_of(&oracle, &s.point)))
            .collect();

        let bins: Vec<PsiBin> = grid
            .iter()
            .map(|&tau| {
                let members: Vec<f64> = measured
                    .iter()
                    .filter(|m| m.1 >= tau * (1.0 - h) && m.1 <= tau * (1.0 + h))
                    .map(|m| m.2)
                    .collect();
                PsiBin {
                    tau,
                    psi: members.iter().copied().fold(0.0, f64::max),
                    n_samples: members.len(),
                }
            })
            .collect();

        let usable: Vec<(f64, f64)> = bins
            .iter()
            .filter(|b| b.n_samples > 0 && b.psi > 0.0 && b.psi.is_finite())
            .map(|b| (b.tau.log10(), b.psi.log10()))
            .collect();
        let (alpha_tilde, beta_tilde) = match (usable.first(), usable.last()) {
            (Some(&(first, _)), Some(&(last, _))) => {
                let low: Vec<_> = usable.iter().copied().filter(|p| p.0 <= first + FIT_DECADES).collect();
                let high: Vec<_> = usable.iter().copied().filter(|p| p.0 >= last - FIT_DECADES).collect();
                (exponent_fit(&low), exponent_fit(&high))
            }
            _ => (None, None),
        };
        Ok(PsiCurve {
            level: t,
            grid: bins,
            alpha_tilde,
            beta_tilde,
            samples: measured.into_iter().filter(|m| m.2 > 0.0 && m.2.is_finite()).collect(),
        })
    }
}

fn distance_of(oracle: &SublevelOracle, x: &[f64]) -> f64 {
    let r = oracle.distance(x);
    match r.status {
        DistanceStatus::Infeasible => f64::INFINITY,
        _ => r.distance,
    }
}

fn exponent_fit(pts: &[(f64, f64)]) -> Option<ExponentFit> {
    if pts.len() < 2 {
        return None;
    }
    let (exponent, residual) = fit_slope(pts);
    Some(ExponentFit {
        exponent,
        residual,
        bins_used: pts.len(),
    })
}

pub fn psi_curve(star: &StarForm, t: f64, cfg: &ToleranceConfig) -> Result<PsiCurve> {
    let inf = super::detect::star_infimum(star, cfg);
    AsymptoticContext::new(star, inf, cfg).psi_curve(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, to_star_form};

    fn curve(text: &str, t: f64) -> PsiCurve {
        let s = to_star_form(&parse(text).unwrap(), 0).unwrap();
        psi_curve(&s, t, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn grid_is_log_spaced() {
        let g = tau_grid(&ToleranceConfig::default());
        assert_eq!(g.len(), 49);
        assert!((g[0] - 1e-6).abs() < 1e-18 && (g[48] - 1e6).abs() < 1e-6);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn square_root_growth_for_sum_of_squares() {
        let c = curve("x^2 + y^2", 0.0);
        let a = c.alpha_tilde.as_ref().unwrap().exponent;
        let b = c.beta_tilde.as_ref().unwrap().exponent;
        assert!((a - 0.5).abs() < 0.05, "{a}");
        assert!((b - 0.5).abs() < 0.05, "{b}");
        assert!(c.grid.iter().all(|b| b.psi >= 0.0));
    }

    #[test]
    fn empty_polar_set_gives_gaps() {
        let c = curve("x", 0.0);
        assert!(c.is_empty());
        assert!(c.alpha_tilde.is_none() && c.beta_tilde.is_none());
        assert!(c.to_csv().contains("identically 0"));
    }
}
