//! The end-to-end pipeline: Newton shortcut, star form, spectra, threshold
//! and `H(f)`, plus classification of requested levels.

use serde::{Deserialize, Serialize};

use super::assemble::{assemble_in, Assembly};
use super::hset::{classify_t, component_count_check, HSet, StabilityLabel};
use super::threshold::ThresholdEstimate;
use crate::asymptotics::AsymptoticContext;
use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::newton::{fast_path_h, newton_summary, NewtonSummary};
use crate::poly::{infimum_estimate, to_star_form, ChangeSummary, InfimumEstimate, Polynomial, StarForm};
use crate::spectrum::{check_containment, fedoryuk_estimate, p_of_atlas, FedoryukEstimate, PEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: f64,
    pub snapped_to: Option<f64>,
    pub label: Option<StabilityLabel>,
    /// Set when the label rests on estimated pieces.
    pub estimated: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    /// Detected first-type levels all lie near Fedoryuk values.
    pub containment: bool,
    /// A finite nonempty Fedoryuk estimate comes with a nonempty `H(f)`.
    pub nonempty_h: Option<bool>,
    /// Component count within `(d - 1)^(n - 1) + 1`; skipped for interval-like
    /// Fedoryuk sets.
    pub component_bound: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub input: Polynomial,
    pub newton: NewtonSummary,
    pub star: StarForm,
    pub infimum: InfimumEstimate,
    pub fedoryuk: FedoryukEstimate,
    /// Absent on the fast path.
    pub p_estimate: Option<PEstimate>,
    pub threshold: ThresholdEstimate,
    pub h: HSet,
    /// Evidence behind `h`; absent on the fast path.
    pub assembly: Option<Assembly>,
    pub levels: Vec<LevelReport>,
    pub checks: Checks,
}

impl Analysis {
    pub fn change(&self) -> ChangeSummary {
        ChangeSummary::from(&self.star)
    }

    pub fn first_type_levels(&self) -> Vec<f64> {
        self.assembly.as_ref().map(Assembly::first_type_levels).unwrap_or_default()
    }

    /// Whether every piece of the result rests on inconclusive evidence.
    pub fn is_inconclusive(&self) -> bool {
        self.threshold.estimated || (!self.h.pieces.is_empty() && self.h.pieces.iter().all(|p| p.estimated))
    }
}

/// Fast path or full assembly, without level classification.
#[allow(non_snake_case)]
pub fn assemble_H(p: &Polynomial, cfg: &ToleranceConfig) -> Result<HSet> {
    Ok(analyze(p, cfg, &[])?.h)
}

pub fn classify_levels(h: &HSet, levels: &[f64], cfg: &ToleranceConfig) -> Vec<LevelReport> {
    levels
        .iter()
        .map(|&t| match classify_t(h, t, cfg.level_tol) {
            Ok(c) => {
                let s = c.snapped_to;
                let estimated = h.pieces.iter().any(|p| {
                    p.estimated && (p.contains(s) || (p.lo - s).abs() <= cfg.level_tol || (p.hi - s).abs() <= cfg.level_tol)
                });
                LevelReport {
                    level: t,
                    snapped_to: Some(s),
                    label: Some(c.label),
                    estimated,
                    error: None,
                }
            }
            Err(e) => LevelReport {
                level: t,
                snapped_to: None,
                label: None,
                estimated: false,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

pub fn analyze(p: &Polynomial, cfg: &ToleranceConfig, levels: &[f64]) -> Result<Analysis> {
    cfg.validate()?;
    if p.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let newton = newton_summary(p, cfg);
    let infimum = infimum_estimate(p, cfg);
    let star = to_star_form(p, cfg.seed)?;
    let fedoryuk = fedoryuk_estimate(p, cfg);

    let (h, threshold, assembly, p_est) = match fast_path_h(&newton, &infimum) {
        Some(h) => {
            let threshold = ThresholdEstimate {
                value: infimum.value,
                raw: infimum.value,
                snapped: false,
                estimated: false,
                evaluations: Vec::new(),
            };
            (h, threshold, None, None)
        }
        None => {
            let ctx = AsymptoticContext::new(&star, infimum.clone(), cfg);
            let p_est = p_of_atlas(&ctx.atlas, cfg);
            let a = assemble_in(&ctx, &p_est.values(), &fedoryuk)?;
            (a.h.clone(), a.threshold.clone(), Some(a), Some(p_est))
        }
    };

    let first_levels = assembly.as_ref().map(Assembly::first_type_levels).unwrap_or_default();
    let finite = fedoryuk.is_finite();
    let checks = Checks {
        containment: check_containment(&first_levels, &fedoryuk, cfg.cluster_tol),
        nonempty_h: (finite && !fedoryuk.clusters.is_empty()).then(|| !h.is_empty()),
        component_bound: finite.then(|| component_count_check(&h, p.degree(), p.num_vars())),
    };
    let levels = classify_levels(&h, levels, cfg);
    Ok(Analysis {
        input: p.clone(),
        newton,
        star,
        infimum,
        fedoryuk,
        p_estimate: p_est,
        threshold,
        h,
        assembly,
        levels,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use StabilityLabel::*;

    fn run(text: &str, levels: &[f64]) -> Analysis {
        analyze(&parse(text).unwrap(), &ToleranceConfig::default(), levels).unwrap()
    }

    #[test]
    fn worked_example_end_to_end() {
        let a = run("(y^2-1)^2 + (x*y-1)^2", &[0.0, 0.5, 1.0, 2.0]);
        assert!((a.threshold.value - 1.0).abs() <= 0.05);
        assert_eq!(a.h.pieces.len(), 1, "{:?}", a.h);
        let p = &a.h.pieces[0];
        assert!((p.lo - 1.0).abs() <= 0.05 && p.lo_closed && p.hi == f64::INFINITY);
        assert!(a.h.excluded.is_empty());
        let labels: Vec<_> = a.levels.iter().map(|l| l.label.unwrap()).collect();
        assert_eq!(labels, vec![NRightStable, NStable, YRightStable, YStable]);
        assert_eq!(a.checks.component_bound, Some(true));
    }

    #[test]
    fn fast_path_and_line() {
        let a = run("x^2 + y^2", &[0.0, -5.0]);
        assert_eq!(a.h.source, super::super::HSource::FastPath);
        assert_eq!(a.levels[0].label, Some(YRightStable));
        assert!(a.levels[1].error.is_some());
        let b = run("x", &[3.0]);
        assert_eq!(b.h.pieces.len(), 1);
        assert_eq!(b.h.pieces[0].lo, f64::NEG_INFINITY);
        assert_eq!(b.levels[0].label, Some(YStable));
    }
}
