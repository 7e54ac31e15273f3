//! The threshold `h(f)`: the supremum of levels that admit a second-type
//! sequence.
//!
//! Second-type levels are down-closed, so a bisection on the detector
//! verdict finds the supremum. The bracket is narrowed with a structural
//! fact: along a second-type sequence `f` stays bounded on `V1`, so its
//! values accumulate at a point of `P(f)` above the level, and no level at
//! or above `max P(f)` can be second type.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticContext, Verdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelVerdict {
    pub level: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub value: f64,
    /// Midpoint of the final bisection bracket, before snapping.
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub raw: f64,
    /// Whether `value` was moved onto a limit value or the infimum.
    pub snapped: bool,
    /// Set when an inconclusive verdict had to be treated as present.
    pub estimated: bool,
    pub evaluations: Vec<LevelVerdict>,
}

/// Search state shared by the bisection steps.
struct Search<'c, 'a> {
    ctx: &'c AsymptoticContext<'a>,
    evaluations: Vec<LevelVerdict>,
    estimated: bool,
}

impl Search<'_, '_> {
    /// Whether `t` is (conservatively) a second-type level. Levels with an
    /// empty sublevel set are reported as `None`.
    fn present(&mut self, t: f64) -> Result<Option<bool>> {
        let verdict = match self.ctx.detect_second_type(t) {
            Ok(e) => e.verdict,
            Err(Error::InfeasibleLevel { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        self.evaluations.push(LevelVerdict { level: t, verdict });
        if verdict == Verdict::Inconclusive {
            self.estimated = true;
        }
        Ok(Some(verdict != Verdict::Absent))
    }

    fn finish(self, value: f64, raw: f64, snapped: bool) -> ThresholdEstimate {
        ThresholdEstimate {
            value,
            raw,
            snapped,
            estimated: self.estimated,
            evaluations: self.evaluations,
        }
    }
}

/// Closest candidate to `raw` within `tol`, if any.
pub fn snap_to(raw: f64, candidates: &[f64], tol: f64) -> Option<f64> {
    candidates
        .iter()
        .copied()
        .filter(|c| c.is_finite() && (c - raw).abs() <= tol)
        .min_by(|a, b| (a - raw).abs().total_cmp(&(b - raw).abs()))
}

/// `h(f)` from second-type verdicts. `p_values` and `f_values` are the
/// estimated limit sets used for the bracket and for snapping.
pub fn threshold_with(
    ctx: &AsymptoticContext,
    p_values: &[f64],
    f_values: &[f64],
    unbounded_flag: bool,
) -> Result<ThresholdEstimate> {
    let cfg = ctx.cfg;
    let res = cfg.threshold_resolution;
    let inf = ctx.inf.value;
    let mut s = Search {
        ctx,
        evaluations: Vec::new(),
        estimated: false,
    };
    let top = p_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY && !unbounded_flag {
        // no bounded V1 branch, hence no second-type level above inf f
        return Ok(s.finish(inf, inf, false));
    }
    let anchor = if top.is_finite() { top } else { 0.0 };
    let (lo, cap_hi) = if inf.is_finite() {
        (inf + res, inf + cfg.bracket_cap)
    } else {
        (anchor - cfg.bracket_cap, anchor + cfg.bracket_cap)
    };
    match s.present(lo)? {
        Some(true) => {}
        // absent just above the infimum means absent everywhere above it
        _ => return Ok(s.finish(inf, inf, false)),
    }
    let mut hi = if unbounded_flag || !top.is_finite() {
        cap_hi
    } else {
        (top + res).min(cap_hi).max(lo)
    };
    if s.present(hi)? == Some(true) {
        let persists = if hi < cap_hi {
            // contradicts the bracket argument; fall back to the cap
            s.estimated = true;
            hi = cap_hi;
            s.present(hi)? == Some(true)
        } else {
            true
        };
        if persists {
            s.estimated |= !unbounded_flag;
            return Ok(s.finish(f64::INFINITY, f64::INFINITY, false));
        }
    }
    let mut a = lo;
    let mut b = hi;
    while b - a > res {
        let m = 0.5 * (a + b);
        if s.present(m)? == Some(true) {
            a = m;
        } else {
            b = m;
        }
    }
    let raw = 0.5 * (a + b);
    let mut candidates: Vec<f64> = p_values.iter().chain(f_values).copied().collect();
    if inf.is_finite() {
        candidates.push(inf);
    }
    Ok(match snap_to(raw, &candidates, cfg.cluster_tol) {
        Some(v) => s.finish(v, raw, true),
        None => s.finish(raw, raw, false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::star_infimum;
    use crate::config::ToleranceConfig;
    use crate::poly::{parse, to_star_form};
    use crate::spectrum::p_of_atlas;

    fn run(text: &str) -> ThresholdEstimate {
        let cfg = ToleranceConfig::default();
        let s = to_star_form(&parse(text).unwrap(), 0).unwrap();
        let ctx = AsymptoticContext::new(&s, star_infimum(&s, &cfg), &cfg);
        let p = p_of_atlas(&ctx.atlas, &cfg).values();
        threshold_with(&ctx, &p, &[], false).unwrap()
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_to(0.99, &[0.0, 1.0], 0.05), Some(1.0));
        assert_eq!(snap_to(0.9, &[0.0, 1.0], 0.05), None);
    }

    #[test]
    fn worked_example_threshold_is_one() {
        let h = run("(y^2-1)^2 + (x*y-1)^2");
        assert!((h.value - 1.0).abs() <= 0.05, "{h:?}");
        assert!((h.raw - 1.0).abs() <= 0.05);
    }

    #[test]
    fn infimum_when_no_second_type() {
        assert!(run("x^2 + y^2").value.abs() < 1e-9);
        assert_eq!(run("x").value, f64::NEG_INFINITY);
    }
}
