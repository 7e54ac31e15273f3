//! The level set `H(f)` as a finite union of intervals and points, and the
//! eight stability labels read off its structure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub lo: f64,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    /// Set when an endpoint or the piece itself rests on inconclusive verdicts.
    #[serde(default)]
    pub estimated: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
            estimated: false,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HSource {
    FastPath,
    FirstFormula,
    SecondFormula,
    /// Built from per-level verdicts on a grid.
    LevelScan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSet {
    pub pieces: Vec<Interval>,
    #[serde(with = "crate::serde_ext::ext_f64_vec")]
    pub points: Vec<f64>,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub threshold: f64,
    #[serde(with = "crate::serde_ext::ext_f64_vec")]
    pub excluded: Vec<f64>,
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub inf_f: f64,
    pub inf_attained: bool,
    pub source: HSource,
}

impl HSet {
    /// `H = (h, +inf)` or `[h, +inf)` with punctures removed.
    pub fn from_threshold(
        inf_f: f64,
        inf_attained: bool,
        threshold: f64,
        threshold_included: bool,
        punctures: &[f64],
        source: HSource,
    ) -> Self {
        let mut pieces = Vec::new();
        let mut excluded: Vec<f64> = punctures
            .iter()
            .copied()
            .filter(|&e| e > threshold && e.is_finite())
            .collect();
        excluded.sort_by(f64::total_cmp);
        excluded.dedup();
        if threshold < f64::INFINITY {
            let mut lo = threshold;
            let mut lo_closed = threshold_included && threshold.is_finite();
            for &e in &excluded {
                pieces.push(Interval::new(lo, e, lo_closed, false));
                lo = e;
                lo_closed = false;
            }
            pieces.push(Interval::new(lo, f64::INFINITY, lo_closed, false));
        }
        pieces.retain(|p| !p.is_empty());
        HSet {
            pieces,
            points: Vec::new(),
            threshold,
            excluded,
            inf_f,
            inf_attained,
            source,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(t)) || self.points.contains(&t)
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty() && self.points.is_empty()
    }

    /// Whether `[f <= t]` is nonempty, given the recorded infimum.
    pub fn admits(&self, t: f64) -> bool {
        if self.inf_f == f64::NEG_INFINITY {
            true
        } else if self.inf_attained {
            t >= self.inf_f
        } else {
            t > self.inf_f
        }
    }

    /// Every finite endpoint, point, puncture and the infimum.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.lo, p.hi])
            .chain(self.points.iter().copied())
            .chain(self.excluded.iter().copied())
            .chain([self.inf_f, self.threshold])
            .filter(|v| v.is_finite())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Number of connected components of `H`.
    pub fn component_count(&self) -> usize {
        let mut items: Vec<Interval> = self.pieces.clone();
        for &p in &self.points {
            items.push(Interval::new(p, p, true, true));
        }
        items.retain(|i| !i.is_empty());
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut count = 0;
        let mut reach: Option<(f64, bool)> = None;
        for it in items {
            let joined = match reach {
                Some((hi, closed)) => it.lo < hi || (it.lo == hi && (closed || it.lo_closed)),
                None => false,
            };
            if !joined {
                count += 1;
                reach = Some((it.hi, it.hi_closed));
            } else if let Some((hi, closed)) = reach {
                if it.hi > hi || (it.hi == hi && it.hi_closed) {
                    reach = Some((it.hi, it.hi_closed || (it.hi == hi && closed)));
                }
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityLabel {
    YStable,
    YRightStable,
    YLeftStable,
    YIsolated,
    NStable,
    NRightStable,
    NLeftStable,
    NIsolated,
}

impl StabilityLabel {
    pub const ALL: [StabilityLabel; 8] = [
        StabilityLabel::YStable,
        StabilityLabel::YRightStable,
        StabilityLabel::YLeftStable,
        StabilityLabel::YIsolated,
        StabilityLabel::NStable,
        StabilityLabel::NRightStable,
        StabilityLabel::NLeftStable,
        StabilityLabel::NIsolated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StabilityLabel::YStable => "y-stable",
            StabilityLabel::YRightStable => "y-right-stable",
            StabilityLabel::YLeftStable => "y-left-stable",
            StabilityLabel::YIsolated => "y-isolated",
            StabilityLabel::NStable => "n-stable",
            StabilityLabel::NRightStable => "n-right-stable",
            StabilityLabel::NLeftStable => "n-left-stable",
            StabilityLabel::NIsolated => "n-isolated",
        }
    }

    pub fn in_h(self) -> bool {
        matches!(
            self,
            StabilityLabel::YStable
                | StabilityLabel::YRightStable
                | StabilityLabel::YLeftStable
                | StabilityLabel::YIsolated
        )
    }
}

impl std::fmt::Display for StabilityLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where one side of a neighbourhood of `t` falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    InH,
    /// Admissible level outside `H`.
    OutOfH,
    /// Empty sublevel set.
    Inadmissible,
}

/// Result of a classification, including the level actually classified after
/// snapping to a nearby breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub level: f64,
    pub snapped_to: f64,
    pub label: StabilityLabel,
}

fn side(h: &HSet, t: f64) -> Side {
    if !h.admits(t) {
        Side::Inadmissible
    } else if h.contains(t) {
        Side::InH
    } else {
        Side::OutOfH
    }
}

/// Snaps `t` to the nearest breakpoint within `tol`.
pub fn snap(h: &HSet, t: f64, tol: f64) -> f64 {
    h.breakpoints()
        .into_iter()
        .filter(|b| (b - t).abs() <= tol)
        .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
        .unwrap_or(t)
}

/// The sides of `t`: membership of `t`, of `(t - e, t)` and of `(t, t + e)`
/// for all small `e > 0`.
pub fn sides(h: &HSet, t: f64) -> (Side, Side, Side) {
    let gap = h
        .breakpoints()
        .into_iter()
        .map(|b| (b - t).abs())
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let eta = if gap.is_finite() { gap / 2.0 } else { 1.0 }.min(1e-3 * (1.0 + t.abs()));
    (side(h, t), side(h, t - eta), side(h, t + eta))
}

/// Stability label of `t`, read from the piece structure.
///
/// Inadmissible neighbours (levels below `inf f`) count as "not in `H`" on
/// the `y` side and as "not in the complement" on the `n` side.
pub fn classify_t(h: &HSet, t: f64, tol: f64) -> Result<Classification> {
    let s = snap(h, t, tol);
    let (at, left, right) = sides(h, s);
    use Side::*;
    use StabilityLabel::*;
    let label = match at {
        Inadmissible => {
            return Err(Error::InfeasibleLevel {
                level: t,
                inf: h.inf_f,
            })
        }
        InH => match (left == InH, right == InH) {
            (true, true) => YStable,
            (false, true) => YRightStable,
            (true, false) => YLeftStable,
            (false, false) => YIsolated,
        },
        OutOfH => match (left == OutOfH, right == OutOfH) {
            (true, true) => NStable,
            (false, true) => NRightStable,
            (true, false) => NLeftStable,
            (false, false) => NIsolated,
        },
    };
    Ok(Classification {
        level: t,
        snapped_to: s,
        label,
    })
}

/// `C(H) <= (d - 1)^(n - 1) + 1`.
pub fn component_bound(d: u32, n: usize) -> u64 {
    (d.saturating_sub(1) as u64).saturating_pow(n.saturating_sub(1) as u32) + 1
}

pub fn component_count_check(h: &HSet, d: u32, n: usize) -> bool {
    h.component_count() as u64 <= component_bound(d, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use StabilityLabel::*;

    fn worked() -> HSet {
        HSet::from_threshold(0.0, true, 1.0, true, &[], HSource::SecondFormula)
    }

    #[test]
    fn worked_example_labels() {
        let h = worked();
        let lab = |t| classify_t(&h, t, 1e-4).unwrap().label;
        assert_eq!(lab(2.0), YStable);
        assert_eq!(lab(1.0), YRightStable);
        assert_eq!(lab(0.5), NStable);
        assert_eq!(lab(0.0), NRightStable);
        assert!(classify_t(&h, -0.5, 1e-4).is_err());
        assert_eq!(h.component_count(), 1);
        assert!(component_count_check(&h, 4, 2));
    }

    #[test]
    fn closed_half_line_at_infimum() {
        let h = HSet::from_threshold(0.0, true, 0.0, true, &[], HSource::FastPath);
        assert_eq!(classify_t(&h, 0.0, 1e-4).unwrap().label, YRightStable);
        assert_eq!(classify_t(&h, 3.0, 1e-4).unwrap().label, YStable);
    }

    #[test]
    fn punctured_line() {
        let h = HSet::from_threshold(
            f64::NEG_INFINITY,
            false,
            f64::NEG_INFINITY,
            false,
            &[3.0],
            HSource::SecondFormula,
        );
        assert_eq!(h.pieces.len(), 2);
        assert!(!h.contains(3.0));
        assert_eq!(classify_t(&h, 3.0, 1e-4).unwrap().label, NIsolated);
        assert_eq!(classify_t(&h, -100.0, 1e-4).unwrap().label, YStable);
        assert_eq!(h.component_count(), 2);
    }

    #[test]
    fn snapping_reaches_endpoints() {
        let h = worked();
        let c = classify_t(&h, 1.00001, 1e-4).unwrap();
        assert_eq!(c.snapped_to, 1.0);
        assert_eq!(c.label, YRightStable);
    }

    #[test]
    fn component_negative_control() {
        let mut h = HSet::from_threshold(0.0, true, 0.0, true, &[], HSource::LevelScan);
        h.pieces = (0..5)
            .map(|i| Interval::new(2.0 * i as f64, 2.0 * i as f64 + 1.0, true, true))
            .collect();
        assert_eq!(h.component_count(), 5);
        assert_eq!(component_bound(2, 2), 2);
        assert!(!component_count_check(&h, 2, 2));
    }

    #[test]
    fn touching_pieces_merge() {
        let mut h = HSet::from_threshold(0.0, true, 0.0, true, &[], HSource::LevelScan);
        h.pieces = vec![
            Interval::new(0.0, 1.0, true, false),
            Interval::new(1.0, 2.0, true, false),
            Interval::new(3.0, 4.0, false, false),
        ];
        h.points = vec![4.0, 6.0];
        assert_eq!(h.component_count(), 3);
    }
}
