//! Assembly of `H(f)` from the threshold, endpoint detection and
//! punctures, or from a level scan when `F(f)` looks like an interval.

use serde::{Deserialize, Serialize};

use super::hset::{HSet, HSource, Interval};
use super::threshold::{threshold_with, ThresholdEstimate};
use crate::asymptotics::{AsymptoticContext, Verdict};
use crate::error::{Error, Result};
use crate::spectrum::FedoryukEstimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointEvidence {
    pub level: f64,
    pub admissible: bool,
    pub second: Option<Verdict>,
    pub first: Option<Verdict>,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunctureCheck {
    pub level: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub level: f64,
    pub second: Verdict,
    /// Set when `second` was inferred from a present verdict at a higher
    /// level rather than measured.
    pub implied: bool,
    /// Not evaluated below a second-type level.
    pub first: Option<Verdict>,
}

impl ScanEntry {
    pub fn in_h(&self) -> bool {
        self.second == Verdict::Absent && self.first == Some(Verdict::Absent)
    }

    fn conclusive(&self) -> bool {
        self.second != Verdict::Inconclusive && self.first != Some(Verdict::Inconclusive)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assembly {
    pub h: HSet,
    pub threshold: ThresholdEstimate,
    pub endpoint: Option<EndpointEvidence>,
    pub punctures: Vec<PunctureCheck>,
    pub scan: Vec<ScanEntry>,
}

impl Assembly {
    /// Levels where a first-type sequence was detected.
    pub fn first_type_levels(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .punctures
            .iter()
            .filter(|p| p.verdict == Verdict::Present)
            .map(|p| p.level)
            .collect();
        if let Some(e) = &self.endpoint {
            if e.first == Some(Verdict::Present) {
                out.push(e.level);
            }
        }
        out
    }
}

/// Offset below a candidate level at which the first-type detector is run a
/// second time, to absorb the error of the extrapolated value.
fn below(v: f64) -> f64 {
    v - 1e-6 * (1.0 + v.abs())
}

/// `H(f)` through the threshold. `p_values` is the estimated `P(f)`.
pub fn assemble_in(ctx: &AsymptoticContext, p_values: &[f64], fedoryuk: &FedoryukEstimate) -> Result<Assembly> {
    if fedoryuk.unbounded_flag {
        return level_scan(ctx);
    }
    let f_values = fedoryuk.values();
    let threshold = threshold_with(ctx, p_values, &f_values, false)?;
    let h = threshold.value;
    let inf = ctx.inf.value;

    let endpoint = if h.is_finite() {
        let admissible = ctx.inf.admits(h, ctx.cfg.level_tol);
        let verdict = |r: Result<crate::asymptotics::TypedSequenceEvidence>| -> Result<Option<Verdict>> {
            match r {
                Ok(e) => Ok(Some(e.verdict)),
                Err(Error::InfeasibleLevel { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let (second, first) = if admissible {
            (verdict(ctx.detect_second_type(h))?, verdict(ctx.detect_first_type(h))?)
        } else {
            (None, None)
        };
        let included = admissible && second == Some(Verdict::Absent) && first == Some(Verdict::Absent);
        Some(EndpointEvidence {
            level: h,
            admissible,
            second,
            first,
            included,
        })
    } else {
        None
    };

    let res = ctx.cfg.threshold_resolution;
    let mut candidates: Vec<f64> = p_values.iter().chain(&f_values).copied().filter(|v| *v > h + res).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() < ctx.cfg.cluster_tol);
    let punctures: Vec<PunctureCheck> = candidates
        .iter()
        .map(|&v| {
            let at = ctx.detect_first_type(v)?.verdict;
            let verdict = if at == Verdict::Present {
                at
            } else {
                match ctx.detect_first_type(below(v))?.verdict {
                    Verdict::Present => Verdict::Present,
                    b if at == Verdict::Inconclusive || b == Verdict::Inconclusive => Verdict::Inconclusive,
                    _ => Verdict::Absent,
                }
            };
            Ok(PunctureCheck { level: v, verdict })
        })
        .collect::<Result<_>>()?;
    let holes: Vec<f64> = punctures
        .iter()
        .filter(|p| p.verdict == Verdict::Present)
        .map(|p| p.level)
        .collect();
    let source = if p_values.is_empty() {
        HSource::FirstFormula
    } else {
        HSource::SecondFormula
    };
    let included = endpoint.as_ref().is_some_and(|e| e.included);
    let mut hset = HSet::from_threshold(inf, ctx.inf.attained, h, included, &holes, source);
    let shaky = threshold.estimated || punctures.iter().any(|p| p.verdict == Verdict::Inconclusive);
    let shaky_end = endpoint
        .as_ref()
        .is_some_and(|e| e.second == Some(Verdict::Inconclusive) || e.first == Some(Verdict::Inconclusive));
    for p in hset.pieces.iter_mut() {
        p.estimated = shaky || (shaky_end && p.lo == h);
    }
    Ok(Assembly {
        h: hset,
        threshold,
        endpoint,
        punctures,
        scan: Vec::new(),
    })
}

fn scan_entry(ctx: &AsymptoticContext, t: f64) -> Result<Option<ScanEntry>> {
    let second = match ctx.detect_second_type(t) {
        Ok(e) => e.verdict,
        Err(Error::InfeasibleLevel { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let first = if second == Verdict::Present {
        None
    } else {
        Some(ctx.detect_first_type(t)?.verdict)
    };
    Ok(Some(ScanEntry {
        level: t,
        second,
        implied: false,
        first,
    }))
}

/// `H(f)` from per-level verdicts on a grid, refined by bisection wherever
/// neighbouring verdicts disagree.
///
/// The grid is walked downwards. Second-type levels are down-closed, so once
/// a present verdict is seen every lower level is marked present without
/// running the detectors.
pub fn level_scan(ctx: &AsymptoticContext) -> Result<Assembly> {
    let cfg = ctx.cfg;
    let inf = ctx.inf.value;
    let (lo, hi) = if inf.is_finite() {
        (inf, inf + cfg.bracket_cap)
    } else {
        (-cfg.bracket_cap, cfg.bracket_cap)
    };
    let n = cfg.level_grid.max(2);
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut entries: Vec<ScanEntry> = Vec::with_capacity(n);
    let mut seen_present = false;
    for &t in grid.iter().rev() {
        if seen_present {
            if ctx.inf.admits(t, cfg.level_tol) {
                entries.push(ScanEntry {
                    level: t,
                    second: Verdict::Present,
                    implied: true,
                    first: None,
                });
            }
            continue;
        }
        if let Some(e) = scan_entry(ctx, t)? {
            seen_present = e.second == Verdict::Present;
            entries.push(e);
        }
    }
    entries.reverse();
    let mut scan = entries.clone();
    if entries.is_empty() {
        let threshold = ThresholdEstimate {
            value: f64::INFINITY,
            raw: f64::INFINITY,
            snapped: false,
            estimated: true,
            evaluations: Vec::new(),
        };
        let h = HSet::from_threshold(inf, ctx.inf.attained, f64::INFINITY, false, &[], HSource::LevelScan);
        return Ok(Assembly { h, threshold, endpoint: None, punctures: Vec::new(), scan });
    }

    // boundaries between consecutive entries with different membership
    let mut bounds: Vec<f64> = Vec::new();
    for w in entries.windows(2) {
        if w[0].in_h() != w[1].in_h() {
            let (mut a, mut b) = (w[0].level, w[1].level);
            let left = w[0].in_h();
            while b - a > cfg.threshold_resolution {
                let m = 0.5 * (a + b);
                match scan_entry(ctx, m)? {
                    Some(e) => {
                        let side = e.in_h();
                        scan.push(e);
                        if side == left {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    None => a = m,
                }
            }
            bounds.push(0.5 * (a + b));
        } else {
            bounds.push(f64::NAN);
        }
    }
    scan.sort_by(|a, b| a.level.total_cmp(&b.level));

    let mut pieces: Vec<Interval> = Vec::new();
    let mut start: Option<(f64, bool, bool)> = None;
    let last = entries.len() - 1;
    for (i, e) in entries.iter().enumerate() {
        if e.in_h() && start.is_none() {
            let (l, closed) = if i == 0 {
                if inf.is_finite() {
                    (e.level, ctx.inf.admits(e.level, 0.0))
                } else {
                    (f64::NEG_INFINITY, false)
                }
            } else {
                (bounds[i - 1], false)
            };
            start = Some((l, closed, !e.conclusive()));
        }
        if let Some((l, closed, shaky)) = start.as_mut() {
            *shaky |= !e.conclusive();
            let ends = i == last || !entries[i + 1].in_h();
            if ends {
                let r = if i == last { f64::INFINITY } else { bounds[i] };
                let mut piece = Interval::new(*l, r, *closed, false);
                piece.estimated = *shaky;
                pieces.push(piece);
                start = None;
            }
        }
    }

    // sup of the second-type levels seen on the scan
    let last_present = scan.iter().rposition(|e| e.second != Verdict::Absent);
    let threshold_value = match last_present {
        None => inf,
        Some(i) if i == scan.len() - 1 => f64::INFINITY,
        Some(i) => 0.5 * (scan[i].level + scan[i + 1].level),
    };
    let threshold = ThresholdEstimate {
        value: threshold_value,
        raw: threshold_value,
        snapped: false,
        estimated: scan.iter().any(|e| e.second == Verdict::Inconclusive),
        evaluations: Vec::new(),
    };
    let h = HSet {
        pieces,
        points: Vec::new(),
        threshold: threshold_value,
        excluded: Vec::new(),
        inf_f: inf,
        inf_attained: ctx.inf.attained,
        source: HSource::LevelScan,
    };
    Ok(Assembly {
        h,
        threshold,
        endpoint: None,
        punctures: Vec::new(),
        scan,
    })
}
