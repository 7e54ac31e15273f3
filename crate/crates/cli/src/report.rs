//! The self-contained JSON report written by `analyze`.
//!
//! Every numeric field is a function of the input text and the embedded
//! configuration, so rerunning with the `config` section reproduces the
//! report exactly. Wall-clock time is kept apart in `timing`, the one field
//! that varies between runs. Infinite values are written as the strings
//! `"+inf"` and `"-inf"`.

use serde::{Deserialize, Serialize};

use gheb_core::assembler::{Analysis, Assembly, Checks, HSet, LevelReport, ThresholdEstimate};
use gheb_core::asymptotics::{GhebCertificate, PsiCurve};
use gheb_core::newton::NewtonSummary;
use gheb_core::poly::{ChangeSummary, InfimumEstimate, Polynomial};
use gheb_core::spectrum::{FedoryukEstimate, PEstimate};
use gheb_core::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    /// Exact coefficient, `p` or `p/q`.
    pub coefficient: String,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    /// Canonical rendering, highest monomials first.
    pub text: String,
    pub num_vars: usize,
    pub degree: u32,
    pub terms: Vec<Term>,
}

impl From<&Polynomial> for InputSummary {
    fn from(p: &Polynomial) -> Self {
        InputSummary {
            text: p.to_string(),
            num_vars: p.num_vars(),
            degree: p.degree(),
            terms: p
                .terms()
                .rev()
                .map(|(m, c)| Term {
                    coefficient: c.to_string(),
                    exponents: m.exponents().to_vec(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool: ToolInfo,
    pub input: InputSummary,
    pub config: ToleranceConfig,
    /// The coordinate change bringing the input to form (*).
    pub change: ChangeSummary,
    pub newton: NewtonSummary,
    pub infimum: InfimumEstimate,
    pub fedoryuk: FedoryukEstimate,
    /// Absent on the Newton fast path.
    pub p_estimate: Option<PEstimate>,
    pub threshold: ThresholdEstimate,
    pub h: HSet,
    /// Detector evidence behind `h`; absent on the fast path.
    pub assembly: Option<Assembly>,
    pub checks: Checks,
    pub levels: Vec<LevelReport>,
    pub psi_curves: Vec<PsiCurve>,
    pub certificates: Vec<GhebCertificate>,
    /// Every piece of `h` rests on inconclusive verdicts.
    pub inconclusive: bool,
    pub timing: Timing,
}

impl AnalysisReport {
    pub fn new(
        analysis: &Analysis,
        cfg: &ToleranceConfig,
        psi_curves: Vec<PsiCurve>,
        certificates: Vec<GhebCertificate>,
        total_ms: f64,
    ) -> Self {
        AnalysisReport {
            tool: ToolInfo::current(),
            input: InputSummary::from(&analysis.input),
            config: cfg.clone(),
            change: analysis.change(),
            newton: analysis.newton.clone(),
            infimum: analysis.infimum.clone(),
            fedoryuk: analysis.fedoryuk.clone(),
            p_estimate: analysis.p_estimate.clone(),
            threshold: analysis.threshold.clone(),
            h: analysis.h.clone(),
            assembly: analysis.assembly.clone(),
            checks: analysis.checks.clone(),
            levels: analysis.levels.clone(),
            psi_curves,
            certificates,
            inconclusive: analysis.is_inconclusive(),
            timing: Timing { total_ms },
        }
    }

    pub fn to_json(&self) -> String {
        // plain data with string map keys only, so serialization cannot fail
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gheb_core::poly::parse;

    #[test]
    fn input_summary_lists_exact_terms() {
        let s = InputSummary::from(&parse("1/3*x^2 - 2*x*y + 1").unwrap());
        assert_eq!(s.num_vars, 2);
        assert_eq!(s.degree, 2);
        let coeffs: Vec<&str> = s.terms.iter().map(|t| t.coefficient.as_str()).collect();
        assert!(coeffs.contains(&"1/3") && coeffs.contains(&"-2") && coeffs.contains(&"1"));
        assert_eq!(parse(&s.text).unwrap(), parse("1/3*x^2 - 2*x*y + 1").unwrap());
    }
}
