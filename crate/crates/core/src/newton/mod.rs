//! Newton polyhedron at infinity and the shortcut it offers: a convenient
//! polynomial that is nondegenerate on its Newton boundary has no Fedoryuk
//! values, and then `H(f)` is a half-line starting at `inf f`.

pub mod hull;
pub mod nondegen;

pub use hull::{is_convenient, newton_at_infinity, support, Face, NewtonPolyhedron};
pub use nondegen::{
    face_is_degenerate, is_nondegenerate, DegeneracyWitness, NondegeneracyStatus,
    NondegeneracyVerdict,
};

use serde::{Deserialize, Serialize};

use crate::assembler::hset::{HSet, HSource};
use crate::config::ToleranceConfig;
use crate::poly::{InfimumEstimate, Polynomial};

/// What the Newton-polyhedron analysis found, for the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonSummary {
    pub convenient: bool,
    /// Absent when the dimension is not supported.
    pub nondegeneracy: Option<NondegeneracyVerdict>,
    pub vertices: Vec<Vec<u32>>,
    pub applies: bool,
}

pub fn newton_summary(p: &Polynomial, cfg: &ToleranceConfig) -> NewtonSummary {
    let convenient = is_convenient(p);
    let vertices = newton_at_infinity(p)
        .map(|h| h.vertices)
        .unwrap_or_default();
    // skip the face search when convenience already rules the shortcut out
    let nondegeneracy = if convenient {
        is_nondegenerate(p, cfg).ok()
    } else {
        None
    };
    let applies = convenient
        && nondegeneracy
            .as_ref()
            .is_some_and(|v| v.status == NondegeneracyStatus::Nondegenerate);
    NewtonSummary {
        convenient,
        nondegeneracy,
        vertices,
        applies,
    }
}

/// `H(f)` when the shortcut applies, with `inf f` included exactly when it
/// is attained.
pub fn fast_path_h(summary: &NewtonSummary, inf: &InfimumEstimate) -> Option<HSet> {
    summary.applies.then(|| {
        HSet::from_threshold(
            inf.value,
            inf.attained,
            inf.value,
            inf.attained,
            &[],
            HSource::FastPath,
        )
    })
}

#[allow(non_snake_case)]
pub fn fast_path_H(p: &Polynomial, cfg: &ToleranceConfig) -> Option<HSet> {
    let summary = newton_summary(p, cfg);
    if !summary.applies {
        return None;
    }
    fast_path_h(&summary, &crate::poly::infimum_estimate(p, cfg))
}
