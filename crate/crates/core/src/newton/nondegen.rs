//! Numerical Kouchnirenko nondegeneracy test.
//!
//! For a face polynomial `f_D` the system `x_i * df_D/dx_i = 0` (all `i`) is
//! searched for solutions with every coordinate nonzero. Instead of the raw
//! system we minimize
//!
//! ```text
//! r(x) = sum_i (sum_a a_i c_a x^a)^2 / sum_a (c_a x^a)^2
//! ```
//!
//! which is invariant under the torus action that fixes the face, so the
//! search box in logarithmic coordinates does not have to chase solutions off
//! to infinity along that action. `r` vanishes exactly at solutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{newton_at_infinity, Face};
use crate::config::ToleranceConfig;
use crate::error::Result;
use crate::optim::nelder_mead;
use crate::poly::polynomial::rat_to_f64;
use crate::poly::Polynomial;
use crate::rng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NondegeneracyStatus {
    Nondegenerate,
    Degenerate,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyWitness {
    pub face: Vec<Vec<u32>>,
    pub point: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyVerdict {
    pub status: NondegeneracyStatus,
    pub witness: Option<DegeneracyWitness>,
    /// Smallest residual found on each face at infinity, in face order.
    pub face_minima: Vec<f64>,
}

/// Face polynomial as `(exponent, coefficient)` pairs.
pub type FaceTerms = Vec<(Vec<u32>, f64)>;

pub fn face_terms(p: &Polynomial, face: &Face) -> FaceTerms {
    face.points
        .iter()
        .filter_map(|a| {
            let c = p.coefficient(a);
            if c == num_traits::Zero::zero() {
                None
            } else {
                Some((a.clone(), rat_to_f64(&c)))
            }
        })
        .collect()
}

/// Residual `r` at `x = signs * exp(u)`.
fn ratio(terms: &FaceTerms, signs: &[f64], u: &[f64]) -> f64 {
    let n = u.len();
    let logs: Vec<f64> = terms
        .iter()
        .map(|(a, c)| c.abs().ln() + a.iter().zip(u).map(|(&e, ui)| e as f64 * ui).sum::<f64>())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vals: Vec<f64> = terms
        .iter()
        .zip(&logs)
        .map(|((a, c), l)| {
            let sign: f64 = a
                .iter()
                .zip(signs)
                .map(|(&e, s)| if e % 2 == 1 { *s } else { 1.0 })
                .product();
            c.signum() * sign * (l - top).exp()
        })
        .collect();
    let den: f64 = vals.iter().map(|v| v * v).sum();
    let num: f64 = (0..n)
        .map(|i| {
            let s: f64 = terms.iter().zip(&vals).map(|((a, _), v)| a[i] as f64 * v).sum();
            s * s
        })
        .sum();
    num / den
}

/// Minimal residual of one face over all sign orthants of the search box,
/// with the minimizing point.
pub fn face_minimum(terms: &FaceTerms, n: usize, cfg: &ToleranceConfig, face_index: u64) -> (f64, Vec<f64>) {
    let (lo, hi) = (cfg.torus_lo.ln(), cfg.torus_hi.ln());
    let clamp = |u: &[f64]| -> Vec<f64> { u.iter().map(|v| v.clamp(lo, hi)).collect() };
    let orthants: Vec<Vec<f64>> = (0..1usize << n)
        .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect();
    let jobs: Vec<(usize, usize)> = (0..orthants.len())
        .flat_map(|o| (0..cfg.nondegen_starts).map(move |s| (o, s)))
        .collect();
    let results: Vec<(f64, Vec<f64>)> = jobs
        .par_iter()
        .map(|&(o, s)| {
            let signs = &orthants[o];
            let mut g = rng::stream(
                cfg.seed,
                rng::tags::NONDEGEN,
                face_index * 1_000_000 + (o * 1000 + s) as u64,
            );
            let u0: Vec<f64> = if s == 0 {
                vec![0.0; n]
            } else {
                (0..n).map(|_| g.random_range(lo..hi) * 0.5).collect()
            };
            let obj = |u: &[f64]| ratio(terms, signs, &clamp(u));
            let (u, v) = nelder_mead(obj, &u0, 1.0, 4000);
            let u = clamp(&u);
            let x: Vec<f64> = u.iter().zip(signs).map(|(ui, si)| si * ui.exp()).collect();
            (v, x)
        })
        .collect();
    results
        .into_iter()
        .fold((f64::INFINITY, vec![1.0; n]), |best, r| if r.0 < best.0 { r } else { best })
}

/// Checks one face polynomial in isolation.
pub fn face_is_degenerate(terms: &FaceTerms, n: usize, cfg: &ToleranceConfig) -> Option<DegeneracyWitness> {
    let (v, x) = face_minimum(terms, n, cfg, 0);
    (v <= cfg.nondegen_tol).then(|| DegeneracyWitness {
        face: terms.iter().map(|(a, _)| a.clone()).collect(),
        point: x,
        residual: v,
    })
}

pub fn is_nondegenerate(p: &Polynomial, cfg: &ToleranceConfig) -> Result<NondegeneracyVerdict> {
    let hull = newton_at_infinity(p)?;
    let n = p.num_vars();
    let faces: Vec<&Face> = hull.faces_at_infinity().collect();
    let minima: Vec<(f64, Vec<f64>)> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| face_minimum(&face_terms(p, f), n, cfg, i as u64))
        .collect();
    let face_minima: Vec<f64> = minima.iter().map(|m| m.0).collect();
    let worst = minima
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    let (status, witness) = match worst {
        None => (NondegeneracyStatus::Nondegenerate, None),
        Some((i, (v, x))) if *v <= cfg.nondegen_tol => (
            NondegeneracyStatus::Degenerate,
            Some(DegeneracyWitness {
                face: faces[i].points.clone(),
                point: x.clone(),
                residual: *v,
            }),
        ),
        Some((_, (v, _))) if *v >= 10.0 * cfg.nondegen_tol => {
            (NondegeneracyStatus::Nondegenerate, None)
        }
        Some(_) => (NondegeneracyStatus::Inconclusive, None),
    };
    Ok(NondegeneracyVerdict {
        status,
        witness,
        face_minima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn sum_of_squares_is_nondegenerate() {
        let v = is_nondegenerate(&parse("x^2 + y^2").unwrap(), &cfg()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Nondegenerate);
        assert!(v.witness.is_none());
        // the edge residual is identically 4
        assert!(v.face_minima.iter().all(|&m| m >= 3.99));
    }

    #[test]
    fn linear_is_nondegenerate() {
        let v = is_nondegenerate(&parse("x").unwrap(), &cfg()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Nondegenerate);
    }

    #[test]
    fn square_of_difference_face_is_degenerate() {
        let terms: FaceTerms = vec![(vec![2, 0], 1.0), (vec![1, 1], -2.0), (vec![0, 2], 1.0)];
        let w = face_is_degenerate(&terms, 2, &cfg()).expect("degenerate");
        assert!(w.residual <= cfg().nondegen_tol);
        let (x, y) = (w.point[0], w.point[1]);
        assert!(x != 0.0 && ((x - y) / x).abs() < 1e-4, "{w:?}");

        let v = is_nondegenerate(&parse("(x-y)^2").unwrap(), &cfg()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Degenerate);
        assert!(v.witness.unwrap().residual <= cfg().nondegen_tol);
    }

    #[test]
    fn quartic_terms_dominate_the_full_polynomial() {
        // the degenerate square sits inside the hull of x^4, y^4 and the origin
        let v = is_nondegenerate(&parse("(x-y)^2 + x^4 + y^4").unwrap(), &cfg()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Nondegenerate);
    }

    #[test]
    fn three_variables_unsupported_beyond() {
        assert!(is_nondegenerate(&parse("x1 + x2 + x3 + x4").unwrap(), &cfg()).is_err());
        let v = is_nondegenerate(&parse("x^2 + y^2 + z^2").unwrap(), &cfg()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Nondegenerate);
    }
}
