//! Behaviour of `f` at infinity along the polar set `V1`: distances to
//! sublevel sets, typed-sequence detectors, the `psi` curve and the
//! growth certificate.

pub mod certificate;
pub mod detect;
pub mod distance;
pub mod psi;
pub mod v1;

pub use certificate::{exponents, gheb_certificate, CertificateVerdict, GhebCertificate};
pub use detect::{
    detect_first_type, detect_second_type, fit_slope, star_infimum, AsymptoticContext, EvidenceSample,
    SequenceKind, TypedSequenceEvidence, Verdict,
};
pub use distance::{sublevel_distance, DistanceStatus, SublevelDistanceResult, SublevelOracle};
pub use psi::{psi_curve, tau_grid, ExponentFit, PsiBin, PsiCurve};
pub use v1::{sample_v1_sphere, v1_at_level, v1_atlas, v1_on_sphere, V1Atlas, V1Sample};
