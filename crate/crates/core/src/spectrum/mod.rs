//! Numerical spectra at infinity: the Fedoryuk set `F(f)` and the set
//! `P(f)` of limits along the polar set `V1`.

pub mod cluster;
pub mod fedoryuk;
pub mod polar;

pub use cluster::{aitken, single_linkage, Cluster, Witness};
pub use fedoryuk::{fedoryuk_estimate, fedoryuk_of_field, FedoryukEstimate, Probe, PROBE_TARGETS};
pub use polar::{p_estimate, p_of_atlas, PEstimate};

/// Whether every level in `first_levels` lies within `tol` of a value of the
/// Fedoryuk estimate.
pub fn check_containment(first_levels: &[f64], fedoryuk: &FedoryukEstimate, tol: f64) -> bool {
    first_levels.iter().all(|&t| fedoryuk.near(t, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn estimate_at(values: &[f64]) -> FedoryukEstimate {
        FedoryukEstimate {
            clusters: values
                .iter()
                .map(|&v| Cluster {
                    value: v,
                    weight: 1,
                    min_residual: 0.0,
                    diameter: 0.0,
                    witnesses: Vec::new(),
                })
                .collect(),
            probes: Vec::new(),
            unbounded_flag: false,
            radii: Vec::new(),
        }
    }

    #[test]
    fn containment() {
        assert!(check_containment(&[], &estimate_at(&[]), 0.05));
        assert!(check_containment(&[], &estimate_at(&[1.0]), 0.05));
        assert!(check_containment(&[1.02], &estimate_at(&[1.0]), 0.05));
        assert!(!check_containment(&[5.0], &estimate_at(&[1.0]), 0.05));
    }
}
