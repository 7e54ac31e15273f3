//! Estimate of `P(f)`: limits of `f` along sequences in `V1` running to
//! infinity.

use serde::{Deserialize, Serialize};

use super::cluster::{confirmed_clusters, Cluster, Witness};
use crate::asymptotics::{v1_atlas, V1Atlas};
use crate::config::ToleranceConfig;
use crate::poly::StarForm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PEstimate {
    /// Witness residuals are `|df/dx_n|`.
    pub clusters: Vec<Cluster>,
    pub radii: Vec<f64>,
}

impl PEstimate {
    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Clusters the values of the atlas. Branches are followed across radii by
/// value, and each branch limit is extrapolated from its per-radius means.
pub fn p_of_atlas(atlas: &V1Atlas, cfg: &ToleranceConfig) -> PEstimate {
    let witnesses: Vec<Witness> = atlas
        .all()
        .map(|s| Witness {
            point: s.point.clone(),
            radius: s.radius,
            value: s.value,
            residual: s.residual,
        })
        .collect();
    PEstimate {
        clusters: confirmed_clusters(witnesses, &atlas.radii, cfg.cluster_tol, false),
        radii: atlas.radii.clone(),
    }
}

pub fn p_estimate(star: &StarForm, cfg: &ToleranceConfig) -> PEstimate {
    p_of_atlas(&v1_atlas(&star.field(), cfg), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse, to_star_form};

    fn p_of(text: &str) -> PEstimate {
        p_estimate(&to_star_form(&parse(text).unwrap(), 0).unwrap(), &ToleranceConfig::default())
    }

    #[test]
    fn worked_example_limit_is_one() {
        let p = p_of("(y^2-1)^2 + (x*y-1)^2");
        assert_eq!(p.clusters.len(), 1, "{:?}", p.values());
        assert!((p.clusters[0].value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn empty_cases() {
        assert!(p_of("x^2 + y^2").is_empty());
        assert!(p_of("y").is_empty());
        assert!(p_of("x").is_empty());
    }
}
