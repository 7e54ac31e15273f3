//! Clustering of limit-value witnesses collected along the radius schedule.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub radius: f64,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Extrapolated limit value.
    pub value: f64,
    pub weight: usize,
    pub min_residual: f64,
    /// Spread of the member values over the confirming radii.
    pub diameter: f64,
    pub witnesses: Vec<Witness>,
}

/// Radii a cluster must be seen at, counted from the end of the schedule.
pub const CONFIRM_RADII: usize = 3;
/// Clusters wider than this multiple of the cluster tolerance are chained
/// continua rather than limit values.
const MAX_DIAMETER_FACTOR: f64 = 10.0;

/// Single-linkage clustering of values: sorted, then split at every gap
/// larger than `tol`.
pub fn single_linkage(values: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if values[i] - values[*g.last().expect("nonempty")] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Aitken's delta-squared extrapolation of the last three terms, falling back
/// to the last term when the sequence is not geometrically convergent.
pub fn aitken(seq: &[f64]) -> f64 {
    let k = seq.len();
    let last = seq[k - 1];
    if k < 3 {
        return last;
    }
    let (a, b, c) = (seq[k - 3], seq[k - 2], seq[k - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom.abs() <= 1e-14 * (1.0 + c.abs()) || d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return last;
    }
    let x = c - d2 * d2 / denom;
    // a correction far larger than the last step signals a bad model
    if (x - c).abs() > 20.0 * d2.abs() {
        last
    } else {
        x
    }
}

/// Residuals below this are rounding noise at exact critical points and
/// are not required to decrease.
pub const RESIDUAL_NOISE: f64 = 1e-9;

/// Groups witnesses by value and keeps the confirmed groups: seen at each of
/// the last [`CONFIRM_RADII`] radii, narrow, and (when `monotone_residual`)
/// with per-radius best residuals that do not increase.
pub fn confirmed_clusters(
    witnesses: Vec<Witness>,
    radii: &[f64],
    tol: f64,
    monotone_residual: bool,
) -> Vec<Cluster> {
    let values: Vec<f64> = witnesses.iter().map(|w| w.value).collect();
    let k = radii.len();
    let tail = &radii[k.saturating_sub(CONFIRM_RADII)..];
    let mut out: Vec<Cluster> = Vec::new();
    for group in single_linkage(&values, tol) {
        let members: Vec<&Witness> = group.iter().map(|&i| &witnesses[i]).collect();
        let at = |r: f64| members.iter().filter(move |w| w.radius == r);
        if tail.iter().any(|&r| at(r).next().is_none()) {
            continue;
        }
        let best: Vec<f64> = tail
            .iter()
            .map(|&r| at(r).map(|w| w.residual).fold(f64::INFINITY, f64::min))
            .collect();
        if monotone_residual && best.windows(2).any(|p| p[1] > p[0].max(RESIDUAL_NOISE)) {
            continue;
        }
        let tail_vals: Vec<f64> = members
            .iter()
            .filter(|w| tail.contains(&w.radius))
            .map(|w| w.value)
            .collect();
        let lo = tail_vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = tail_vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let diameter = hi - lo;
        if diameter > MAX_DIAMETER_FACTOR * tol {
            continue;
        }
        let means: Vec<f64> = radii
            .iter()
            .filter_map(|&r| {
                let v: Vec<f64> = at(r).map(|w| w.value).collect();
                (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
            })
            .collect();
        out.push(Cluster {
            value: aitken(&means),
            weight: members.len(),
            min_residual: members.iter().map(|w| w.residual).fold(f64::INFINITY, f64::min),
            diameter,
            witnesses: members.into_iter().cloned().collect(),
        });
    }
    merge_close(out, tol)
}

/// Extrapolation can move neighbouring clusters together; merge any pair
/// that ends up closer than `tol` so that separation holds.
fn merge_close(mut clusters: Vec<Cluster>, tol: f64) -> Vec<Cluster> {
    clusters.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Cluster> = Vec::new();
    for c in clusters {
        match out.last_mut() {
            Some(prev) if c.value - prev.value < tol => {
                let w = (prev.weight + c.weight) as f64;
                prev.value = (prev.value * prev.weight as f64 + c.value * c.weight as f64) / w;
                prev.weight += c.weight;
                prev.min_residual = prev.min_residual.min(c.min_residual);
                prev.diameter = prev.diameter.max(c.diameter);
                prev.witnesses.extend(c.witnesses);
            }
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(r: f64, v: f64, res: f64) -> Witness {
        Witness {
            point: vec![r],
            radius: r,
            value: v,
            residual: res,
        }
    }

    #[test]
    fn linkage_splits_at_gaps() {
        let g = single_linkage(&[1.0, 0.0, 1.04, 3.0, 0.03], 0.05);
        assert_eq!(g, vec![vec![1, 4], vec![0, 2], vec![3]]);
    }

    #[test]
    fn aitken_extrapolates_geometric_sequences() {
        let seq: Vec<f64> = (0..5).map(|k| 1.0 - 2.0 / 4f64.powi(k)).collect();
        assert!((aitken(&seq) - 1.0).abs() < 1e-12);
        assert_eq!(aitken(&[1.0, 2.0]), 2.0);
        assert_eq!(aitken(&[1.0, 1.0, 1.0]), 1.0);
    }

    #[test]
    fn confirmation_rules() {
        let radii = [10.0, 20.0, 40.0, 80.0];
        let ws = vec![
            w(20.0, 0.99, 1e-4),
            w(40.0, 0.998, 5e-5),
            w(80.0, 0.9995, 1e-5),
            // only at the largest radius
            w(80.0, 7.0, 1e-6),
        ];
        let c = confirmed_clusters(ws.clone(), &radii, 0.05, true);
        assert_eq!(c.len(), 1);
        assert!((c[0].value - 1.0).abs() < 1e-3);
        let mut bad = ws;
        bad[2].residual = 1e-3;
        assert!(confirmed_clusters(bad.clone(), &radii, 0.05, true).is_empty());
        assert_eq!(confirmed_clusters(bad, &radii, 0.05, false).len(), 1);
    }
}
