//! Exact convex hull of `supp(f) ∪ {0}` for up to three variables, with the
//! complete face lattice.
//!
//! Exponents are small integers, so all predicates use `i64` arithmetic and
//! are exact. A hull of lower dimension than `n` is handled inside its affine
//! span, where it is full-dimensional and every proper face is an
//! intersection of facets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

pub fn support(p: &Polynomial) -> Vec<Vec<u32>> {
    p.support()
}

/// A face of the polyhedron, given by all input points lying on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub points: Vec<Vec<u32>>,
    pub vertices: Vec<Vec<u32>>,
    pub dim: usize,
    pub contains_origin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonPolyhedron {
    pub num_vars: usize,
    /// Dimension of the affine span of the point set.
    pub dim: usize,
    pub vertices: Vec<Vec<u32>>,
    /// Every nonempty face, the polyhedron itself included.
    pub faces: Vec<Face>,
    /// Facet inequalities `w . a <= c` in the ambient coordinates, closed
    /// under the affine span (equalities appear as two opposite rows).
    inequalities: Vec<(Vec<i64>, i64)>,
}

impl NewtonPolyhedron {
    /// Exact membership test for a point of `Q^n` given with a common
    /// denominator, `a / den`.
    pub fn contains_scaled(&self, a: &[i64], den: i64) -> bool {
        self.inequalities
            .iter()
            .all(|(w, c)| dot(w, a) <= c * den)
    }

    pub fn contains(&self, a: &[u32]) -> bool {
        let v: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        self.contains_scaled(&v, 1)
    }

    /// Faces that avoid the origin.
    pub fn faces_at_infinity(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(|f| !f.contains_origin)
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross(a: &[i64], b: &[i64]) -> Vec<i64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Rank of a small integer matrix, by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..m.len() {
            let (a, b) = (m[r][c], m[i][c]);
            if b != 0 {
                for j in 0..cols {
                    m[i][j] = m[i][j] * a - m[r][j] * b;
                }
                let g = m[i].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    for v in m[i].iter_mut() {
                        *v /= g;
                    }
                }
            }
        }
        r += 1;
    }
    r
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Newton polyhedron at infinity: the hull of the support and the origin.
pub fn newton_at_infinity(p: &Polynomial) -> Result<NewtonPolyhedron> {
    let n = p.num_vars();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let origin = vec![0u32; n];
    let mut set: BTreeSet<Vec<u32>> = p.support().into_iter().collect();
    set.insert(origin.clone());
    let pts: Vec<Vec<u32>> = set.into_iter().collect();
    let ip: Vec<Vec<i64>> = pts
        .iter()
        .map(|a| a.iter().map(|&x| x as i64).collect())
        .collect();

    // affine span through the origin (which is always a point)
    let dirs: Vec<Vec<i64>> = ip.iter().filter(|a| a.iter().any(|&v| v != 0)).cloned().collect();
    let dim = if dirs.is_empty() { 0 } else { rank(&dirs) };

    // facet supporting functionals, restricted to the span
    let mut facets: Vec<(Vec<i64>, i64)> = Vec::new();
    let normals = candidate_normals(&ip, &dirs, n, dim);
    for w in normals {
        let vals: Vec<i64> = ip.iter().map(|a| dot(&w, a)).collect();
        let max = *vals.iter().max().expect("nonempty");
        let on: Vec<usize> = (0..ip.len()).filter(|&i| vals[i] == max).collect();
        let on_pts: Vec<Vec<i64>> = on.iter().map(|&i| ip[i].clone()).collect();
        // a facet spans a hyperplane of the affine hull
        if dim > 0 && affine_rank(&on_pts) + 1 == dim && vals.iter().any(|&v| v < max) {
            let key = (w.clone(), max);
            if !facets.iter().any(|(fw, fc)| same_halfspace(fw, *fc, &key.0, key.1, &ip)) {
                facets.push(key);
            }
        }
    }

    let facet_sets: Vec<BTreeSet<usize>> = facets
        .iter()
        .map(|(w, c)| (0..ip.len()).filter(|&i| dot(w, &ip[i]) == *c).collect())
        .collect();
    let all: BTreeSet<usize> = (0..ip.len()).collect();
    let mut faces: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    faces.insert(all);
    let mut frontier: Vec<BTreeSet<usize>> = facet_sets.clone();
    while let Some(s) = frontier.pop() {
        if s.is_empty() || faces.contains(&s) {
            continue;
        }
        faces.insert(s.clone());
        for f in &facet_sets {
            let inter: BTreeSet<usize> = s.intersection(f).copied().collect();
            if !inter.is_empty() && !faces.contains(&inter) {
                frontier.push(inter);
            }
        }
    }

    let mut face_list: Vec<Face> = faces
        .iter()
        .map(|s| {
            let face_pts: Vec<Vec<i64>> = s.iter().map(|&i| ip[i].clone()).collect();
            Face {
                points: s.iter().map(|&i| pts[i].clone()).collect(),
                vertices: Vec::new(),
                dim: affine_rank(&face_pts),
                contains_origin: s.iter().any(|&i| pts[i] == origin),
            }
        })
        .collect();
    let vertices: Vec<Vec<u32>> = face_list
        .iter()
        .filter(|f| f.dim == 0)
        .map(|f| f.points[0].clone())
        .collect();
    for f in face_list.iter_mut() {
        f.vertices = f
            .points
            .iter()
            .filter(|p| vertices.contains(p))
            .cloned()
            .collect();
    }
    face_list.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.points.cmp(&b.points)));

    // inequalities: facets plus the equations of the affine span
    let mut inequalities = facets;
    for w in span_complement(&dirs, n) {
        let neg: Vec<i64> = w.iter().map(|v| -v).collect();
        inequalities.push((w, 0));
        inequalities.push((neg, 0));
    }
    Ok(NewtonPolyhedron {
        num_vars: n,
        dim,
        vertices,
        faces: face_list,
        inequalities,
    })
}

fn affine_rank(pts: &[Vec<i64>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    rank(&diffs)
}

/// Integer vectors orthogonal to every direction in `dirs`.
fn span_complement(dirs: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let d = if dirs.is_empty() { 0 } else { rank(dirs) };
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut candidates: Vec<Vec<i64>> = Vec::new();
    match n {
        1 => candidates.push(vec![1]),
        2 => {
            candidates.push(vec![1, 0]);
            candidates.push(vec![0, 1]);
            for a in dirs {
                candidates.push(vec![-a[1], a[0]]);
            }
        }
        _ => {
            for i in 0..3 {
                let mut e = vec![0; 3];
                e[i] = 1;
                candidates.push(e);
            }
            for a in dirs {
                for b in dirs {
                    candidates.push(cross(a, b));
                }
                for i in 0..3 {
                    let mut e = vec![0; 3];
                    e[i] = 1;
                    candidates.push(cross(a, &e));
                }
            }
        }
    }
    for c in candidates {
        if c.iter().all(|&v| v == 0) || dirs.iter().any(|a| dot(a, &c) != 0) {
            continue;
        }
        let mut trial = basis.clone();
        trial.push(c.clone());
        if rank(&trial) == trial.len() {
            basis = trial;
        }
        if basis.len() == n - d {
            break;
        }
    }
    basis
}

/// Functionals that may define facets inside the affine span.
fn candidate_normals(ip: &[Vec<i64>], dirs: &[Vec<i64>], n: usize, dim: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    match (n, dim) {
        (_, 0) => {}
        (1, _) => {
            out.push(vec![1]);
            out.push(vec![-1]);
        }
        (2, 1) | (3, 1) => {
            let a = dirs[0].clone();
            let neg: Vec<i64> = a.iter().map(|v| -v).collect();
            out.push(a);
            out.push(neg);
        }
        (2, 2) => {
            for i in 0..ip.len() {
                for j in i + 1..ip.len() {
                    let e = sub(&ip[j], &ip[i]);
                    out.push(vec![-e[1], e[0]]);
                    out.push(vec![e[1], -e[0]]);
                }
            }
        }
        (3, 2) => {
            // normal of the plane spanned by the hull
            let plane = dirs
                .iter()
                .flat_map(|a| dirs.iter().map(move |b| cross(a, b)))
                .find(|c| c.iter().any(|&v| v != 0))
                .expect("two independent directions");
            for i in 0..ip.len() {
                for j in i + 1..ip.len() {
                    let e = sub(&ip[j], &ip[i]);
                    let w = cross(&plane, &e);
                    let neg: Vec<i64> = w.iter().map(|v| -v).collect();
                    out.push(w);
                    out.push(neg);
                }
            }
        }
        _ => {
            for i in 0..ip.len() {
                for j in i + 1..ip.len() {
                    for k in j + 1..ip.len() {
                        let w = cross(&sub(&ip[j], &ip[i]), &sub(&ip[k], &ip[i]));
                        if w.iter().all(|&v| v == 0) {
                            continue;
                        }
                        let neg: Vec<i64> = w.iter().map(|v| -v).collect();
                        out.push(w);
                        out.push(neg);
                    }
                }
            }
        }
    }
    out
}

/// Two functionals define the same facet when they select the same points.
fn same_halfspace(w1: &[i64], c1: i64, w2: &[i64], c2: i64, ip: &[Vec<i64>]) -> bool {
    ip.iter()
        .all(|a| (dot(w1, a) == c1) == (dot(w2, a) == c2))
}

/// Convenient: every variable has a pure power in the support.
pub fn is_convenient(p: &Polynomial) -> bool {
    let n = p.num_vars();
    let supp = p.support();
    (0..n).all(|i| {
        supp.iter()
            .any(|a| a[i] > 0 && a.iter().enumerate().all(|(j, &e)| j == i || e == 0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn pts(v: &[&[u32]]) -> Vec<Vec<u32>> {
        v.iter().map(|a| a.to_vec()).collect()
    }

    #[test]
    fn support_of_examples() {
        let mut s = support(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap());
        s.sort();
        assert_eq!(s, pts(&[&[0, 0], &[0, 2], &[0, 4], &[1, 1], &[2, 2]]));
        assert!(support(&parse("0").unwrap()).is_empty());
    }

    #[test]
    fn triangle_for_sum_of_squares() {
        let h = newton_at_infinity(&parse("x^2 + y^2").unwrap()).unwrap();
        assert_eq!(h.dim, 2);
        let mut v = h.vertices.clone();
        v.sort();
        assert_eq!(v, pts(&[&[0, 0], &[0, 2], &[2, 0]]));
        // 3 vertices + 3 edges + the triangle
        assert_eq!(h.faces.len(), 7);
        let at_inf: Vec<_> = h.faces_at_infinity().collect();
        assert_eq!(at_inf.len(), 3);
        assert!(h.contains(&[1, 1]));
        assert!(!h.contains(&[2, 1]));
    }

    #[test]
    fn segment_for_product() {
        let h = newton_at_infinity(&parse("x*y").unwrap()).unwrap();
        assert_eq!(h.dim, 1);
        let mut v = h.vertices.clone();
        v.sort();
        assert_eq!(v, pts(&[&[0, 0], &[1, 1]]));
        assert!(h.contains(&[1, 1]));
        assert!(!h.contains(&[1, 0]));
        assert!(h.contains_scaled(&[1, 1], 2));
    }

    #[test]
    fn univariate_segment() {
        let h = newton_at_infinity(&parse("x").unwrap()).unwrap();
        assert_eq!(h.vertices.len(), 2);
        let at_inf: Vec<_> = h.faces_at_infinity().collect();
        assert_eq!(at_inf.len(), 1);
        assert_eq!(at_inf[0].points, pts(&[&[1]]));
    }

    #[test]
    fn edge_keeps_interior_points() {
        let h = newton_at_infinity(&parse("(x-y)^2").unwrap()).unwrap();
        let edge = h
            .faces_at_infinity()
            .find(|f| f.dim == 1)
            .expect("top edge");
        assert_eq!(edge.points, pts(&[&[0, 2], &[1, 1], &[2, 0]]));
        assert_eq!(edge.vertices, pts(&[&[0, 2], &[2, 0]]));
    }

    #[test]
    fn three_variable_tetrahedron_and_flat_cases() {
        let h = newton_at_infinity(&parse("x^2 + y^3 + z^4").unwrap()).unwrap();
        assert_eq!(h.dim, 3);
        assert_eq!(h.vertices.len(), 4);
        // 4 vertices, 6 edges, 4 triangles, the solid
        assert_eq!(h.faces.len(), 15);
        assert_eq!(h.faces_at_infinity().count(), 7);

        let flat = newton_at_infinity(&parse("x + x^2*y + x^4*y*z").unwrap()).unwrap();
        assert_eq!(flat.dim, 3);
        assert!(flat.contains(&[1, 0, 0]));

        let planar = newton_at_infinity(&parse("x^2 + y^2 + x*y").unwrap()).unwrap();
        assert_eq!(planar.dim, 2);
        let planar3 = newton_at_infinity(&parse("x*z + y*z").unwrap()).unwrap();
        assert_eq!(planar3.dim, 2);
        // the far edge and its two vertices
        assert_eq!(planar3.faces_at_infinity().count(), 3);
        assert!(planar3.contains_scaled(&[1, 1, 2], 2));
        assert!(!planar3.contains(&[0, 0, 1]));
    }

    #[test]
    fn convenience() {
        assert!(is_convenient(&parse("x^2 + y^2").unwrap()));
        assert!(!is_convenient(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap()));
        assert!(!is_convenient(&parse("x + x^2*y + x^4*y*z").unwrap()));
        assert!(is_convenient(&parse("x").unwrap()));
    }
}
