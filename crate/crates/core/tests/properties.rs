//! Property-based invariants of the polynomial layer, the distance oracle,
//! the classifier and the second-type detector.

use std::sync::OnceLock;

use proptest::prelude::*;

use gheb_core::assembler::{classify_t, HSet, HSource, Interval, StabilityLabel};
use gheb_core::asymptotics::{star_infimum, AsymptoticContext, SublevelOracle, Verdict};
use gheb_core::poly::{apply_linear_change, parse, to_star_form, LinearChange, PolyField, Polynomial, ScalarField, StarForm};
use gheb_core::ToleranceConfig;

fn poly_strategy(num_vars: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let term = (-6i64..=6, prop::collection::vec(0..=max_deg, num_vars));
    prop::collection::vec(term, 1..6).prop_filter_map("nonconstant", move |terms| {
        let refs: Vec<(i64, &[u32])> = terms.iter().map(|(c, e)| (*c, e.as_slice())).collect();
        let p = Polynomial::from_int_terms(num_vars, &refs).ok()?;
        (!p.is_constant() && p.degree() <= max_deg * num_vars as u32).then_some(p)
    })
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_then_parse_is_identity(p in (1usize..=3).prop_flat_map(|n| poly_strategy(n, 3))) {
        let text = p.to_string();
        let q = gheb_core::poly::parse_with_vars(&text, p.num_vars()).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn gradient_matches_central_differences(p in poly_strategy(2, 3), x in point(2)) {
        let field = PolyField::new(&p);
        let g = field.gradient(&x);
        let h = 1e-5;
        for i in 0..2 {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            let fd = (field.value(&a) - field.value(&b)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "{} vs {}", fd, g[i]);
        }
    }

    #[test]
    fn invertible_change_preserves_degree(
        p in poly_strategy(2, 3),
        m in prop::collection::vec(-3i64..=3, 4),
    ) {
        let rows = vec![vec![m[0], m[1]], vec![m[2], m[3]]];
        prop_assume!(m[0] * m[3] - m[1] * m[2] != 0);
        let a = LinearChange::from_integers(&rows).unwrap();
        let q = apply_linear_change(&p, &a).unwrap();
        prop_assert_eq!(q.degree(), p.degree());
    }

    #[test]
    fn star_form_invariants(p in poly_strategy(2, 3), seed in 0u64..1000, x in point(2)) {
        let s = to_star_form(&p, seed).unwrap();
        prop_assert!(s.satisfies_invariants());
        prop_assert_eq!(s.degree(), p.degree());
        // the last variable carries a nonzero pure power of top degree
        let mut top = vec![0u32; 2];
        top[1] = p.degree();
        prop_assert_eq!(s.poly.coefficient(&top), s.leading.clone());
        prop_assert!(!num_traits::Zero::is_zero(&s.leading));
        // f o A agrees with the star polynomial
        let a = s.change.to_f64();
        let ax = [a[0] * x[0] + a[1] * x[1], a[2] * x[0] + a[3] * x[1]];
        let lhs = PolyField::new(&p).value(&ax);
        let rhs = PolyField::new(&s.poly).value(&x);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }
}

fn quartic() -> Polynomial {
    parse("(x^2 + y^2 - 1)^2 + x").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distance_is_one_lipschitz(x in point(2), dx in point(2), t in -0.5f64..1.0) {
        let p = quartic();
        let field = PolyField::new(&p);
        let cfg = ToleranceConfig::default();
        let oracle = SublevelOracle::new(&field, t, &cfg);
        let y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + 0.1 * b).collect();
        let gap = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let (da, db) = (oracle.distance(&x).distance, oracle.distance(&y).distance);
        prop_assert!((da - db).abs() <= gap + 1e-4, "{} {} gap {}", da, db, gap);
    }

    #[test]
    fn distance_is_monotone_in_level(x in point(2), t in -0.5f64..1.0, dt in 0.0f64..1.0) {
        let p = quartic();
        let field = PolyField::new(&p);
        let cfg = ToleranceConfig::default();
        let low = SublevelOracle::new(&field, t, &cfg).distance(&x).distance;
        let high = SublevelOracle::new(&field, t + dt, &cfg).distance(&x).distance;
        prop_assert!(high <= low + 1e-6, "{} > {}", high, low);
    }
}

/// Random `H` sets made of a few disjoint pieces and points above `inf f`.
fn hset_strategy() -> impl Strategy<Value = HSet> {
    (
        prop::collection::vec((0.0f64..1.0, any::<bool>(), any::<bool>()), 0..4),
        prop::collection::vec(0.0f64..1.0, 0..3),
        prop_oneof![Just(f64::NEG_INFINITY), (-2.0f64..0.0)],
        any::<bool>(),
    )
        .prop_map(|(cuts, pts, inf_f, attained)| {
            let base = if inf_f.is_finite() { inf_f } else { -2.0 };
            let mut pieces = Vec::new();
            for (i, (w, lc, hc)) in cuts.iter().enumerate() {
                let lo = base + 3.0 * i as f64 + 0.5;
                pieces.push(Interval::new(lo, lo + 0.5 + 2.0 * w, *lc, *hc));
            }
            let points = pts.iter().enumerate().map(|(i, p)| base + 3.0 * i as f64 + 0.1 + 0.2 * p).collect();
            HSet {
                pieces,
                points,
                threshold: base,
                excluded: Vec::new(),
                inf_f,
                inf_attained: attained,
                source: HSource::LevelScan,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn labels_are_exhaustive_where_admissible(h in hset_strategy(), t in -3.0f64..12.0) {
        match classify_t(&h, t, 1e-9) {
            Ok(c) => prop_assert!(StabilityLabel::ALL.iter().filter(|l| **l == c.label).count() == 1),
            Err(_) => prop_assert!(!h.admits(t), "admissible level {} was rejected", t),
        }
    }
}

fn worked_context() -> &'static AsymptoticContext<'static> {
    static CFG: OnceLock<ToleranceConfig> = OnceLock::new();
    static STAR: OnceLock<StarForm> = OnceLock::new();
    static CTX: OnceLock<AsymptoticContext<'static>> = OnceLock::new();
    CTX.get_or_init(|| {
        let cfg = CFG.get_or_init(ToleranceConfig::default);
        let star = STAR.get_or_init(|| to_star_form(&parse("(y^2-1)^2 + (x*y-1)^2").unwrap(), 0).unwrap());
        AsymptoticContext::new(star, star_infimum(star, cfg), cfg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn second_type_present_is_down_closed(a in 0.01f64..3.0, b in 0.01f64..3.0) {
        let ctx = worked_context();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let v_hi = ctx.detect_second_type(hi).unwrap().verdict;
        let v_lo = ctx.detect_second_type(lo).unwrap().verdict;
        prop_assert!(!(v_hi == Verdict::Present && v_lo == Verdict::Absent), "present at {} but absent at {}", hi, lo);
    }
}
