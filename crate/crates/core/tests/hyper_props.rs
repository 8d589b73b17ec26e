mod common;

use common::*;
use formred::forms::{BinaryForm, UnimodularMatrix, ROOT_TOL};
use formred::hyper::{
    act, center_of_mass, centroid_from_factors, dist_h, hyperbolic_centroid, mobius,
    reduce_to_fundamental, UhpPoint,
};
use proptest::prelude::*;

fn points(roots: &[(i64, i64)]) -> Vec<UhpPoint> {
    roots
        .iter()
        .map(|&(x, y)| UhpPoint::new(x as f64, y as f64).unwrap())
        .collect()
}

/// Damped Newton on the defining objective `sum |z - w_j|^2 / (u y_j)`,
/// written out from the definition rather than the closed form.
fn centroid_oracle(pts: &[UhpPoint]) -> UhpPoint {
    let f = |t: f64, u: f64| -> f64 {
        pts.iter()
            .map(|p| ((t - p.t).powi(2) + (u - p.u).powi(2)) / (u * p.u))
            .sum()
    };
    let (mut t, mut u) = (
        pts.iter().map(|p| p.t).sum::<f64>() / pts.len() as f64,
        pts.iter().map(|p| p.u).sum::<f64>() / pts.len() as f64,
    );
    for _ in 0..200 {
        let (mut gt, mut gu, mut htt, mut htu, mut huu) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for p in pts {
            let (dx, dy, y) = (t - p.t, u - p.u, p.u);
            let r = dx * dx + dy * dy;
            gt += 2.0 * dx / (u * y);
            gu += 2.0 * dy / (u * y) - r / (u * u * y);
            htt += 2.0 / (u * y);
            htu += -2.0 * dx / (u * u * y);
            huu += 2.0 / (u * y) - 4.0 * dy / (u * u * y) + 2.0 * r / (u * u * u * y);
        }
        let det = htt * huu - htu * htu;
        let (mut st, mut su) = if det > 0.0 && htt > 0.0 {
            ((huu * gt - htu * gu) / det, (htt * gu - htu * gt) / det)
        } else {
            (gt, gu)
        };
        let base = f(t, u);
        let mut lambda = 1.0;
        while lambda > 1e-12 && !(u - lambda * su > 0.0 && f(t - lambda * st, u - lambda * su) <= base) {
            lambda *= 0.5;
        }
        st *= lambda;
        su *= lambda;
        t -= st;
        u -= su;
        if st.abs().max(su.abs()) < 1e-15 * (1.0 + t.abs() + u) {
            break;
        }
    }
    UhpPoint::new(t, u).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_forms_agree(roots in upper_roots(1..=6)) {
        let pts = points(&roots);
        let direct = hyperbolic_centroid(&pts).unwrap().point;
        let a: Vec<f64> = pts.iter().map(|p| -2.0 * p.t).collect();
        let b: Vec<f64> = pts.iter().map(|p| p.norm_sqr()).collect();
        let factored = centroid_from_factors(&a, &b).unwrap().point;
        prop_assert!(close_pt(direct, factored, 1e-10), "{:?} vs {:?}", direct, factored);
    }

    #[test]
    fn closed_form_matches_objective_minimiser(roots in upper_roots(1..=6)) {
        let pts = points(&roots);
        let direct = hyperbolic_centroid(&pts).unwrap().point;
        let oracle = centroid_oracle(&pts);
        prop_assert!(close_pt(direct, oracle, 1e-8), "{:?} vs {:?}", direct, oracle);
    }

    #[test]
    fn centroid_is_equivariant(roots in upper_roots(1..=4), m in sl2z()) {
        let f = BinaryForm::from_upper_roots(&roots).unwrap();
        let c = hyperbolic_centroid(&points(&roots)).unwrap().point;
        let moved = f.transform(&m).roots_upper(ROOT_TOL).unwrap().upper;
        let c2 = hyperbolic_centroid(&moved).unwrap().point;
        let want = act(c, &m);
        prop_assert!(close_pt(c2, want, 1e-8), "{:?} vs {:?}", c2, want);
    }

    #[test]
    fn center_of_mass_translates(roots in upper_roots(1..=5), k in -30i64..=30) {
        let pts = points(&roots);
        let c = center_of_mass(&pts).unwrap();
        let moved: Vec<UhpPoint> = pts.iter().map(|p| act(*p, &UnimodularMatrix::translation(k))).collect();
        let c2 = center_of_mass(&moved).unwrap();
        prop_assert!(close(c2.t, c.t - k as f64, 1e-12) && close(c2.u, c.u, 1e-12));
    }

    #[test]
    fn distance_is_an_isometry_invariant(a in upper_roots(2..=2), m in sl2z()) {
        let p = points(&a);
        let d = dist_h(p[0], p[1]);
        let d2 = dist_h(act(p[0], &m), act(p[1], &m));
        prop_assert!(close(d, d2, 1e-9), "{} vs {}", d, d2);
    }

    #[test]
    fn reduction_lands_in_fundamental_domain(t in -50.0f64..50.0, u in 0.01f64..10.0) {
        let z = UhpPoint::new(t, u).unwrap();
        let (w, m) = reduce_to_fundamental(z);
        prop_assert!(w.in_fundamental_domain(1e-9), "{:?}", w);
        prop_assert!(close_pt(act(z, &m), w, 1e-9));
    }
}

#[test]
fn center_of_mass_is_not_inversion_equivariant() {
    let pts = points(&[(1, 1), (3, 2)]);
    let c = center_of_mass(&pts).unwrap();
    let inv: Vec<UhpPoint> = pts.iter().map(|p| mobius(&UnimodularMatrix::INVERSION, *p)).collect();
    let c2 = center_of_mass(&inv).unwrap();
    let want = mobius(&UnimodularMatrix::INVERSION, c);
    assert!(!close_pt(c2, want, 1e-3), "{c2:?} vs {want:?}");
    // the centroid does commute with the inversion
    let h = hyperbolic_centroid(&pts).unwrap().point;
    let h2 = hyperbolic_centroid(&inv).unwrap().point;
    assert!(close_pt(h2, mobius(&UnimodularMatrix::INVERSION, h), 1e-12));
}

#[test]
fn triangle_centres() {
    let pts = points(&[(1, 19), (2, 19), (19, 1)]);
    let c = center_of_mass(&pts).unwrap();
    assert!(close(c.t, 22.0 / 3.0, 1e-15) && close(c.u, 13.0, 1e-15));
    let h = hyperbolic_centroid(&pts).unwrap().point;
    assert!(close(h.t, 52.0 / 3.0, 1e-15));
    let oracle = centroid_oracle(&pts);
    assert!(close(h.u, oracle.u, 1e-10));
    // exact value sqrt(11661 / 189)
    assert!(close(h.u, (11661.0f64 / 189.0).sqrt(), 1e-12), "{}", h.u);
}
