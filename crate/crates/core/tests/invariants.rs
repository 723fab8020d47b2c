use std::f64::consts::{E, PI};

use proptest::prelude::*;

use santalo_core::floating::{cut_height, lemma8_ratio, FloatingBodyQuery};
use santalo_core::linalg::{Matrix, Vector};
use santalo_core::polar::polar_volume_section_at;
use santalo_core::quadrature::sphere_rule;
use santalo_core::santalo::{santalo_point, SantaloRegion, DEFAULT_TOL};
use santalo_core::{BodySpec, ConvexBody};

/// Polygon with vertices on the unit circle, rejected when the origin is
/// close to an edge.
fn polygon() -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec(0.0..2.0 * PI, 4..9).prop_filter_map("thin polygon", |mut angles| {
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gaps = angles.windows(2).map(|w| w[1] - w[0]).chain([2.0 * PI - angles[angles.len() - 1] + angles[0]]);
        if gaps.fold(0.0f64, f64::max) > 0.75 * PI {
            return None;
        }
        let rows: Vec<Vec<f64>> = angles.iter().map(|t| vec![t.cos(), t.sin()]).collect();
        ConvexBody::vpolytope_from_rows(&rows).ok()
    })
}

fn map2() -> impl Strategy<Value = (Matrix, Vector)> {
    (prop::array::uniform4(-0.6..0.6f64), prop::array::uniform2(-2.0..2.0f64)).prop_filter_map(
        "near-singular map",
        |(m, a)| {
            let l = Matrix::from_row_slice(2, 2, &[1.0 + m[0], m[1], m[2], 1.0 + m[3]]);
            (l.determinant().abs() > 0.2).then(|| (l, Vector::from_row_slice(&a)))
        },
    )
}

fn direction2() -> impl Strategy<Value = Vec<f64>> {
    (0.0..2.0 * PI).prop_map(|t| vec![t.cos(), t.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polar_volume_scales_by_the_inverse_determinant(k in polygon(), (l, a) in map2(), s in 0.0..0.5f64, d in direction2()) {
        let c = k.centroid();
        let x = vec![c[0] + s * d[0], c[1] + s * d[1]];
        let base = polar_volume_section_at(&k, &x, None).unwrap().value;
        let image = k.affine_image(&l, &a).unwrap();
        let y = &l * Vector::from_column_slice(&x) + &a;
        let moved = polar_volume_section_at(&image, y.as_slice(), None).unwrap().value;
        prop_assert!((moved * l.determinant().abs() / base - 1.0).abs() < 1e-8);
    }

    #[test]
    fn santalo_point_is_affine_equivariant(k in polygon(), (l, a) in map2()) {
        let rule = sphere_rule(2, 256).unwrap();
        let x0 = santalo_point(&k, &rule, DEFAULT_TOL).unwrap().x0_vector();
        let image = k.affine_image(&l, &a).unwrap();
        let y0 = santalo_point(&image, &rule, DEFAULT_TOL).unwrap().x0_vector();
        // both solutions carry the kink quadrature error of the rule
        prop_assert!((&l * &x0 + &a - y0).norm() < 1e-3);
    }

    #[test]
    fn cut_heights_cut_off_the_requested_volume(k in polygon(), u in direction2(), delta in 0.01..0.49f64) {
        let h = cut_height(&k, &u, delta).unwrap();
        prop_assert!((k.cap_volume(&u, h) / k.volume() - delta).abs() < 1e-9);
        prop_assert!(h < k.support(&u));
    }

    #[test]
    fn cut_heights_are_symmetric_for_symmetric_bodies(m in prop::array::uniform3(-0.5..0.5f64), u in direction2(), delta in 0.01..0.49f64) {
        let shape = Matrix::from_row_slice(2, 2, &[1.0 + m[0].abs(), m[1], m[1], 1.0 + m[2].abs()]);
        prop_assume!(shape.determinant() > 0.1);
        let body = ConvexBody::ellipsoid(vec![0.0, 0.0], shape).unwrap();
        let minus = [-u[0], -u[1]];
        let a = cut_height(&body, &u, delta).unwrap();
        let b = cut_height(&body, &minus, delta).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn floating_bodies_shrink_with_delta(k in polygon(), d1 in 0.01..0.2f64, gap in 0.01..0.2f64, u in direction2()) {
        let dirs = vec![u.clone()];
        let q1 = FloatingBodyQuery::new(&k, d1, &dirs).unwrap();
        let q2 = FloatingBodyQuery::new(&k, d1 + gap, &dirs).unwrap();
        for (a, b) in q1.heights().iter().zip(q2.heights()) {
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn regions_are_nested_and_convex(k in polygon(), t in 1.2..4.0f64, grow in 1.1..3.0f64, ds in prop::collection::vec(direction2(), 2..5)) {
        let rule = sphere_rule(2, 256).unwrap();
        let sol = santalo_point(&k, &rule, DEFAULT_TOL).unwrap();
        let small = SantaloRegion::new(&k, t, &sol, &rule).unwrap();
        let large = SantaloRegion::new(&k, t * grow, &sol, &rule).unwrap();
        let tol = 1e-9;
        let x0 = small.center();
        let mut pts = Vec::new();
        for u in &ds {
            let (rs, rl) = (small.radial(u, tol).unwrap(), large.radial(u, tol).unwrap());
            prop_assert!(rs <= rl + 1e-8);
            pts.push(&x0 + Vector::from_column_slice(u) * (rs * (1.0 - 1e-6)));
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let mid = (&pts[i] + &pts[j]) * 0.5;
                prop_assert!(small.contains(mid.as_slice()));
            }
        }
    }

    #[test]
    fn centroid_caps_obey_the_grunbaum_bounds(k in polygon(), u in direction2()) {
        let r = lemma8_ratio(&k, &u);
        prop_assert!((1.0 / E - 1e-9..=1.0 - 1.0 / E + 1e-9).contains(&r));
    }
}

#[test]
fn centroid_caps_in_three_dimensions() {
    let tetra = ConvexBody::vpolytope_from_rows(&[
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ])
    .unwrap();
    // the cap parallel to a face is (3/4)³ of the simplex
    let r = lemma8_ratio(&tetra, &[0.0, 0.0, 1.0]);
    assert!((r - 27.0 / 64.0).abs() < 1e-9);
    assert!(r >= 1.0 / E);
}

#[test]
fn body_specs_round_trip() {
    for text in [
        r#"{"type":"ball","center":[0,0],"radius":2}"#,
        r#"{"type":"hpoly","A":[[1,0],[-1,0],[0,1],[0,-1]],"b":[1,1,1,1]}"#,
        r#"{"type":"vpoly","vertices":[[0,0],[1,0],[0,1]]}"#,
    ] {
        let body = BodySpec::from_json(text).unwrap().build().unwrap();
        let again = BodySpec::from_json(&body.to_spec().to_json()).unwrap().build().unwrap();
        assert!((body.volume() - again.volume()).abs() < 1e-12);
        assert!((body.centroid() - again.centroid()).norm() < 1e-12);
    }
}
