mod common;

use cat0lab::boundary::polygon_limit_length;
use cat0lab::corpus::ConeWindow;
use cat0lab::geodesy::{default_schedule, tits_angle_estimate, trace_ray, VertexPolicy, DEFAULT_BUDGET, TITS_TOL};
use cat0lab::pingpong::alpha_class;
use cat0lab::{build_complex, Angle, Complex, DirectionRef, PointRef};
use common::{check_triangle, corpus, random_point};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::f64::consts::PI;

#[test]
fn triangles_are_thin() {
    let mut rng = StdRng::seed_from_u64(3);
    for name in ["plane", "cone5", "tripod", "hyperbolic", "mixed"] {
        let cx = corpus(name);
        for _ in 0..8 {
            let [x, y, z] = [(); 3].map(|_| random_point(&cx, &mut rng));
            check_triangle(&cx, x, y, z).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

fn rational_angle() -> impl Strategy<Value = Angle> {
    (1i64..=12).prop_flat_map(|q| (1..=q).prop_map(move |p| Angle::pi_frac(p, q)))
}

proptest! {
    #[test]
    fn inserting_straight_angles_keeps_limit_length(
        angles in prop::collection::vec(rational_angle(), 1..6),
        at in 0usize..6,
    ) {
        if let Ok(v) = polygon_limit_length(&angles) {
            let mut more = angles.clone();
            more.insert(at.min(angles.len()), Angle::pi());
            prop_assert_eq!(polygon_limit_length(&more).unwrap(), v);
            let approx: Vec<Angle> = angles.iter().map(Angle::approx).collect();
            let w = polygon_limit_length(&approx).unwrap();
            prop_assert!((w.to_radians() - v.to_radians()).abs() < 1e-9);
        }
    }
}

fn plane() -> (ConeWindow, Complex) {
    let w = ConeWindow::new(4, 3, 1.0);
    let cx = build_complex(&w.raw()).unwrap();
    (w, cx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_folds_into_range(h in 0.0f64..(2.0 * PI), m in 1i64..5, x in 0.05f64..0.95, y in 0.05f64..0.95) {
        let (w, cx) = plane();
        let p = w.point(&cx, 0, x, y).unwrap();
        let trace = |h: f64| trace_ray(&cx, p, DirectionRef::Planar { heading: Angle::radians(h) }, 0.01, VertexPolicy::FailAtVertex).unwrap();
        let a = alpha_class(&cx, &trace(h), m).unwrap().alpha.to_radians();
        prop_assert!((-1e-12..=PI / (4.0 * m as f64) + 1e-12).contains(&a));
        // invariant under the lattice step and under reflection
        let shifted = alpha_class(&cx, &trace(h + PI / (2.0 * m as f64)), m).unwrap().alpha.to_radians();
        let mirrored = alpha_class(&cx, &trace(2.0 * PI - h), m).unwrap().alpha.to_radians();
        prop_assert!((a - shifted).abs() < 1e-9 && (a - mirrored).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tits_estimates_never_decrease(phi1 in 0.0f64..(2.5 * PI), gap in 0.1f64..(1.25 * PI)) {
        let w = ConeWindow::new(5, 6, 1.0);
        let cx = build_complex(&w.raw()).unwrap();
        let o = PointRef::vertex(cx.vertex_id("o").unwrap());
        let link = cat0lab::link::link_at(&cx, &o).unwrap();
        let ray = |phi: f64| {
            let (cell, h) = w.apex_direction(Angle::radians(phi));
            let pos = link.pos_from_heading(cx.cell_id(&cell).unwrap(), h).unwrap();
            let dir = DirectionRef::Link { arc: pos.arc, offset: pos.offset };
            trace_ray(&cx, o, dir, 4.0, VertexPolicy::Choose(0))
        };
        let phi2 = (phi1 + gap) % (2.5 * PI);
        if let (Ok(r1), Ok(r2)) = (ray(phi1), ray(phi2)) {
            let est = tits_angle_estimate(&cx, &r1, &r2, &default_schedule(4.0, 5), TITS_TOL, DEFAULT_BUDGET).unwrap();
            for pair in est.values.windows(2) {
                prop_assert!(pair[1] >= pair[0]);
            }
            // the cone point is the only curvature, so the estimate settles at min(gap, π)
            let want = gap.min(2.5 * PI - gap).min(PI);
            prop_assert!((est.value().unwrap().to_radians() - want).abs() < 1e-6);
        }
    }
}
