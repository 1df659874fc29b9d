//! Distances, geodesic traces, angles at points, comparison angles, Tits
//! angle estimates and projections onto geodesics.

mod angles;
mod distance;
mod ray;
mod trace;

use thiserror::Error;

use crate::complex::PointRef;

pub use angles::{
    angle_at_point, comparison_angle, default_schedule, project_to_geodesic, tits_angle_estimate, Projection,
    TitsEstimate, TitsStatus, TITS_TOL,
};
pub use distance::{distance, distances_from, DistanceResult, DistanceStatus, DEFAULT_BUDGET};
pub use ray::{resolve_direction, trace_ray, VertexPolicy};
pub use trace::{classify_geodesic, Breakpoint, GeodesicClass, GeodesicTrace, Segment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesyError {
    #[error("degenerate triangle with sides {0}, {1}, {2}")]
    DegenerateTriangle(f64, f64, f64),
    #[error("search budget exhausted; best path found has length {upper}")]
    BudgetExhausted { upper: f64 },
    #[error("no admissible continuation at vertex `{vertex}` ({candidates} candidates at link distance π)")]
    VertexObstruction { vertex: String, candidates: usize },
    #[error("window boundary reached at {at} after length {travelled}")]
    WindowExit { at: PointRef, travelled: f64 },
    #[error("direction does not point into the complex at the start point")]
    InvalidDirection,
    #[error("points lie in different components")]
    Disconnected,
    #[error("rays do not share a start point")]
    StartMismatch,
    #[error("radius schedule must be positive and increasing")]
    BadSchedule,
    #[error("radius {radius} exceeds the ray length {length}")]
    RadiusBeyondRay { radius: f64, length: f64 },
    #[error("comparison angles decreased at radius {radius}")]
    NonMonotone { radius: f64 },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::complex::{build_complex, Complex, DirectionRef, PointRef};
    use crate::corpus::{tripod_line, ConeWindow};
    use crate::link::link_at;
    use std::f64::consts::PI;

    const B: usize = DEFAULT_BUDGET;

    fn cone(k: usize, n: usize, side: f64) -> (ConeWindow, Complex) {
        let w = ConeWindow::new(k, n, side);
        let cx = build_complex(&w.raw()).unwrap();
        (w, cx)
    }

    fn apex_dir(w: &ConeWindow, cx: &Complex, phi: Angle) -> DirectionRef {
        let (cell, h) = w.apex_direction(phi);
        let link = link_at(cx, &PointRef::vertex(cx.vertex_id("o").unwrap())).unwrap();
        let pos = link.pos_from_heading(cx.cell_id(&cell).unwrap(), h).unwrap();
        DirectionRef::Link {
            arc: pos.arc,
            offset: pos.offset,
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn comparison_angles() {
        assert!(comparison_angle(1.0, 1.0, 1.0)
            .unwrap()
            .approx_eq(&Angle::pi_frac(1, 3), 1e-12));
        assert!(comparison_angle(3.0, 4.0, 5.0)
            .unwrap()
            .approx_eq(&Angle::pi_frac(1, 2), 1e-12));
        assert!(comparison_angle(1.0, 1.0, 2.0).unwrap().approx_eq(&Angle::pi(), 1e-12));
        assert!(matches!(
            comparison_angle(1.0, 1.0, 3.0),
            Err(GeodesyError::DegenerateTriangle(..))
        ));
    }

    #[test]
    fn plane_distance_is_euclidean() {
        let (w, cx) = cone(4, 6, 1.0);
        let x = w.plane_point(&cx, 0.0, 0.0).unwrap();
        let y = w.plane_point(&cx, 3.0, 4.0).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert_eq!(r.status, DistanceStatus::Exact);
        assert!(close(r.length, 5.0, 1e-9), "{}", r.length);
        assert!(close(r.trace.length, 5.0, 1e-9));
        assert_eq!(classify_geodesic(&r.trace), GeodesicClass::RGeodesic);
        let x = w.plane_point(&cx, -2.3, 1.1).unwrap();
        let y = w.plane_point(&cx, 3.7, -4.2).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert!(close(r.length, (6.0f64.powi(2) + 5.3f64.powi(2)).sqrt(), 1e-9));
    }

    #[test]
    fn five_square_cone_distances() {
        let (w, cx) = cone(5, 3, 1.0);
        let x = w.polar(&cx, 1.0, 0.3).unwrap();
        let y = w.polar(&cx, 1.0, 0.3 + PI / 2.0).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert!(close(r.length, 2f64.sqrt(), 1e-9), "{}", r.length);
        let y = w.polar(&cx, 1.0, 0.3 + 1.5 * PI).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert!(close(r.length, 2.0, 1e-9), "{}", r.length);
        assert_eq!(r.status, DistanceStatus::Exact);
        assert_eq!(
            r.trace
                .breakpoints
                .iter()
                .filter(|b| matches!(b.point, PointRef::Vertex { .. }))
                .count(),
            1
        );
    }

    #[test]
    fn apex_paths_classify() {
        let (w, cx) = cone(5, 3, 1.0);
        let x = w.polar(&cx, 1.0, 0.2).unwrap();
        // sides π and 3π/2
        let y = w.polar(&cx, 1.0, 0.2 + PI).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert!(close(r.length, 2.0, 1e-9));
        assert_eq!(classify_geodesic(&r.trace), GeodesicClass::RGeodesic);
        // both sides 5π/4
        let y = w.polar(&cx, 1.0, 0.2 + 1.25 * PI).unwrap();
        let r = distance(&cx, x, y, B).unwrap();
        assert_eq!(classify_geodesic(&r.trace), GeodesicClass::Geodesic);
        let apex = r
            .trace
            .breakpoints
            .iter()
            .find(|b| matches!(b.point, PointRef::Vertex { .. }))
            .unwrap();
        assert!(apex.link_distance.approx_eq(&Angle::pi_frac(5, 4), 1e-9));
    }

    #[test]
    fn angles_at_points() {
        let (w, cx) = cone(4, 3, 1.0);
        let p = w.plane_point(&cx, 1.0, 1.0).unwrap();
        let x = w.plane_point(&cx, 2.0, 1.0).unwrap();
        let y = w.plane_point(&cx, 1.0, 2.0).unwrap();
        assert!(angle_at_point(&cx, p, x, y, B)
            .unwrap()
            .approx_eq(&Angle::pi_frac(1, 2), 1e-9));
        let p = w.plane_point(&cx, 0.5, 0.5).unwrap();
        let x = w.plane_point(&cx, 0.9, 0.5).unwrap();
        let y = w
            .plane_point(&cx, 0.5 + 0.4 * (PI / 3.0).cos(), 0.5 + 0.4 * (PI / 3.0).sin())
            .unwrap();
        assert!(angle_at_point(&cx, p, x, y, B)
            .unwrap()
            .approx_eq(&Angle::pi_frac(1, 3), 1e-9));

        let (w, cx) = cone(5, 2, 1.0);
        let o = PointRef::vertex(cx.vertex_id("o").unwrap());
        let x = w.polar(&cx, 1.0, 0.1).unwrap();
        let y = w.polar(&cx, 1.0, 0.1 + 1.25 * PI).unwrap();
        assert!(angle_at_point(&cx, o, x, y, B).unwrap().approx_eq(&Angle::pi(), 1e-9));
    }

    #[test]
    fn slope_half_ray_crosses_only_edges() {
        let (w, cx) = cone(4, 12, 1.0);
        let p = w.plane_point(&cx, 0.1, 0.3).unwrap();
        let h = Angle::radians(0.5f64.atan());
        let t = trace_ray(
            &cx,
            p,
            DirectionRef::Planar { heading: h },
            10.0,
            VertexPolicy::FailAtVertex,
        )
        .unwrap();
        assert!(close(t.length, 10.0, 1e-12));
        assert!(t.breakpoints.iter().all(|b| matches!(b.point, PointRef::Edge { .. })));
        assert_eq!(t.breakpoints.len(), t.segments.len() - 1);
        assert_eq!(classify_geodesic(&t), GeodesicClass::RGeodesic);
        let seg_sum: f64 = t.segments.iter().map(Segment::length).sum();
        assert!(close(seg_sum, 10.0, 1e-9));
        for pair in t.segments.windows(2) {
            assert_eq!(pair[0].end, pair[1].start);
        }
    }

    #[test]
    fn ray_into_apex_is_obstructed() {
        let (w, cx) = cone(5, 3, 1.0);
        let p = w.point(&cx, 0, 1.0, 1.0).unwrap();
        let h = Angle::pi_frac(5, 4);
        let r = trace_ray(
            &cx,
            p,
            DirectionRef::Planar { heading: h },
            3.0,
            VertexPolicy::FailAtVertex,
        );
        match r {
            Err(GeodesyError::VertexObstruction { vertex, candidates }) => {
                assert_eq!(vertex, "o");
                assert_eq!(candidates, 2);
            }
            other => panic!("{other:?}"),
        }
        let t = trace_ray(
            &cx,
            p,
            DirectionRef::Planar { heading: h },
            2.0,
            VertexPolicy::Choose(1),
        )
        .unwrap();
        assert_eq!(classify_geodesic(&t), GeodesicClass::RGeodesic);
    }

    #[test]
    fn tripod_singular_line_ray() {
        let cx = build_complex(&tripod_line(3)).unwrap();
        let start = PointRef::vertex(cx.vertex_id("l_-2").unwrap());
        let link = link_at(&cx, &start).unwrap();
        let along = link.node_of_edge(cx.edge_id("l_-1|l_-2").unwrap()).unwrap();
        let up = link.node_pos(along).unwrap();
        let dir = DirectionRef::Link {
            arc: up.arc,
            offset: up.offset,
        };
        let t = trace_ray(&cx, start, dir, 3.0, VertexPolicy::Choose(0)).unwrap();
        assert_eq!(t.breakpoints.len(), 2);
        for b in &t.breakpoints {
            assert_eq!(b.link_distance, Angle::pi());
            let l = link_at(&cx, &b.point).unwrap();
            let DirectionRef::Link { arc, offset } = b.incoming else {
                panic!()
            };
            let back = crate::link::LinkPos { arc, offset };
            assert_eq!(l.pi_points(back).len(), 1);
        }
        assert_eq!(t.end(), PointRef::vertex(cx.vertex_id("l_1").unwrap()));
        assert_eq!(classify_geodesic(&t), GeodesicClass::RGeodesic);
    }

    #[test]
    fn tits_estimates() {
        let (w, cx) = cone(4, 10, 1.0);
        let p = w.plane_point(&cx, 0.5, 0.5).unwrap();
        let r1 = trace_ray(
            &cx,
            p,
            DirectionRef::Planar {
                heading: Angle::radians(0.1),
            },
            8.0,
            VertexPolicy::Choose(0),
        )
        .unwrap();
        let r2 = trace_ray(
            &cx,
            p,
            DirectionRef::Planar {
                heading: Angle::radians(0.1 + PI / 3.0),
            },
            8.0,
            VertexPolicy::Choose(0),
        )
        .unwrap();
        let est = tits_angle_estimate(&cx, &r1, &r2, &default_schedule(8.0, 4), TITS_TOL, B).unwrap();
        assert_eq!(est.status, TitsStatus::Converged);
        assert!(est.values.iter().all(|v| v.approx_eq(&Angle::pi_frac(1, 3), 1e-9)));

        let (w, cx) = cone(5, 6, 1.0);
        let o = PointRef::vertex(cx.vertex_id("o").unwrap());
        for (beta, expect) in [(Angle::pi_frac(3, 4), 0.75 * PI), (Angle::pi_frac(5, 4), PI)] {
            let phi0 = Angle::pi_frac(1, 8);
            let r1 = trace_ray(&cx, o, apex_dir(&w, &cx, phi0), 5.0, VertexPolicy::FailAtVertex).unwrap();
            let r2 = trace_ray(&cx, o, apex_dir(&w, &cx, phi0 + beta), 5.0, VertexPolicy::FailAtVertex).unwrap();
            let est = tits_angle_estimate(&cx, &r1, &r2, &[1.0, 2.0, 4.0], TITS_TOL, B).unwrap();
            assert!(est.values.windows(2).all(|p| p[0] <= p[1]));
            assert!(close(est.value().unwrap().to_radians(), expect, 1e-9));
        }
    }

    #[test]
    fn projections() {
        let (w, cx) = cone(4, 12, 1.0);
        let o = w.plane_point(&cx, 0.0, 0.0).unwrap();
        let axis = trace_ray(
            &cx,
            o,
            DirectionRef::Link {
                arc: 0,
                offset: Angle::zero(),
            },
            10.0,
            VertexPolicy::Choose(0),
        )
        .unwrap();
        // the axis runs along one of the four coordinate rays; find which
        let end = axis.end();
        let (ex, ey) = [(10.0, 0.0), (0.0, 10.0), (-10.0, 0.0), (0.0, -10.0)]
            .into_iter()
            .find(|&(a, b)| w.plane_point(&cx, a, b) == Some(end))
            .unwrap();
        let (ux, uy) = (ex / 10.0, ey / 10.0);
        // x = 3·u + 4·u⊥
        let x = w.plane_point(&cx, 3.0 * ux - 4.0 * uy, 3.0 * uy + 4.0 * ux).unwrap();
        let pr = project_to_geodesic(&cx, x, &axis, None, B).unwrap();
        assert!(close(pr.param, 3.0, 1e-6) && close(pr.distance, 4.0, 1e-9), "{pr:?}");
        let x = w.plane_point(&cx, -2.0 * ux - 4.0 * uy, -2.0 * uy + 4.0 * ux).unwrap();
        let pr = project_to_geodesic(&cx, x, &axis, None, B).unwrap();
        assert!(
            close(pr.param, 0.0, 1e-6) && close(pr.distance, 20f64.sqrt(), 1e-9),
            "{pr:?}"
        );

        let (w, cx) = cone(5, 4, 1.0);
        let o = PointRef::vertex(cx.vertex_id("o").unwrap());
        let x = w.polar(&cx, 1.0, 0.0).unwrap();
        for (beta, foot, d) in [
            (Angle::pi_frac(2, 3), 0.0, 1.0),
            (Angle::pi_frac(1, 3), 0.5, (PI / 3.0).sin()),
        ] {
            let axis = trace_ray(&cx, o, apex_dir(&w, &cx, beta), 3.0, VertexPolicy::FailAtVertex).unwrap();
            let pr = project_to_geodesic(&cx, x, &axis, None, B).unwrap();
            assert!(close(pr.param, foot, 1e-6) && close(pr.distance, d, 1e-9), "{pr:?}");
        }
    }
}
