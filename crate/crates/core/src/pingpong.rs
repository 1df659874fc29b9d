//! Angle classes of R-geodesics, the uniform angle bound between them, and a
//! finite-window check that two axes have disjoint ping-pong sets.
//!
//! The window check samples finitely many points and is evidence, not a proof.

use serde::Serialize;
use thiserror::Error;

use crate::angle::{Angle, ANGLE_TOL};
use crate::complex::{CellId, Complex, PointRef};
use crate::geodesy::{
    angle_at_point, classify_geodesic, project_to_geodesic, GeodesicClass, GeodesicTrace, GeodesyError, DEFAULT_BUDGET,
};
use crate::geom::{in_convex, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PingPongError {
    #[error("trace is not an R-geodesic")]
    NotRGeodesic,
    #[error("trace is not a geodesic")]
    NotGeodesic,
    #[error("segment {segment} makes angle class {found} with the edges, expected {expected}")]
    InconsistentAlpha {
        segment: usize,
        found: Angle,
        expected: Angle,
    },
    #[error("angle classes have different moduli {0} and {1}")]
    ModulusMismatch(i64, i64),
    #[error("modulus must be positive, got {0}")]
    BadModulus(i64),
    #[error("alpha {alpha} is outside [0, π/(4·{m})]")]
    AlphaOutOfRange { alpha: Angle, m: i64 },
    #[error("excluded interval length {t} exceeds the window half-length {half}")]
    WindowTooShort { t: f64, half: f64 },
    #[error("origin {origin} lies outside the window [0, {length}]")]
    OriginOutside { origin: f64, length: f64 },
    #[error("at least one sample per cell is required")]
    NoSamples,
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
}

/// `α ∈ [0, π/(4m)]`: the offset of an R-geodesic's edge angles from the
/// lattice `(π/2m)·ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaClass {
    pub alpha: Angle,
    pub m: i64,
}

impl AlphaClass {
    pub fn new(alpha: Angle, m: i64) -> Result<Self, PingPongError> {
        if m < 1 {
            return Err(PingPongError::BadModulus(m));
        }
        let top = Angle::pi_frac(1, 4 * m);
        let below = alpha < Angle::zero() && !alpha.approx_eq(&Angle::zero(), ANGLE_TOL);
        let above = alpha > top && !alpha.approx_eq(&top, ANGLE_TOL);
        if below || above {
            return Err(PingPongError::AlphaOutOfRange { alpha, m });
        }
        Ok(AlphaClass { alpha, m })
    }
}

fn fold(rel: Angle, m: i64) -> Angle {
    let step = Angle::pi_frac(1, 2 * m);
    let r = rel.rem(step);
    r.min(step - r)
}

/// Angle class of an R-geodesic: the heading of each segment relative to its
/// cell's edges, reduced mod `π/2m` and folded into `[0, π/4m]`.
pub fn alpha_class(complex: &Complex, trace: &GeodesicTrace, m: i64) -> Result<AlphaClass, PingPongError> {
    if m < 1 {
        return Err(PingPongError::BadModulus(m));
    }
    if trace.segments.is_empty() || classify_geodesic(trace) != GeodesicClass::RGeodesic {
        return Err(PingPongError::NotRGeodesic);
    }
    let rel = |k: usize| {
        let s = &trace.segments[k];
        fold(s.heading - complex.cell(s.cell).headings[0], m)
    };
    let alpha = rel(0);
    for k in 1..trace.segments.len() {
        let found = rel(k);
        if !found.approx_eq(&alpha, 1e-9) {
            return Err(PingPongError::InconsistentAlpha {
                segment: k,
                found,
                expected: alpha,
            });
        }
    }
    AlphaClass::new(alpha, m)
}

/// Lower bound on the angle at a common point between two R-geodesics with
/// distinct germs.
pub fn perp_angle_bound(a1: AlphaClass, a2: AlphaClass) -> Result<Angle, PingPongError> {
    if a1.m != a2.m {
        return Err(PingPongError::ModulusMismatch(a1.m, a2.m));
    }
    let m = a1.m;
    let (x, y) = (a1.alpha, a2.alpha);
    let step = Angle::pi_frac(1, 2 * m);
    if !x.approx_eq(&y, ANGLE_TOL) {
        return Ok((x - y).abs());
    }
    let top = Angle::pi_frac(1, 4 * m);
    if x.approx_eq(&Angle::zero(), ANGLE_TOL) || x.approx_eq(&top, ANGLE_TOL) {
        return Ok(step);
    }
    let twice = x.scale(2);
    Ok(twice.min(step - twice))
}

/// A finite piece of an axis with the parameter of `c(0)` and the length `T`
/// of the excluded interval `[0, T]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisWindow {
    pub axis: GeodesicTrace,
    /// Parameter along `axis` where the axis parameter is 0.
    pub origin: f64,
    pub excluded: f64,
    pub period: Option<f64>,
}

impl AxisWindow {
    pub fn new(axis: GeodesicTrace, origin: f64, excluded: f64) -> Result<Self, PingPongError> {
        if classify_geodesic(&axis) == GeodesicClass::NotGeodesic {
            return Err(PingPongError::NotGeodesic);
        }
        let length = axis.length;
        if !(0.0..=length).contains(&origin) {
            return Err(PingPongError::OriginOutside { origin, length });
        }
        let half = length / 2.0;
        if excluded > half + 1e-12 {
            return Err(PingPongError::WindowTooShort { t: excluded, half });
        }
        Ok(AxisWindow {
            axis,
            origin,
            excluded,
            period: None,
        })
    }

    /// Whether an axis parameter lies in `(−∞, 0] ∪ [T, ∞)`.
    pub fn in_tail(&self, s: f64) -> bool {
        let tol = 1e-9 * self.axis.length.max(1.0);
        s <= tol || s >= self.excluded - tol
    }

    /// Axis parameter of the projection of `x`.
    pub fn project(&self, complex: &Complex, x: PointRef, budget: usize) -> Result<f64, PingPongError> {
        let tol = 1e-7 * self.axis.length.max(1.0);
        let p = project_to_geodesic(complex, x, &self.axis, Some(tol), budget)?;
        Ok(p.param - self.origin)
    }

    /// Point at axis parameter `s`, if inside the window.
    pub fn point(&self, complex: &Complex, s: f64) -> Option<PointRef> {
        let t = s + self.origin;
        (0.0..=self.axis.length)
            .contains(&t)
            .then(|| self.axis.point_at(complex, t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum PingPongVerdict {
    DisjointOnWindow,
    Intersects,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: PointRef,
    /// Axis parameters of the two projections.
    pub params: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PingPongReport {
    pub verdict: PingPongVerdict,
    #[serde(rename = "T")]
    pub t: f64,
    pub samples: usize,
    /// Samples whose projection to the first axis lies in its tails, counted
    /// up to the witness when there is one.
    pub tail_samples: usize,
    /// `a − 2·max β` where `a` is the perp bound and `β` ranges over the
    /// angles at sampled tail points `c_i(t)` between `c_i(0)` and `c_j(t)`.
    pub min_margin: Option<f64>,
    pub threshold: Option<Angle>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug)]
pub struct PingPongOptions {
    /// Grid points per cell side.
    pub samples: usize,
    pub threads: usize,
    pub budget: usize,
    /// Modulus for the angle classes; `None` skips the margin.
    pub m: Option<i64>,
}

impl Default for PingPongOptions {
    fn default() -> Self {
        PingPongOptions {
            samples: 2,
            threads: 1,
            budget: DEFAULT_BUDGET,
            m: None,
        }
    }
}

/// Points of a `k × k` grid over the bounding box of each cell that fall
/// inside it; the centroid when none do.
pub fn sample_points(complex: &Complex, k: usize) -> Vec<PointRef> {
    let mut out = Vec::new();
    for (i, cell) in complex.cells.iter().enumerate() {
        let c = CellId(i);
        let (mut lo, mut hi) = (cell.corners[0], cell.corners[0]);
        for p in &cell.corners {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let tol = -1e-6 * cell.diameter();
        let before = out.len();
        for a in 0..k {
            for b in 0..k {
                let p = Vec2::new(
                    lo.x + (hi.x - lo.x) * (a as f64 + 0.5) / k as f64,
                    lo.y + (hi.y - lo.y) * (b as f64 + 0.5) / k as f64,
                );
                // strictly inside
                if in_convex(p, &cell.corners, tol) {
                    out.push(PointRef::cell(c, p));
                }
            }
        }
        if out.len() == before {
            let g = cell.corners.iter().fold(Vec2::ZERO, |s, &p| s + p) * (1.0 / cell.len() as f64);
            out.push(PointRef::cell(c, g));
        }
    }
    out
}

enum Membership {
    Neither,
    First,
    Both(Witness),
}

fn membership(
    complex: &Complex,
    w1: &AxisWindow,
    w2: &AxisWindow,
    x: PointRef,
    budget: usize,
) -> Result<Membership, PingPongError> {
    let s1 = w1.project(complex, x, budget)?;
    if !w1.in_tail(s1) {
        return Ok(Membership::Neither);
    }
    let s2 = w2.project(complex, x, budget)?;
    Ok(if w2.in_tail(s2) {
        Membership::Both(Witness {
            point: x,
            params: [s1, s2],
        })
    } else {
        Membership::First
    })
}

/// Tests every sample point for membership in both tail preimages. The
/// first point (in cell order) found in both is the witness.
pub fn pingpong_window_check(
    complex: &Complex,
    w1: &AxisWindow,
    w2: &AxisWindow,
    opts: &PingPongOptions,
) -> Result<PingPongReport, PingPongError> {
    if opts.samples == 0 {
        return Err(PingPongError::NoSamples);
    }
    let points = sample_points(complex, opts.samples);
    let threads = opts.threads.max(1).min(points.len().max(1));
    let chunk = points.len().div_ceil(threads);
    // each chunk reports its tail count and its first witness
    type ChunkResult = Result<(usize, Option<Witness>), PingPongError>;
    let results: Vec<ChunkResult> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk.max(1))
            .map(|part| {
                s.spawn(move || {
                    let mut tails = 0;
                    for &x in part {
                        match membership(complex, w1, w2, x, opts.budget)? {
                            Membership::Neither => {}
                            Membership::First => tails += 1,
                            Membership::Both(w) => return Ok((tails + 1, Some(w))),
                        }
                    }
                    Ok((tails, None))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling thread panicked"))
            .collect()
    });
    let mut witness = None;
    let mut tail_samples = 0;
    // chunks after the witness's one do not count
    for r in results {
        let (tails, w) = r?;
        tail_samples += tails;
        if w.is_some() {
            witness = w;
            break;
        }
    }
    let t = w1.excluded.max(w2.excluded);
    if witness.is_some() {
        return Ok(PingPongReport {
            verdict: PingPongVerdict::Intersects,
            t,
            samples: points.len(),
            tail_samples,
            min_margin: None,
            threshold: None,
            witness,
        });
    }
    let (min_margin, threshold) = match opts.m {
        Some(m) => {
            let a = perp_angle_bound(alpha_class(complex, &w1.axis, m)?, alpha_class(complex, &w2.axis, m)?)?;
            let beta = max_tail_angle(complex, w1, w2, opts.budget)?;
            (Some(a.to_radians() - 2.0 * beta), Some(a))
        }
        None => (None, None),
    };
    Ok(PingPongReport {
        verdict: PingPongVerdict::DisjointOnWindow,
        t,
        samples: points.len(),
        tail_samples,
        min_margin,
        threshold,
        witness: None,
    })
}

/// Largest angle `∠_{c_i(t)}(c_i(0), c_j(t))` over sampled `t ≥ T` with both
/// points in their windows.
fn max_tail_angle(complex: &Complex, w1: &AxisWindow, w2: &AxisWindow, budget: usize) -> Result<f64, PingPongError> {
    let end = (w1.axis.length - w1.origin).min(w2.axis.length - w2.origin);
    let start = w1.excluded.max(w2.excluded);
    let mut worst: f64 = 0.0;
    if end <= start {
        return Ok(worst);
    }
    const STEPS: usize = 4;
    for k in 0..=STEPS {
        let t = start + (end - start) * k as f64 / STEPS as f64;
        for (a, b) in [(w1, w2), (w2, w1)] {
            let (Some(p), Some(o), Some(q)) = (a.point(complex, t), a.point(complex, 0.0), b.point(complex, t)) else {
                continue;
            };
            if p == q {
                continue;
            }
            let beta = angle_at_point(complex, p, o, q, budget)?;
            worst = worst.max(beta.to_radians());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, DirectionRef};
    use crate::corpus::ConeWindow;
    use crate::geodesy::{trace_ray, VertexPolicy};

    fn a(num: i64, den: i64, m: i64) -> AlphaClass {
        AlphaClass::new(Angle::pi_frac(num, den), m).unwrap()
    }

    #[test]
    fn perp_bounds() {
        assert_eq!(
            perp_angle_bound(a(1, 16, 2), a(1, 12, 2)).unwrap(),
            Angle::pi_frac(1, 48)
        );
        assert_eq!(perp_angle_bound(a(0, 1, 2), a(0, 1, 2)).unwrap(), Angle::pi_frac(1, 4));
        assert_eq!(perp_angle_bound(a(1, 8, 2), a(1, 8, 2)).unwrap(), Angle::pi_frac(1, 4));
        assert_eq!(
            perp_angle_bound(a(1, 24, 3), a(1, 24, 3)).unwrap(),
            Angle::pi_frac(1, 12)
        );
        assert!(matches!(
            perp_angle_bound(a(0, 1, 2), a(0, 1, 3)),
            Err(PingPongError::ModulusMismatch(2, 3))
        ));
        assert!(AlphaClass::new(Angle::pi_frac(1, 4), 2).is_err());
    }

    #[test]
    fn plane_alpha_classes() {
        let w = ConeWindow::new(4, 8, 1.0);
        let cx = build_complex(&w.raw()).unwrap();
        let p = w.point(&cx, 0, 0.5, 0.3).unwrap();
        for (h, expect) in [
            (Angle::zero(), Angle::zero()),
            (Angle::pi_frac(1, 6), Angle::pi_frac(1, 12)),
            (Angle::pi_frac(1, 4), Angle::zero()),
        ] {
            let t = trace_ray(
                &cx,
                p,
                DirectionRef::Planar { heading: h },
                5.0,
                VertexPolicy::Choose(0),
            )
            .unwrap();
            assert_eq!(alpha_class(&cx, &t, 2).unwrap().alpha, expect, "heading {h}");
        }
    }

    fn plane_axis(w: &ConeWindow, cx: &Complex, from: (f64, f64), h: Angle, len: f64) -> GeodesicTrace {
        let p = w.plane_point(cx, from.0, from.1).unwrap();
        trace_ray(
            cx,
            p,
            w.plane_direction(from.0, from.1, h),
            len,
            VertexPolicy::Choose(0),
        )
        .unwrap()
    }

    #[test]
    fn same_axis_intersects() {
        let w = ConeWindow::new(4, 6, 1.0);
        let cx = build_complex(&w.raw()).unwrap();
        let t = plane_axis(&w, &cx, (-4.0, 0.5), Angle::zero(), 8.0);
        let win = AxisWindow::new(t, 4.0, 2.0).unwrap();
        let rep = pingpong_window_check(&cx, &win, &win, &PingPongOptions::default()).unwrap();
        assert_eq!(rep.verdict, PingPongVerdict::Intersects);
        assert!(rep.witness.is_some());
        for threads in [2, 3, 7] {
            let opts = PingPongOptions {
                threads,
                ..Default::default()
            };
            assert_eq!(
                pingpong_window_check(&cx, &win, &win, &opts).unwrap(),
                rep,
                "{threads} threads"
            );
        }
    }

    #[test]
    fn perpendicular_plane_axes_intersect() {
        let w = ConeWindow::new(4, 7, 2.0);
        let cx = build_complex(&w.raw()).unwrap();
        let w1 = AxisWindow::new(plane_axis(&w, &cx, (-12.0, 0.0), Angle::zero(), 24.0), 12.0, 3.0).unwrap();
        let w2 = AxisWindow::new(
            plane_axis(&w, &cx, (10.0, -12.0), Angle::pi_frac(1, 2), 24.0),
            12.0,
            3.0,
        )
        .unwrap();
        let x = w.plane_point(&cx, 10.0, 5.0).unwrap();
        let s1 = w1.project(&cx, x, DEFAULT_BUDGET).unwrap();
        let s2 = w2.project(&cx, x, DEFAULT_BUDGET).unwrap();
        assert!((s1 - 10.0).abs() < 1e-5 && (s2 - 5.0).abs() < 1e-5, "{s1} {s2}");
        assert!(w1.in_tail(s1) && w2.in_tail(s2));
        let opts = PingPongOptions {
            samples: 1,
            ..Default::default()
        };
        let rep = pingpong_window_check(&cx, &w1, &w2, &opts).unwrap();
        assert_eq!(rep.verdict, PingPongVerdict::Intersects);
    }
}
