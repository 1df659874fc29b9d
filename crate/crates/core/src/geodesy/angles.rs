use serde::{Deserialize, Serialize};

use super::distance::{distance, DistanceStatus};
use super::trace::GeodesicTrace;
use super::GeodesyError;
use crate::angle::Angle;
use crate::complex::{Complex, PointRef};
use crate::link::link_at;

/// Default successive-difference threshold for declaring a Tits estimate converged.
pub const TITS_TOL: f64 = 1e-4;

/// Angle at the vertex between sides `a` and `b` of a Euclidean triangle with third side `c`.
pub fn comparison_angle(a: f64, b: f64, c: f64) -> Result<Angle, GeodesyError> {
    let tol = 1e-9 * (a + b + c).max(1.0);
    if a <= 0.0 || b <= 0.0 || c < -tol || c > a + b + tol || a > b + c + tol || b > a + c + tol {
        return Err(GeodesyError::DegenerateTriangle(a, b, c));
    }
    let cos = ((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0);
    Ok(Angle::radians(cos.acos()))
}

/// Angle at `p` between the geodesics to `x` and `y`: the link distance of
/// their initial directions capped at π, or the planar angle inside a cell.
pub fn angle_at_point(
    complex: &Complex,
    p: PointRef,
    x: PointRef,
    y: PointRef,
    budget: usize,
) -> Result<Angle, GeodesyError> {
    if p == x || p == y {
        return Err(GeodesyError::DegenerateTriangle(0.0, 0.0, 0.0));
    }
    let gx = distance(complex, p, x, budget)?.trace;
    let gy = distance(complex, p, y, budget)?.trace;
    let (sx, sy) = (&gx.segments[0], &gy.segments[0]);
    let pi = Angle::pi();
    match link_at(complex, &p) {
        None => Ok((sx.heading - sy.heading).wrapped().abs().min(pi)),
        Some(link) => {
            let a = link
                .pos_from_heading(sx.cell, sx.heading)
                .ok_or(GeodesyError::InvalidDirection)?;
            let b = link
                .pos_from_heading(sy.cell, sy.heading)
                .ok_or(GeodesyError::InvalidDirection)?;
            Ok(link.distance(a, b).ok_or(GeodesyError::Disconnected)?.min(pi))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TitsStatus {
    Converged,
    LowerBoundOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TitsEstimate {
    pub schedule: Vec<f64>,
    pub values: Vec<Angle>,
    pub status: TitsStatus,
}

impl TitsEstimate {
    /// Best lower bound: the last value.
    pub fn value(&self) -> Option<Angle> {
        self.values.last().copied()
    }
}

/// Radii `len/2^k` for `k = steps-1, …, 0`.
pub fn default_schedule(len: f64, steps: usize) -> Vec<f64> {
    (0..steps).rev().map(|k| len / f64::powi(2.0, k as i32)).collect()
}

/// Comparison angles `∠̃(c₁(t), c₂(t))` along an increasing schedule. The
/// sequence is nondecreasing in a CAT(0) space; drops beyond 1e−9 (after
/// allowing a relative error of 1e−12 in the distance) are reported as
/// errors, smaller ones are absorbed. Stops early, keeping the
/// values found so far, when a distance query runs out of budget.
pub fn tits_angle_estimate(
    complex: &Complex,
    ray1: &GeodesicTrace,
    ray2: &GeodesicTrace,
    schedule: &[f64],
    tol: f64,
    budget: usize,
) -> Result<TitsEstimate, GeodesyError> {
    if ray1.start() != ray2.start() {
        return Err(GeodesyError::StartMismatch);
    }
    let reach = ray1.length.min(ray2.length);
    let mut values: Vec<Angle> = Vec::new();
    let mut used = Vec::new();
    let mut complete = true;
    let mut prev_t = 0.0;
    for &t in schedule {
        if t <= prev_t {
            return Err(GeodesyError::BadSchedule);
        }
        if t > reach * (1.0 + 1e-12) {
            return Err(GeodesyError::RadiusBeyondRay {
                radius: t,
                length: reach,
            });
        }
        prev_t = t;
        let a = ray1.point_at(complex, t);
        let b = ray2.point_at(complex, t);
        let d = distance(complex, a, b, budget)?;
        if d.status == DistanceStatus::UpperBound {
            complete = false;
            break;
        }
        let mut v = comparison_angle(t, t, d.length)?;
        if let Some(&last) = values.last() {
            if v < last {
                // near π the angle is ill-conditioned in d, so judge drops
                // against the angle of a slightly longer side
                let slack = comparison_angle(t, t, (d.length * (1.0 + 1e-12)).min(2.0 * t))?;
                if last.to_radians() - slack.to_radians() > 1e-9 {
                    return Err(GeodesyError::NonMonotone { radius: t });
                }
                v = last;
            }
        }
        values.push(v);
        used.push(t);
    }
    let n = values.len();
    let converged = complete && n >= 2 && (values[n - 1].to_radians() - values[n - 2].to_radians()).abs() < tol;
    Ok(TitsEstimate {
        schedule: used,
        values,
        status: if converged {
            TitsStatus::Converged
        } else {
            TitsStatus::LowerBoundOnly
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub param: f64,
    pub distance: f64,
    pub foot: PointRef,
}

/// Nearest point of a geodesic trace to `x`, by golden-section search on the
/// convex function `t ↦ d(x, axis(t))`. `tol` defaults to 1e−9 of the axis length.
pub fn project_to_geodesic(
    complex: &Complex,
    x: PointRef,
    axis: &GeodesicTrace,
    tol: Option<f64>,
    budget: usize,
) -> Result<Projection, GeodesyError> {
    let len = axis.length;
    let tol = tol.unwrap_or(1e-9 * len).max(1e-15);
    let f = |t: f64| -> Result<f64, GeodesyError> { distance(complex, x, axis.point_at(complex, t), budget)?.exact() };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, len);
    let mut m1 = hi - g * (hi - lo);
    let mut m2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(m1)?, f(m2)?);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - g * (hi - lo);
            f1 = f(m1)?;
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + g * (hi - lo);
            f2 = f(m2)?;
        }
    }
    let mut best = (0.5 * (lo + hi), f(0.5 * (lo + hi))?);
    for t in [0.0, len] {
        let d = f(t)?;
        if d < best.1 {
            best = (t, d);
        }
    }
    Ok(Projection {
        param: best.0,
        distance: best.1,
        foot: axis.point_at(complex, best.0),
    })
}
