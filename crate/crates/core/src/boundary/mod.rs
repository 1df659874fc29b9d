//! Gauss–Bonnet deficiency sums, Tits distances from fan regions, flat
//! sectors, branch rays and π/m quantization.

mod fan;

use num_rational::Ratio;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{denominator_lcm, Angle};
use crate::complex::{Complex, VertexId};
use crate::geodesy::GeodesyError;

pub use fan::{
    build_fan, detect_branch_ray, grow_flat_sector, region_excess, tits_distance_gb, BranchReport, FanOptions,
    FanRegion, RegionVertex, SectorOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("vertex `{vertex}` lies on the window boundary; its deficiency {value} is unreliable")]
    BoundaryVertexFlag { vertex: String, value: Angle },
    #[error("Gauss-Bonnet hypothesis violated: computed Tits distance {value} is outside [0, π)")]
    HypothesisViolated { value: f64 },
    #[error("limit length {value} is negative; the angle list does not describe a planar fan")]
    NegativeResult { value: Angle },
    #[error("angle list is empty")]
    Empty,
    #[error("angle {0} is not a rational multiple of π")]
    IrrationalAngle(String),
    #[error("edge `{0}` is shared by three or more cells inside the fan")]
    NonManifold(String),
    #[error("fan angle {0} exceeds π")]
    FanTooWide(Angle),
    #[error("the two directions coincide")]
    DegenerateFan,
    #[error("no link path number {via} between the directions ({available} available)")]
    NoFanPath { via: usize, available: usize },
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
}

/// `2π` minus the angle sum at an interior vertex.
pub fn deficiency(complex: &Complex, v: VertexId) -> Result<Angle, BoundaryError> {
    let k = Angle::two_pi() - complex.angle_sum(v);
    if complex.window_boundary[v.0] {
        return Err(BoundaryError::BoundaryVertexFlag {
            vertex: complex.vertex_name(v).to_string(),
            value: k,
        });
    }
    Ok(k)
}

/// Length of the ideal-boundary interval of a planar fan bounded by a
/// polygonal path with interior angles `A_i`: `Σ A_i − (n−1)π`.
pub fn polygon_limit_length(angles: &[Angle]) -> Result<Angle, BoundaryError> {
    if angles.is_empty() {
        return Err(BoundaryError::Empty);
    }
    let n = angles.len() as i64;
    let v = angles.iter().copied().sum::<Angle>() - Angle::pi().scale(n - 1);
    if v < Angle::zero() && !v.approx_eq(&Angle::zero(), crate::angle::ANGLE_TOL) {
        return Err(BoundaryError::NegativeResult { value: v });
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationModulus {
    pub m: i64,
    /// Distinct corner angles, ascending.
    pub angles: Vec<Angle>,
}

/// Least `m` with every corner angle in `(π/m)·ℤ`.
pub fn quantization_modulus(complex: &Complex) -> Result<QuantizationModulus, BoundaryError> {
    let mut angles: Vec<Angle> = Vec::new();
    for a in complex.all_angles() {
        if !a.is_exact() {
            return Err(BoundaryError::IrrationalAngle(a.render()));
        }
        if !angles.contains(&a) {
            angles.push(a);
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).expect("exact angles compare"));
    let m = denominator_lcm(&angles).expect("all angles exact");
    Ok(QuantizationModulus { m, angles })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizedCheck {
    pub k: i64,
    pub residual: Angle,
    pub quantized: bool,
}

/// Nearest multiple `kπ/m` of `value` and the distance to it.
pub fn check_quantized(value: Angle, m: i64, tol: f64) -> QuantizedCheck {
    let (k, residual) = match value.pi_ratio() {
        Some(r) => {
            let scaled = r * m;
            let k = scaled.round().to_integer();
            (k, Angle::Exact((r - Ratio::new(k, m)).abs()))
        }
        None => {
            let k = (value.to_radians() * m as f64 / std::f64::consts::PI).round() as i64;
            (k, (value - Angle::pi_frac(k, m)).abs().approx())
        }
    };
    let quantized = residual.is_zero() || residual.to_radians() <= tol;
    QuantizedCheck { k, residual, quantized }
}
