//! Planar vectors and the rigid motions used to develop cells side by side.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::angle::Angle;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_heading(h: f64) -> Self {
        Vec2::new(h.cos(), h.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn heading(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// Isometry of the plane: `x ↦ R(angle)·(S?)·x + shift`, where `S` reflects
/// across the x-axis. The rotation angle is kept as an [`Angle`] so that
/// headings transported between exact cells stay exact.
#[derive(Clone, Copy, Debug)]
pub struct Iso2 {
    pub angle: Angle,
    pub reflect: bool,
    pub shift: Vec2,
    cos: f64,
    sin: f64,
}

impl Iso2 {
    pub fn identity() -> Self {
        Iso2::new(Angle::zero(), false, Vec2::ZERO)
    }

    pub fn new(angle: Angle, reflect: bool, shift: Vec2) -> Self {
        let r = angle.to_radians();
        Iso2 {
            angle,
            reflect,
            shift,
            cos: r.cos(),
            sin: r.sin(),
        }
    }

    fn linear(&self, v: Vec2) -> Vec2 {
        let v = if self.reflect { Vec2::new(v.x, -v.y) } else { v };
        Vec2::new(self.cos * v.x - self.sin * v.y, self.sin * v.x + self.cos * v.y)
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.linear(p) + self.shift
    }

    pub fn apply_vec(&self, v: Vec2) -> Vec2 {
        self.linear(v)
    }

    pub fn apply_heading(&self, h: Angle) -> Angle {
        if self.reflect {
            (self.angle - h).normalized()
        } else {
            (self.angle + h).normalized()
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Iso2) -> Iso2 {
        let angle = if self.reflect {
            self.angle - other.angle
        } else {
            self.angle + other.angle
        };
        Iso2::new(
            angle.normalized(),
            self.reflect != other.reflect,
            self.apply(other.shift),
        )
    }

    pub fn inverse(&self) -> Iso2 {
        // (R S)^-1 = S R^-1 = R S ; R^-1 otherwise.
        let lin = if self.reflect {
            Iso2::new(self.angle, true, Vec2::ZERO)
        } else {
            Iso2::new(-self.angle, false, Vec2::ZERO)
        };
        let shift = -lin.apply(self.shift);
        Iso2::new(lin.angle.normalized(), lin.reflect, shift)
    }
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment `a + t(b - a)` lying
/// inside the convex polygon `poly` (counterclockwise), with slack `tol`.
pub fn clip_segment_convex(a: Vec2, b: Vec2, poly: &[Vec2], tol: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let e = q - p;
        let len = e.norm();
        // signed distance to the left of edge (inside is positive)
        let f0 = e.cross(a - p) / len + tol;
        let df = e.cross(d) / len;
        if df.abs() < 1e-300 {
            if f0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -f0 / df;
        if df > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

/// Whether `p` lies in the convex counterclockwise polygon, with slack `tol`.
pub fn in_convex(p: Vec2, poly: &[Vec2], tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        e.cross(p - a) / e.norm() >= -tol
    })
}

/// Clips a convex polygon by the half-plane `{x : side · cross(dir, x - origin) ≥ 0}`.
pub fn clip_polygon_halfplane(poly: &[Vec2], origin: Vec2, dir: Vec2, side: f64) -> Vec<Vec2> {
    let f = |p: Vec2| side * dir.cross(p - origin);
    let mut out = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (fp, fq) = (f(p), f(q));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp > 0.0 && fq < 0.0) || (fp < 0.0 && fq > 0.0) {
            out.push(p.lerp(q, fp / (fp - fq)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec2, b: Vec2) -> bool {
        a.dist(b) < 1e-12
    }

    #[test]
    fn iso_compose_and_inverse() {
        let f = Iso2::new(Angle::pi_frac(1, 3), true, Vec2::new(1.0, 2.0));
        let g = Iso2::new(Angle::pi_frac(1, 4), false, Vec2::new(-3.0, 0.5));
        let p = Vec2::new(0.3, -0.7);
        assert!(close(f.compose(&g).apply(p), f.apply(g.apply(p))));
        assert!(close(f.inverse().apply(f.apply(p)), p));
        assert!(close(g.inverse().apply(g.apply(p)), p));
        let h = Angle::pi_frac(1, 6);
        let v = Vec2::from_heading(h.to_radians());
        let w = f.apply_vec(v);
        assert!((w.heading() - f.apply_heading(h).wrapped().to_radians()).abs() < 1e-12);
        assert!(f.compose(&g).angle.is_exact());
    }

    #[test]
    fn clip_square() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let (t0, t1) = clip_segment_convex(Vec2::new(-1.0, 0.5), Vec2::new(2.0, 0.5), &sq, 0.0).unwrap();
        assert!((t0 - 1.0 / 3.0).abs() < 1e-12 && (t1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(clip_segment_convex(Vec2::new(-1.0, 2.0), Vec2::new(2.0, 2.0), &sq, 0.0).is_none());
        let half = clip_polygon_halfplane(&sq, Vec2::ZERO, Vec2::new(1.0, 1.0), 1.0);
        assert_eq!(half.len(), 3);
    }
}
