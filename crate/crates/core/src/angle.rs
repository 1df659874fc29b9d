//! Angles that are either exact rational multiples of π or floating radians.
//!
//! Exact arithmetic is closed under addition, subtraction and integer
//! scaling. Mixing an exact and an approximate value always produces an
//! approximate one.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Absolute tolerance used when comparing approximate angles.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub enum Angle {
    /// `r · π` for a reduced rational `r`.
    Exact(Ratio<i64>),
    /// Radians.
    Approx(f64),
}

impl Angle {
    pub fn zero() -> Self {
        Angle::Exact(Ratio::zero())
    }

    pub fn pi() -> Self {
        Angle::pi_frac(1, 1)
    }

    pub fn two_pi() -> Self {
        Angle::pi_frac(2, 1)
    }

    /// `(num/den)·π`. Panics on a zero denominator.
    pub fn pi_frac(num: i64, den: i64) -> Self {
        Angle::Exact(Ratio::new(num, den))
    }

    pub fn radians(r: f64) -> Self {
        Angle::Approx(r)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    /// The multiple of π, when exact.
    pub fn pi_ratio(&self) -> Option<Ratio<i64>> {
        match self {
            Angle::Exact(r) => Some(*r),
            Angle::Approx(_) => None,
        }
    }

    pub fn to_radians(&self) -> f64 {
        match self {
            Angle::Exact(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            Angle::Approx(x) => *x,
        }
    }

    /// Drops exactness.
    pub fn approx(&self) -> Self {
        Angle::Approx(self.to_radians())
    }

    pub fn scale(&self, k: i64) -> Self {
        match self {
            Angle::Exact(r) => Angle::Exact(*r * k),
            Angle::Approx(x) => Angle::Approx(x * k as f64),
        }
    }

    pub fn half(&self) -> Self {
        match self {
            Angle::Exact(r) => Angle::Exact(*r / 2),
            Angle::Approx(x) => Angle::Approx(x / 2.0),
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Angle::Exact(r) => Angle::Exact(r.abs()),
            Angle::Approx(x) => Angle::Approx(x.abs()),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Equality that is exact for two exact values and within `tol` otherwise.
    pub fn approx_eq(&self, other: &Angle, tol: f64) -> bool {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            _ => (self.to_radians() - other.to_radians()).abs() <= tol,
        }
    }

    /// Representative in `[0, 2π)`.
    pub fn normalized(&self) -> Self {
        match self {
            Angle::Exact(r) => {
                let two = Ratio::from_integer(2);
                let mut v = *r % two;
                if v < Ratio::zero() {
                    v += two;
                }
                Angle::Exact(v)
            }
            Angle::Approx(x) => {
                let v = x.rem_euclid(2.0 * PI);
                Angle::Approx(if v >= 2.0 * PI { 0.0 } else { v })
            }
        }
    }

    /// Representative in `[-π, π)`.
    pub fn wrapped(&self) -> Self {
        let n = self.normalized();
        if n >= Angle::pi() {
            n - Angle::two_pi()
        } else {
            n
        }
    }

    /// Representative in `[0, modulus)`.
    pub fn rem(&self, modulus: Angle) -> Self {
        match (self, modulus) {
            (Angle::Exact(a), Angle::Exact(m)) => {
                let mut v = *a % m;
                if v < Ratio::zero() {
                    v += m;
                }
                Angle::Exact(v)
            }
            _ => {
                let m = modulus.to_radians();
                let v = self.to_radians().rem_euclid(m);
                Angle::Approx(if v >= m { 0.0 } else { v })
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact(r) => r.is_zero(),
            Angle::Approx(x) => *x == 0.0,
        }
    }

    /// Human rendering: `π/2`, `3π/4`, `-π`, `0`, or a decimal for approximate values.
    pub fn render(&self) -> String {
        match self {
            Angle::Exact(r) => {
                let (n, d) = (*r.numer(), *r.denom());
                if n == 0 {
                    return "0".to_string();
                }
                let sign = if n < 0 { "-" } else { "" };
                let a = n.abs();
                let num = if a == 1 { "π".to_string() } else { format!("{a}π") };
                if d == 1 {
                    format!("{sign}{num}")
                } else {
                    format!("{sign}{num}/{d}")
                }
            }
            Angle::Approx(x) => format!("{x:.9}"),
        }
    }

    /// Parses the command-line shorthand: `p/q` or an integer means `(p/q)·π`,
    /// a decimal (containing `.` or an exponent) means radians.
    pub fn parse_shorthand(s: &str) -> Option<Angle> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            return Some(Angle::pi_frac(p, q));
        }
        if let Ok(k) = s.parse::<i64>() {
            return Some(Angle::pi_frac(k, 1));
        }
        s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Angle::Approx)
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::zero()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::Exact(a + b),
            _ => Angle::Approx(self.to_radians() + rhs.to_radians()),
        }
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::Exact(a - b),
            _ => Angle::Approx(self.to_radians() - rhs.to_radians()),
        }
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        match self {
            Angle::Exact(a) => Angle::Exact(-a),
            Angle::Approx(x) => Angle::Approx(-x),
        }
    }
}

impl std::iter::Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(iter: I) -> Angle {
        iter.fold(Angle::zero(), |a, b| a + b)
    }
}

impl PartialEq for Angle {
    fn eq(&self, other: &Angle) -> bool {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => a == b,
            _ => self.to_radians() == other.to_radians(),
        }
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Angle) -> Option<Ordering> {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_radians().partial_cmp(&other.to_radians()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Exact { num: i64, den: i64 },
    Approx(f64),
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Angle::Exact(r) => AngleRepr::Exact {
                num: *r.numer(),
                den: *r.denom(),
            }
            .serialize(s),
            Angle::Approx(x) => AngleRepr::Approx(*x).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Angle, D::Error> {
        match AngleRepr::deserialize(d)? {
            AngleRepr::Exact { num, den } => {
                if den <= 0 {
                    return Err(serde::de::Error::custom("angle denominator must be positive"));
                }
                Ok(Angle::pi_frac(num, den))
            }
            AngleRepr::Approx(x) => Ok(Angle::Approx(x)),
        }
    }
}

/// Least common multiple of the reduced denominators of exact angles.
pub fn denominator_lcm<'a>(angles: impl IntoIterator<Item = &'a Angle>) -> Option<i64> {
    let mut m = 1i64;
    for a in angles {
        m = m.lcm(a.pi_ratio()?.denom());
    }
    Some(m)
}
