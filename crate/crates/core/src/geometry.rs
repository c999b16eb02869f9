//! Planar points and angle arithmetic shared by every engagement model.
//!
//! Angles are radians. The wrapped representation is `(-π, π]`, so a heading
//! pointing straight away from a threat has aspect angle `π` rather than `-π`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or displacement) in the plane, in normalized length units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at `angle` scaled by `radius`.
    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point2::new(radius * c, radius * s)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    /// Direction of `self` as an angle in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Bearing of `target` as seen from `self`.
    pub fn bearing_to(self, target: Point2) -> f64 {
        (target - self).angle()
    }

    /// Rotate counter-clockwise about the origin.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Point2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl From<[f64; 2]> for Point2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Point2::new(x, y)
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// An angle in radians. Not wrapped on construction; see [`Angle::wrapped`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    pub const PI: Angle = Angle(PI);

    pub const fn from_radians(radians: f64) -> Self {
        Angle(radians)
    }

    pub const fn radians(self) -> f64 {
        self.0
    }

    /// The equivalent angle in `(-π, π]`.
    pub fn wrapped(self) -> Angle {
        Angle(wrap(self.0))
    }

    pub fn abs(self) -> Angle {
        Angle(self.0.abs())
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Unit vector pointing along this angle.
    pub fn unit(self) -> Point2 {
        Point2::from_polar(1.0, self.0)
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle(radians)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// Infallible wrap into `(-π, π]`. Values already in range are returned
/// unchanged, which makes wrapping exactly idempotent.
pub(crate) fn wrap(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Wrap `a` into `(-π, π]`.
pub fn wrap_angle(a: f64) -> Result<Angle> {
    if !a.is_finite() {
        return Err(Error::domain(format!("cannot wrap non-finite angle {a}")));
    }
    Ok(Angle(wrap(a)))
}

/// Shortest angular separation between two directions, in `[0, π]`.
pub fn angular_separation(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Aspect angle: the agent heading measured from the agent-to-threat line of
/// sight. Zero means the agent is heading straight at the threat; positive
/// values mean the threat lies to the agent's right (clockwise of the heading).
pub fn aspect_angle(agent_pos: Point2, agent_heading: Angle, threat_pos: Point2) -> Result<Angle> {
    if !agent_pos.is_finite() || !threat_pos.is_finite() || !agent_heading.0.is_finite() {
        return Err(Error::domain("aspect angle of non-finite pose"));
    }
    if agent_pos == threat_pos {
        return Err(Error::domain(format!(
            "agent and threat coincide at {agent_pos}; line of sight undefined"
        )));
    }
    Ok(Angle(wrap(
        agent_heading.0 - agent_pos.bearing_to(threat_pos),
    )))
}

pub fn distance(a: Point2, b: Point2) -> f64 {
    (a - b).norm()
}
