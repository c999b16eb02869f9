//! Engagement zone of a range-limited, simple-motion pursuer.
//!
//! Units are normalized so the pursuer moves at speed 1 and the agent at `mu`.
//! The pursuer flies a collision course; it can capture an agent holding a
//! constant heading iff the agent starts within `rho(ξ)` of the pursuer, where
//! `ξ` is the agent's aspect angle.
//!
//! For a fast pursuer (`mu <= 1`) the boundary comes from the law of cosines on
//! the triangle (pursuer start, agent start, capture point) with the pursuer
//! flying its full range. A slow pursuer additionally has a "touch-and-go"
//! branch where capture happens with zero closing speed before the range is
//! spent, and beyond `ξ_max = π - acos(1/mu)` it can only capture an agent
//! that already starts inside the capture disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{aspect_angle, wrap, Angle, Point2};

/// Relative tolerance used when deciding boundary membership. Points within
/// this fraction of the threat's length scale of the boundary count as on it.
pub(crate) const BOUNDARY_REL_TOL: f64 = 1e-12;

/// Radicands this close to zero are rounding noise at the domain edge.
const RADICAND_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PursuerThreat {
    /// Pursuer start position `P₀`.
    pub position: Point2,
    /// Speed ratio `v_A / v_P`.
    pub mu: f64,
    /// Maximum path length `R` of the pursuer.
    pub range: f64,
    /// Capture radius `r`.
    pub capture_radius: f64,
}

impl PursuerThreat {
    pub fn new(position: Point2, mu: f64, range: f64, capture_radius: f64) -> Result<Self> {
        let t = PursuerThreat {
            position,
            mu,
            range,
            capture_radius,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::argument("pursuer position must be finite"));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::argument(format!(
                "pursuer mu must be > 0, got {}",
                self.mu
            )));
        }
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(Error::argument(format!(
                "pursuer range must be > 0, got {}",
                self.range
            )));
        }
        if !(self.capture_radius.is_finite() && self.capture_radius >= 0.0) {
            return Err(Error::argument(format!(
                "capture radius must be >= 0, got {}",
                self.capture_radius
            )));
        }
        Ok(())
    }

    pub fn is_fast(&self) -> bool {
        self.mu <= 1.0
    }

    /// Radius of the capturability disk, `R + r`.
    pub fn capturability_radius(&self) -> f64 {
        self.range + self.capture_radius
    }

    /// Largest boundary radius, reached head-on: `(1 + mu) R + r`.
    pub fn rho_max(&self) -> f64 {
        (1.0 + self.mu) * self.range + self.capture_radius
    }

    /// Smallest boundary radius. `(1 - mu) R + r` for a fast pursuer, `r` otherwise.
    pub fn rho_min(&self) -> f64 {
        if self.is_fast() {
            (1.0 - self.mu) * self.range + self.capture_radius
        } else {
            self.capture_radius
        }
    }

    fn length_scale(&self) -> f64 {
        self.range + self.capture_radius
    }
}

/// One point of the engagement-zone boundary for a fixed agent heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EzBoundarySample {
    pub xi: Angle,
    pub rho: f64,
    /// Agent start position on the boundary, world frame.
    pub point: Point2,
}

fn checked_abs_xi(xi: Angle) -> Result<f64> {
    let a = xi.radians().abs();
    if !a.is_finite() {
        return Err(Error::domain("aspect angle must be finite"));
    }
    if a > PI * (1.0 + 1e-15) {
        return Err(Error::precondition(format!(
            "aspect angle {a} outside [-π, π]"
        )));
    }
    Ok(a.min(PI))
}

/// Law-of-cosines branch; valid for any `mu` where the radicand is nonnegative.
fn collision_course_radius(abs_xi: f64, t: &PursuerThreat) -> f64 {
    let mu_r = t.mu * t.range;
    let c = abs_xi.cos();
    let reach = t.length_scale() / mu_r;
    let mut radicand = c * c - 1.0 + reach * reach;
    if radicand < 0.0 && radicand > -RADICAND_CLAMP {
        radicand = 0.0;
    }
    mu_r * (c + radicand.max(0.0).sqrt())
}

fn collision_course_radius_derivative(abs_xi: f64, t: &PursuerThreat) -> f64 {
    let mu_r = t.mu * t.range;
    let (s, c) = abs_xi.sin_cos();
    let reach = t.length_scale() / mu_r;
    let radicand = (c * c - 1.0 + reach * reach).max(RADICAND_CLAMP);
    -mu_r * s * (1.0 + c / radicand.sqrt())
}

/// Touch-and-go branch for a slow pursuer: capture with zero range rate.
fn touch_and_go_radius(abs_xi: f64, t: &PursuerThreat) -> f64 {
    let usable = (1.0 / t.mu).acos();
    let denom = t.mu * abs_xi.sin() - (abs_xi + usable).sin();
    t.capture_radius * (t.mu * t.mu - 1.0).sqrt() / denom
}

fn touch_and_go_radius_derivative(abs_xi: f64, t: &PursuerThreat) -> f64 {
    let usable = (1.0 / t.mu).acos();
    let denom = t.mu * abs_xi.sin() - (abs_xi + usable).sin();
    let ddenom = t.mu * abs_xi.cos() - (abs_xi + usable).cos();
    -t.capture_radius * (t.mu * t.mu - 1.0).sqrt() * ddenom / (denom * denom)
}

/// Collision-course branch of the slow-pursuer boundary, evaluated at any
/// aspect angle.
pub fn rho_collision_course(xi: Angle, threat: &PursuerThreat) -> Result<f64> {
    threat.validate()?;
    Ok(collision_course_radius(checked_abs_xi(xi)?, threat))
}

/// Touch-and-go branch of the slow-pursuer boundary, evaluated at any aspect
/// angle.
pub fn rho_touch_and_go(xi: Angle, threat: &PursuerThreat) -> Result<f64> {
    threat.validate()?;
    if threat.mu <= 1.0 {
        return Err(Error::precondition(format!(
            "touch-and-go branch requires mu > 1, got {}",
            threat.mu
        )));
    }
    Ok(touch_and_go_radius(checked_abs_xi(xi)?, threat))
}

/// Boundary radius for a fast pursuer (`mu <= 1`).
pub fn rho_fast(xi: Angle, threat: &PursuerThreat) -> Result<f64> {
    if threat.mu > 1.0 {
        return Err(Error::precondition(format!(
            "rho_fast requires mu <= 1, got {}",
            threat.mu
        )));
    }
    Ok(collision_course_radius(checked_abs_xi(xi)?, threat))
}

/// Positive aspect angle where the collision-course and touch-and-go branches
/// of a slow pursuer meet.
///
/// This is the aspect angle at which the touch-and-go capture happens exactly
/// when the pursuer's range runs out. The angle can be obtuse when
/// `mu² < 1 + r/R`, so it is recovered with `atan2` from both its sine and
/// cosine rather than with `asin` alone.
pub fn xi_crossover(threat: &PursuerThreat) -> Result<Angle> {
    if threat.mu <= 1.0 {
        return Err(Error::precondition(format!(
            "xi_crossover requires mu > 1, got {}",
            threat.mu
        )));
    }
    let (mu, big_r, r) = (threat.mu, threat.range, threat.capture_radius);
    let k = (mu * mu - 1.0 + (r / big_r).powi(2)).sqrt();
    let sin = (big_r + r) * (mu * mu - 1.0).sqrt() / (mu * big_r * k);
    let cos = (mu * mu * big_r - big_r - r) / (mu * big_r * k);
    Ok(Angle::from_radians(sin.atan2(cos)))
}

/// Last aspect angle of the touch-and-go family, `π - acos(1/mu)`.
pub fn xi_max(threat: &PursuerThreat) -> Result<Angle> {
    if threat.mu <= 1.0 {
        return Err(Error::precondition(format!(
            "xi_max requires mu > 1, got {}",
            threat.mu
        )));
    }
    Ok(Angle::from_radians(PI - (1.0 / threat.mu).acos()))
}

/// Boundary radius for a slow pursuer (`mu > 1`), three branches.
pub fn rho_slow(xi: Angle, threat: &PursuerThreat) -> Result<f64> {
    if threat.mu <= 1.0 {
        return Err(Error::precondition(format!(
            "rho_slow requires mu > 1, got {}",
            threat.mu
        )));
    }
    let a = checked_abs_xi(xi)?;
    let xc = xi_crossover(threat)?.radians();
    let xm = xi_max(threat)?.radians();
    Ok(if a <= xc {
        collision_course_radius(a, threat)
    } else if a <= xm {
        touch_and_go_radius(a, threat)
    } else {
        threat.capture_radius
    })
}

/// Engagement-zone boundary radius at aspect angle `xi`. Periodic and even
/// in `xi`, so any finite angle is accepted.
pub fn rho(xi: Angle, threat: &PursuerThreat) -> f64 {
    let a = wrap(xi.radians()).abs();
    if threat.is_fast() {
        collision_course_radius(a, threat)
    } else {
        rho_slow(Angle::from_radians(a), threat).expect("slow pursuer with wrapped angle")
    }
}

/// `dρ/dξ`, used by the planner's constraint Jacobian. One-sided (from the
/// inner branch) at the slow-pursuer branch joins.
pub fn rho_derivative(xi: Angle, threat: &PursuerThreat) -> f64 {
    let w = wrap(xi.radians());
    let a = w.abs();
    let sign = if w < 0.0 { -1.0 } else { 1.0 };
    let d = if threat.is_fast() {
        collision_course_radius_derivative(a, threat)
    } else {
        let xc = xi_crossover(threat).expect("slow").radians();
        let xm = xi_max(threat).expect("slow").radians();
        if a <= xc {
            collision_course_radius_derivative(a, threat)
        } else if a <= xm {
            touch_and_go_radius_derivative(a, threat)
        } else {
            0.0
        }
    };
    sign * d
}

/// Distance from the pursuer minus the boundary radius at the agent's current
/// aspect angle. Positive outside the engagement zone, zero on its boundary.
pub fn signed_clearance(
    agent_pos: Point2,
    agent_heading: Angle,
    threat: &PursuerThreat,
) -> Result<f64> {
    let xi = aspect_angle(agent_pos, agent_heading, threat.position)?;
    Ok((agent_pos - threat.position).norm() - rho(xi, threat))
}

/// Whether the pursuer can capture an agent starting at `agent_pos` and holding
/// `agent_heading`. The boundary belongs to the zone.
pub fn ez_contains(
    agent_pos: Point2,
    agent_heading: Angle,
    threat: &PursuerThreat,
) -> Result<bool> {
    let clearance = signed_clearance(agent_pos, agent_heading, threat)?;
    Ok(clearance <= BOUNDARY_REL_TOL * threat.length_scale())
}

/// Agent start position at aspect angle `xi` and distance `radius` from the
/// pursuer, for an agent heading `heading`.
pub fn boundary_point(threat: &PursuerThreat, heading: Angle, xi: Angle, radius: f64) -> Point2 {
    // Line of sight from agent to pursuer points along heading - xi.
    threat.position + Point2::from_polar(radius, heading.radians() - xi.radians() + PI)
}

/// `n` boundary samples with `ξ` evenly spaced over `[-π, π]` (both ends
/// included, so the curve closes).
pub fn sample_boundary(
    threat: &PursuerThreat,
    agent_heading: Angle,
    n: usize,
) -> Result<Vec<EzBoundarySample>> {
    if n < 3 {
        return Err(Error::argument(format!(
            "need at least 3 boundary samples, got {n}"
        )));
    }
    threat.validate()?;
    let step = 2.0 * PI / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let xi = if i == n - 1 {
                PI
            } else {
                -PI + step * i as f64
            };
            let xi = Angle::from_radians(xi);
            let rho = rho(xi, threat);
            EzBoundarySample {
                xi,
                rho,
                point: boundary_point(threat, agent_heading, xi, rho),
            }
        })
        .collect())
}

/// Earlier cardioid-like zone model, parameterized only by its extreme radii.
pub fn rho_legacy(xi: Angle, rho_max: f64, rho_min: f64) -> Result<f64> {
    if !(rho_min >= 0.0 && rho_max >= rho_min) {
        return Err(Error::argument(format!(
            "legacy model needs rho_max >= rho_min >= 0, got {rho_max} and {rho_min}"
        )));
    }
    Ok((xi.cos() + 1.0) / 2.0 * (rho_max - rho_min) + rho_min)
}

/// Largest `|rho - rho_legacy|` over `samples` aspect angles in `[0, π]`, with
/// the legacy model's endpoints matched to this model's extremes.
pub fn max_legacy_deviation(threat: &PursuerThreat, samples: usize) -> f64 {
    let (hi, lo) = (threat.rho_max(), threat.rho_min());
    (0..samples.max(2))
        .map(|i| {
            let xi = Angle::from_radians(PI * i as f64 / (samples.max(2) - 1) as f64);
            (rho(xi, threat) - rho_legacy(xi, hi, lo).expect("ordered endpoints")).abs()
        })
        .fold(0.0, f64::max)
}
