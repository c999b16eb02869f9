//! Tangent-arc-tangent paths around a single circular keep-out region, the
//! baselines the engagement-zone planner is compared against.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Angle, Point2};
use crate::pursuit::PursuerThreat;
use crate::trajectory::Trajectory;

/// Largest angular step between consecutive arc points of the path polyline.
const ARC_STEP: f64 = 1e-3;

/// Which keep-out radius a baseline uses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircumnavLabel {
    /// Capturability disk, `R + r`.
    Reach,
    /// Largest zone radius, `(1 + μ) R + r`.
    Worst,
    /// Smallest zone radius, `(1 - μ) R + r`.
    Apol,
    Custom(String),
}

impl fmt::Display for CircumnavLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircumnavLabel::Reach => f.write_str("Reach"),
            CircumnavLabel::Worst => f.write_str("Worst"),
            CircumnavLabel::Apol => f.write_str("Apol"),
            CircumnavLabel::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircumnavSpec {
    pub label: CircumnavLabel,
    pub radius: f64,
}

impl CircumnavSpec {
    pub fn new(label: CircumnavLabel, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::argument(format!(
                "circumnavigation radius must be positive, got {radius}"
            )));
        }
        Ok(CircumnavSpec { label, radius })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumnavResult {
    pub t_f: f64,
    /// Tangent point angle on the way in, threat-centered.
    pub theta1: Angle,
    /// Tangent point angle on the way out.
    pub theta2: Angle,
    pub tangent_in: f64,
    pub tangent_out: f64,
    /// Swept arc angle, in `[0, 2π)`.
    pub arc_angle: f64,
    /// Whether the arc is flown clockwise around the threat.
    pub clockwise: bool,
    /// The chord misses the disk; the path is the straight line.
    pub degenerate: bool,
    pub path: Trajectory,
}

/// Minimum time from `a0` to `af` at `speed` without entering the open disk
/// of radius `spec.radius` about `threat_pos`.
pub fn circumnavigate(
    a0: Point2,
    af: Point2,
    threat_pos: Point2,
    spec: &CircumnavSpec,
    speed: f64,
) -> Result<CircumnavResult> {
    let r_hat = spec.radius;
    if !(r_hat.is_finite() && r_hat > 0.0) {
        return Err(Error::argument(format!(
            "circumnavigation radius must be positive, got {r_hat}"
        )));
    }
    if !(speed.is_finite() && speed > 0.0) {
        return Err(Error::argument(format!(
            "speed must be positive, got {speed}"
        )));
    }
    let (p0, pf) = (a0 - threat_pos, af - threat_pos);
    let (d0, df) = (p0.norm(), pf.norm());
    if d0 <= r_hat || df <= r_hat {
        return Err(Error::infeasible(format!(
            "endpoint inside the {} circle of radius {r_hat}",
            spec.label
        )));
    }

    if !chord_enters_disk(p0, pf, r_hat) {
        let path = Trajectory::from_points(&[a0, af], speed)?;
        let chord = (af - a0).norm();
        return Ok(CircumnavResult {
            t_f: chord / speed,
            theta1: Angle::ZERO,
            theta2: Angle::ZERO,
            tangent_in: chord,
            tangent_out: 0.0,
            arc_angle: 0.0,
            clockwise: false,
            degenerate: true,
            path,
        });
    }

    let tangent_in = (d0 * d0 - r_hat * r_hat).sqrt();
    let tangent_out = (df * df - r_hat * r_hat).sqrt();
    let (open0, openf) = ((r_hat / d0).acos(), (r_hat / df).acos());

    let cw_theta1 = p0.angle() - open0;
    let cw_theta2 = pf.angle() + openf;
    let cw_arc = (cw_theta1 - cw_theta2).rem_euclid(TAU);
    let ccw_theta1 = p0.angle() + open0;
    let ccw_theta2 = pf.angle() - openf;
    let ccw_arc = (ccw_theta2 - ccw_theta1).rem_euclid(TAU);

    let clockwise = cw_arc <= ccw_arc + 1e-12;
    let (theta1, theta2, arc_angle) = if clockwise {
        (cw_theta1, cw_theta2, cw_arc)
    } else {
        (ccw_theta1, ccw_theta2, ccw_arc)
    };
    let t_f = (tangent_in + tangent_out + r_hat * arc_angle) / speed;

    let direction = if clockwise { -1.0 } else { 1.0 };
    let steps = ((arc_angle / ARC_STEP).ceil() as usize).max(1);
    let mut points = Vec::with_capacity(steps + 3);
    points.push(a0);
    for i in 0..=steps {
        let angle = theta1 + direction * arc_angle * i as f64 / steps as f64;
        points.push(threat_pos + Point2::from_polar(r_hat, angle));
    }
    points.push(af);
    let path = Trajectory::from_points(&points, speed)?;

    Ok(CircumnavResult {
        t_f,
        theta1: Angle::from_radians(theta1).wrapped(),
        theta2: Angle::from_radians(theta2).wrapped(),
        tangent_in,
        tangent_out,
        arc_angle,
        clockwise,
        degenerate: false,
        path,
    })
}

/// Whether the segment `p0 → pf` passes through the open disk of radius `r`
/// about the origin.
fn chord_enters_disk(p0: Point2, pf: Point2, r: f64) -> bool {
    let d = pf - p0;
    let len2 = d.norm_squared();
    let s = if len2 > 0.0 {
        (-p0.dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p0 + d * s).norm() < r
}

/// Reach, Worst and Apol baselines for `threat`. Apol is left out, with a
/// warning, when its radius is not positive.
pub fn standard_specs(threat: &PursuerThreat) -> Vec<CircumnavSpec> {
    let (mu, big_r, r) = (threat.mu, threat.range, threat.capture_radius);
    let mut specs = vec![
        CircumnavSpec {
            label: CircumnavLabel::Reach,
            radius: big_r + r,
        },
        CircumnavSpec {
            label: CircumnavLabel::Worst,
            radius: (1.0 + mu) * big_r + r,
        },
    ];
    let apol = (1.0 - mu) * big_r + r;
    if apol > 0.0 {
        specs.push(CircumnavSpec {
            label: CircumnavLabel::Apol,
            radius: apol,
        });
    } else {
        log::warn!("omitting Apol baseline: radius (1 - mu) R + r = {apol} is not positive");
    }
    specs
}

/// Relative change of `t_ez` against `t_circ`, in percent. Negative means
/// the engagement-zone plan is faster.
pub fn percent_difference(t_ez: f64, t_circ: f64) -> Result<f64> {
    if !(t_circ.is_finite() && t_circ > 0.0) {
        return Err(Error::argument(format!(
            "baseline time must be positive, got {t_circ}"
        )));
    }
    Ok(100.0 * (t_ez - t_circ) / t_circ)
}
