//! Engagement zone of a stationary turret with a bounded slew rate and a
//! finite range.
//!
//! Units are normalized so the turret slews at 1 rad per unit time and the
//! agent moves at `mu` (length per radian). The turret neutralizes the agent at
//! time `t` if the agent is within range and the turret, starting from look
//! angle `θ₀` and turning the short way round, can be pointing at it by then.
//!
//! The boundary construction works in the heading-aligned frame: turret at
//! the origin, agent moving along `+x`. Every boundary point is the start of an
//! agent that is hit exactly as it leaves the range circle after the turret
//! has slewed through `γ` at full rate.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_separation, wrap, Angle, Point2};
use crate::pursuit::BOUNDARY_REL_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurretThreat {
    pub position: Point2,
    /// Initial look angle, measured from the world `+x` axis. In the
    /// heading-aligned frame it is measured from the agent's heading.
    pub theta0: f64,
    /// Agent speed over maximum slew rate.
    pub mu: f64,
    pub range: f64,
}

impl TurretThreat {
    pub fn new(position: Point2, theta0: f64, mu: f64, range: f64) -> Result<Self> {
        let t = TurretThreat {
            position,
            theta0,
            mu,
            range,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || !self.theta0.is_finite() {
            return Err(Error::argument(
                "turret position and look angle must be finite",
            ));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::argument(format!(
                "turret mu must be > 0, got {}",
                self.mu
            )));
        }
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(Error::argument(format!(
                "turret range must be > 0, got {}",
                self.range
            )));
        }
        Ok(())
    }

    /// The same turret seen from an agent heading `heading`: look angle made
    /// relative to the heading.
    pub fn in_heading_frame(&self, heading: Angle) -> TurretThreat {
        TurretThreat {
            theta0: wrap(self.theta0 - heading.radians()),
            ..*self
        }
    }

    fn look(&self) -> f64 {
        wrap(self.theta0)
    }
}

/// Admissible turret traversal angles: two closed intervals, listed in
/// ascending order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRange {
    pub intervals: [(f64, f64); 2],
}

impl GammaRange {
    pub fn contains(&self, gamma: f64, tol: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(lo, hi)| gamma >= lo - tol && gamma <= hi + tol)
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }
}

/// Traversal angles for which the turret's final look angle points into the
/// exit half of the range circle.
///
/// `cos θ₀ = 0` is handled as the limit of the `cos θ₀ > 0` case, and
/// `θ₀ = π` as the limit of the `sin θ₀ > 0` case.
pub fn gamma_range(theta0: Angle) -> GammaRange {
    let th = wrap(theta0.radians());
    let (s, c) = th.sin_cos();
    let intervals = if c >= 0.0 || th.abs() == FRAC_PI_2 {
        [(-FRAC_PI_2 - th, 0.0), (0.0, FRAC_PI_2 - th)]
    } else if s >= 0.0 {
        [(-PI, FRAC_PI_2 - th), (1.5 * PI - th, PI)]
    } else {
        [(-PI, -1.5 * PI - th), (-FRAC_PI_2 - th, PI)]
    };
    GammaRange { intervals }
}

/// A point on the turret engagement-zone boundary, in the heading-aligned
/// frame with the turret at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurretBoundaryPoint {
    pub gamma: Angle,
    /// Agent start position.
    pub a0: Point2,
    /// Exit point on the range circle where neutralization happens.
    pub af: Point2,
}

impl TurretBoundaryPoint {
    /// Final look angle `θ₀ + γ`, wrapped.
    pub fn exit_look_angle(&self) -> f64 {
        self.af.angle()
    }

    /// Map a heading-frame point to world coordinates.
    pub fn to_world(&self, threat: &TurretThreat, heading: Angle) -> (Point2, Point2) {
        let map = |p: Point2| threat.position + p.rotated(heading.radians());
        (map(self.a0), map(self.af))
    }

    /// Outward unit normal of the boundary curve at this point. At `γ = 0`
    /// (a kink) the radial direction is used.
    pub fn outward_normal(&self, threat: &TurretThreat) -> Point2 {
        let g = self.gamma.radians();
        let sign = if g > 0.0 {
            1.0
        } else if g < 0.0 {
            -1.0
        } else {
            0.0
        };
        let theta_f = threat.theta0 + g;
        let n = Point2::new(
            threat.range * theta_f.cos(),
            threat.range * theta_f.sin() + threat.mu * sign,
        );
        n * (1.0 / n.norm())
    }
}

/// Boundary point for traversal angle `gamma`, with the threat's look angle
/// taken relative to the agent heading (heading along `+x`).
pub fn boundary_point(gamma: Angle, threat: &TurretThreat) -> Result<TurretBoundaryPoint> {
    threat.validate()?;
    let g = gamma.radians();
    if !gamma_range(Angle::from_radians(threat.theta0)).contains(g, 1e-12) {
        return Err(Error::argument(format!(
            "gamma {g} is outside the admissible range for theta0 {}",
            threat.theta0
        )));
    }
    let af = Point2::from_polar(threat.range, threat.theta0 + g);
    let a0 = af - Point2::new(threat.mu * g.abs(), 0.0);
    Ok(TurretBoundaryPoint { gamma, a0, af })
}

/// `n` boundary points sweeping the admissible traversal angles, spaced
/// uniformly in exit look angle from `-π/2` to `π/2` (equivalently in `γ`).
/// The join between the two intervals (`γ = 0`, or `γ = ±π`, which name the
/// same turn) is always one of the samples unless it sits within half a step
/// of either end.
pub fn sample_turret_boundary(threat: &TurretThreat, n: usize) -> Result<Vec<TurretBoundaryPoint>> {
    if n < 3 {
        return Err(Error::argument(format!(
            "need at least 3 boundary samples, got {n}"
        )));
    }
    threat.validate()?;
    let look = threat.look();
    let step = PI / (n - 1) as f64;
    let mut exit_angles: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                FRAC_PI_2
            } else {
                -FRAC_PI_2 + step * i as f64
            }
        })
        .collect();

    let join = if look.cos() >= 0.0 {
        look
    } else {
        wrap(look + PI)
    };
    let offset = join + FRAC_PI_2;
    if offset > 0.5 * step && offset < PI - 0.5 * step {
        let nearest = (offset / step).round() as usize;
        exit_angles[nearest.clamp(1, n - 2)] = join;
    }

    exit_angles
        .into_iter()
        .map(|theta_f| {
            let gamma = if look.cos() >= 0.0 {
                theta_f - look
            } else {
                wrap(theta_f - look)
            };
            boundary_point(Angle::from_radians(gamma), threat)
        })
        .collect()
}

/// Agent pose expressed in the heading-aligned frame of a turret.
struct Encounter {
    x0: f64,
    y0: f64,
    look: f64,
    mu: f64,
    range: f64,
}

impl Encounter {
    fn new(agent_pos: Point2, heading: Angle, threat: &TurretThreat) -> Result<Self> {
        if !agent_pos.is_finite() || !heading.radians().is_finite() {
            return Err(Error::domain("non-finite agent pose"));
        }
        if agent_pos == threat.position {
            return Err(Error::domain(
                "agent coincides with the turret; bearing undefined",
            ));
        }
        let rel = (agent_pos - threat.position).rotated(-heading.radians());
        Ok(Encounter {
            x0: rel.x,
            y0: rel.y,
            look: wrap(threat.look() - heading.radians()),
            mu: threat.mu,
            range: threat.range,
        })
    }

    fn bearing(&self, t: f64) -> f64 {
        let x = self.x0 + self.mu * t;
        if self.y0 == 0.0 && x == 0.0 {
            // Passing through the turret: keep the approach bearing.
            return PI;
        }
        self.y0.atan2(x)
    }

    fn slack(&self, t: f64) -> f64 {
        t - angular_separation(self.bearing(t), self.look)
    }

    /// `max (t - sep(t))` over the times the agent is in range, or `None` if
    /// it never is from now on.
    ///
    /// `t - sep(t)` is smooth except where the bearing crosses the look ray,
    /// so its maximum is at a window end, at that crossing, or where the
    /// bearing rate equals the slew rate.
    fn best_slack(&self) -> Option<f64> {
        let (x0, y0, mu, big_r) = (self.x0, self.y0, self.mu, self.range);
        if y0.abs() > big_r {
            return None;
        }
        let half = (big_r * big_r - y0 * y0).sqrt();
        let t_out = (half - x0) / mu;
        if t_out < 0.0 {
            return None;
        }
        let t_start = ((-half - x0) / mu).max(0.0);
        let mut candidates = vec![t_start, t_out];
        if y0 != 0.0 {
            let s = self.look.sin();
            if s != 0.0 && s.signum() == y0.signum() {
                candidates.push((y0 * self.look.cos() / s - x0) / mu);
            }
            let q = mu * y0.abs() - y0 * y0;
            if q >= 0.0 {
                let root = q.sqrt();
                candidates.push((root - x0) / mu);
                candidates.push((-root - x0) / mu);
            }
        } else if x0 < 0.0 {
            candidates.push(-x0 / mu);
        }
        candidates
            .into_iter()
            .filter(|&t| t >= t_start && t <= t_out)
            .map(|t| self.slack(t))
            .reduce(f64::max)
    }

    fn range_margin(&self, t: f64) -> f64 {
        self.range - (self.x0 + self.mu * t).hypot(self.y0)
    }

    /// `max over t >= 0 of min(mu * slack(t), R - |A(t)|)`. Nonnegative
    /// exactly when the agent can be neutralized, and continuous in the pose
    /// except for rays through the turret itself.
    ///
    /// Between the knots below both terms are monotone, so the maximum is at
    /// a knot or at the single crossing of the two terms inside a piece.
    fn margin(&self) -> f64 {
        let (x0, y0, mu) = (self.x0, self.y0, self.mu);
        let a = |t: f64| mu * self.slack(t);
        let m = |t: f64| a(t).min(self.range_margin(t));
        let d0 = x0.hypot(y0);
        // Past t_hi the range term is below anything attainable at t = 0.
        let floor = (-mu * PI).min(self.range - d0);
        let t_hi = ((self.range + d0 - floor) / mu).max(0.0);
        let mut knots = vec![0.0, t_hi, -x0 / mu];
        if y0 != 0.0 {
            let s = self.look.sin();
            if s != 0.0 {
                knots.push((y0 * self.look.cos() / s - x0) / mu);
            }
            let q = mu * y0.abs() - y0 * y0;
            if q >= 0.0 {
                let root = q.sqrt();
                knots.push((root - x0) / mu);
                knots.push((-root - x0) / mu);
            }
        }
        knots.retain(|t| (0.0..=t_hi).contains(t));
        knots.sort_by(f64::total_cmp);
        knots.dedup();

        let mut best = knots
            .iter()
            .map(|&t| m(t))
            .fold(f64::NEG_INFINITY, f64::max);
        let gap = |t: f64| a(t) - self.range_margin(t);
        for w in knots.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let g_lo = gap(lo);
            if g_lo * gap(hi) >= 0.0 {
                continue;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) * g_lo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(m(lo)).max(m(hi));
        }
        best
    }
}

/// Largest margin (in time units) by which the turret could be pointing at the
/// agent while it is in range, or `None` if the agent's ray never enters the
/// range circle from here on. Nonnegative means the agent can be neutralized.
pub fn neutralization_slack(
    agent_pos: Point2,
    agent_heading: Angle,
    threat: &TurretThreat,
) -> Result<Option<f64>> {
    Ok(Encounter::new(agent_pos, agent_heading, threat)?.best_slack())
}

/// Signed margin to the turret engagement zone: positive outside,
/// nonpositive inside. It is the negated best over future times of the
/// smaller of the turret's aiming margin (scaled to length by `mu`) and the
/// agent's depth inside the range circle, so it varies continuously with the
/// pose except for rays through the turret itself.
pub fn turret_signed_clearance(
    agent_pos: Point2,
    agent_heading: Angle,
    threat: &TurretThreat,
) -> Result<f64> {
    Ok(-Encounter::new(agent_pos, agent_heading, threat)?.margin())
}

/// Whether an agent holding `agent_heading` from `agent_pos` can be
/// neutralized: some future time puts it within range with the turret able to
/// have slewed onto it. This covers both the exit-boundary construction and
/// agents caught while crossing the range circle, including agents aimed at
/// the turret from arbitrarily far away.
pub fn ez_contains_turret(
    agent_pos: Point2,
    agent_heading: Angle,
    threat: &TurretThreat,
) -> Result<bool> {
    let c = turret_signed_clearance(agent_pos, agent_heading, threat)?;
    Ok(c <= BOUNDARY_REL_TOL * threat.range)
}
