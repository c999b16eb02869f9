use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{wrap, Angle, Point2};
use crate::oracle;
use crate::pursuit::{self, PursuerThreat};
use crate::turret::{self, TurretThreat};

/// Any threat the planner can route around.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Threat {
    Pursuer(PursuerThreat),
    Turret(TurretThreat),
}

/// Gradient of the signed clearance with respect to agent position and heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceGradient {
    pub position: Point2,
    pub heading: f64,
}

impl Threat {
    pub fn position(&self) -> Point2 {
        match self {
            Threat::Pursuer(p) => p.position,
            Threat::Turret(t) => t.position,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Threat::Pursuer(p) => p.validate(),
            Threat::Turret(t) => t.validate(),
        }
    }

    /// Radius of the disk inside which no heading is safe.
    pub fn keep_out_radius(&self) -> f64 {
        match self {
            Threat::Pursuer(p) => p.capturability_radius(),
            Threat::Turret(t) => t.range,
        }
    }

    /// Characteristic length used to scale tolerances.
    pub fn length_scale(&self) -> f64 {
        match self {
            Threat::Pursuer(p) => p.range + p.capture_radius,
            Threat::Turret(t) => t.range,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Threat::Pursuer(_) => "pursuer",
            Threat::Turret(_) => "turret",
        }
    }

    pub fn clearance(&self, pos: Point2, heading: Angle) -> Result<f64> {
        match self {
            Threat::Pursuer(p) => pursuit::signed_clearance(pos, heading, p),
            Threat::Turret(t) => turret::turret_signed_clearance(pos, heading, t),
        }
    }

    pub fn contains(&self, pos: Point2, heading: Angle) -> Result<bool> {
        match self {
            Threat::Pursuer(p) => pursuit::ez_contains(pos, heading, p),
            Threat::Turret(t) => turret::ez_contains_turret(pos, heading, t),
        }
    }

    /// Brute-force ground truth for [`Threat::contains`].
    pub fn oracle_contains(&self, pos: Point2, heading: Angle) -> Result<bool> {
        match self {
            Threat::Pursuer(p) => oracle::pursuit_capture_possible(pos, heading, p),
            Threat::Turret(t) => oracle::turret_neutralization_possible(pos, heading, t),
        }
    }

    /// Clearance gradient: analytic for pursuers, central differences for
    /// turrets (whose clearance is only piecewise smooth).
    pub fn clearance_gradient(&self, pos: Point2, heading: Angle) -> Result<ClearanceGradient> {
        match self {
            Threat::Pursuer(p) => {
                let to_threat = p.position - pos;
                let d2 = to_threat.norm_squared();
                let xi = Angle::from_radians(wrap(heading.radians() - to_threat.angle()));
                let slope = pursuit::rho_derivative(xi, p);
                let dxi_dpos = Point2::new(-to_threat.y, to_threat.x) * (1.0 / d2);
                let radial = (pos - p.position) * (1.0 / d2.sqrt());
                Ok(ClearanceGradient {
                    position: radial + dxi_dpos * -slope,
                    heading: -slope,
                })
            }
            Threat::Turret(_) => {
                let h = 1e-7 * self.length_scale();
                let dx = Point2::new(h, 0.0);
                let dy = Point2::new(0.0, h);
                let gx = (self.clearance(pos + dx, heading)?
                    - self.clearance(pos - dx, heading)?)
                    / (2.0 * h);
                let gy = (self.clearance(pos + dy, heading)?
                    - self.clearance(pos - dy, heading)?)
                    / (2.0 * h);
                let hp = 1e-7;
                let plus = Angle::from_radians(heading.radians() + hp);
                let minus = Angle::from_radians(heading.radians() - hp);
                let gh = (self.clearance(pos, plus)? - self.clearance(pos, minus)?) / (2.0 * hp);
                Ok(ClearanceGradient {
                    position: Point2::new(gx, gy),
                    heading: gh,
                })
            }
        }
    }
}

impl From<PursuerThreat> for Threat {
    fn from(p: PursuerThreat) -> Self {
        Threat::Pursuer(p)
    }
}

impl From<TurretThreat> for Threat {
    fn from(t: TurretThreat) -> Self {
        Threat::Turret(t)
    }
}
