//! Engagement-zone geometry and path planning for a constant-speed planar agent.

pub mod circumnav;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod planner;
pub mod pursuit;
pub mod scenario;
pub mod threat;
pub mod trajectory;
pub mod turret;

pub use circumnav::{
    circumnavigate, percent_difference, standard_specs, CircumnavLabel, CircumnavResult,
    CircumnavSpec,
};
pub use error::{Error, Result};
pub use geometry::{angular_separation, aspect_angle, distance, wrap_angle, Angle, Point2};
pub use planner::{
    check_constraint_jacobian, initialize, plan, resample_and_verify, AgentConfig, Initialization,
    JacobianCheck, PlanResult, PlannerOptions, Scenario, VerificationReport,
};
pub use pursuit::PursuerThreat;
pub use scenario::{OutputConfig, OutputFormat, ScenarioError, ScenarioFile};
pub use threat::Threat;
pub use trajectory::Trajectory;
pub use turret::TurretThreat;
