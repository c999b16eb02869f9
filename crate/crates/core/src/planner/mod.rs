//! Minimum-time paths that stay outside every threat's engagement zone.
//!
//! The path is discretized on a uniform time grid with one heading per
//! segment and the terminal time as a free variable. Clearance is required
//! along every segment, not just at the nodes, and the resulting nonlinear
//! program is solved with SQP.

pub(crate) mod sqp;
pub(crate) mod transcription;

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circumnav::{circumnavigate, CircumnavLabel, CircumnavSpec};
use crate::error::{Error, Result};
use crate::geometry::{Angle, Point2};
use crate::threat::Threat;
use crate::trajectory::Trajectory;

use self::sqp::{Nlp, SqpOptions};
use self::transcription::{Obstacle, Transcription};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub start: Point2,
    pub goal: Point2,
    pub speed: f64,
}

/// Warm start for the solver.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// Constant heading along the chord.
    #[default]
    StraightLine,
    /// Tangent-arc-tangent path around the capturability circle of the threat
    /// that blocks the chord most.
    CircumnavReach,
    /// User-supplied polyline, resampled to the node count.
    Custom(Vec<Point2>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerOptions {
    pub n_nodes: usize,
    pub constraint_tolerance: f64,
    pub opt_tolerance: f64,
    pub max_iterations: usize,
    pub initialization: Initialization,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            n_nodes: 100,
            constraint_tolerance: 1e-6,
            opt_tolerance: 1e-8,
            max_iterations: 500,
            initialization: Initialization::StraightLine,
        }
    }
}

impl PlannerOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 3 {
            return Err(Error::argument(format!(
                "n_nodes must be at least 3, got {}",
                self.n_nodes
            )));
        }
        for (name, v) in [
            ("constraint_tolerance", self.constraint_tolerance),
            ("opt_tolerance", self.opt_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::argument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::argument("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub agent: AgentConfig,
    pub threats: Vec<Threat>,
    pub options: PlannerOptions,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let a = &self.agent;
        if !(a.start.is_finite() && a.goal.is_finite()) {
            return Err(Error::domain("agent endpoints must be finite"));
        }
        if a.start == a.goal {
            return Err(Error::argument("start and goal coincide"));
        }
        if !(a.speed.is_finite() && a.speed > 0.0) {
            return Err(Error::argument(format!(
                "agent speed must be positive, got {}",
                a.speed
            )));
        }
        for t in &self.threats {
            t.validate()?;
        }
        self.options.validate()
    }

    /// Reject endpoints strictly inside a keep-out disk, where no heading is safe.
    fn screen_endpoints(&self) -> Result<()> {
        for (i, t) in self.threats.iter().enumerate() {
            for (name, p) in [("start", self.agent.start), ("goal", self.agent.goal)] {
                let d = (p - t.position()).norm();
                if d < t.keep_out_radius() {
                    return Err(Error::infeasible(format!(
                        "{name} {p} is inside the keep-out disk of threat {i} ({} radius {})",
                        t.kind(),
                        t.keep_out_radius()
                    )));
                }
            }
        }
        Ok(())
    }

    fn transcription(&self) -> Transcription<'_> {
        let chord = (self.agent.goal - self.agent.start).norm();
        Transcription {
            obstacle: Obstacle::EngagementZone,
            start: self.agent.start,
            goal: self.agent.goal,
            speed: self.agent.speed,
            segments: self.options.n_nodes - 1,
            threats: &self.threats,
            min_time: 0.5 * chord / self.agent.speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub trajectory: Trajectory,
    pub t_f: f64,
    pub converged: bool,
    /// Smallest clearance over all threats along the whole path (not only at
    /// the nodes). Infinite when there are no threats.
    pub min_clearance: f64,
    pub iterations: usize,
    /// Largest violation of the endpoint and clearance constraints.
    pub violation: f64,
    /// Clearance at each node for each threat, using the outgoing heading
    /// (the incoming one at the goal).
    pub node_clearances: Vec<Vec<f64>>,
}

/// Headings and terminal time of the warm start.
fn initial_guess(scenario: &Scenario, mode: &Initialization) -> Result<Vec<f64>> {
    let a = &scenario.agent;
    let m = scenario.options.n_nodes - 1;
    let chord = a.goal - a.start;
    match mode {
        Initialization::StraightLine => {
            let mut x = vec![chord.angle(); m];
            x.push(chord.norm() / a.speed);
            let tr = scenario.transcription();
            if tr.segment_minima(&x).iter().any(|s| s.clearance < 0.0) {
                // The chord is blocked; a symmetric start would sit on a
                // saddle, so tilt it slightly toward one side.
                for (k, psi) in x[..m].iter_mut().enumerate() {
                    *psi += 1e-3 * (1.0 - 2.0 * k as f64 / (m - 1).max(1) as f64);
                }
            }
            Ok(x)
        }
        Initialization::CircumnavReach => {
            let blocker = scenario
                .threats
                .iter()
                .map(|t| {
                    (
                        t,
                        chord_gap(a.start, a.goal, t.position()) - t.keep_out_radius(),
                    )
                })
                .filter(|(_, gap)| *gap < 0.0)
                .min_by(|x, y| x.1.total_cmp(&y.1));
            let Some((threat, _)) = blocker else {
                info!("no threat blocks the chord; circumnavigation start is the straight line");
                return initial_guess(scenario, &Initialization::StraightLine);
            };
            let spec = CircumnavSpec::new(CircumnavLabel::Reach, threat.keep_out_radius())?;
            match circumnavigate(a.start, a.goal, threat.position(), &spec, a.speed) {
                Ok(c) => headings_from_path(&c.path, m, a.speed),
                Err(e) => {
                    warn!("circumnavigation warm start unavailable ({e}); using the straight line");
                    initial_guess(scenario, &Initialization::StraightLine)
                }
            }
        }
        Initialization::Custom(points) => {
            if points.len() < 2 {
                return Err(Error::argument(
                    "custom initialization needs a polyline of at least two points",
                ));
            }
            let path = Trajectory::from_points(points, a.speed)?;
            headings_from_path(&path, m, a.speed)
        }
    }
}

fn chord_gap(a: Point2, b: Point2, c: Point2) -> f64 {
    let d = b - a;
    let s = ((c - a).dot(d) / d.norm_squared()).clamp(0.0, 1.0);
    (a + d * s - c).norm()
}

fn headings_from_path(path: &Trajectory, segments: usize, speed: f64) -> Result<Vec<f64>> {
    let pts = path.resample_uniform(segments + 1)?;
    let mut x: Vec<f64> = pts.windows(2).map(|w| (w[1] - w[0]).angle()).collect();
    x.push(path.length() / speed);
    Ok(x)
}

fn trajectory_from(tr: &Transcription<'_>, x: &[f64]) -> Result<Trajectory> {
    let headings: Vec<Angle> = x[..tr.segments]
        .iter()
        .map(|&h| Angle::from_radians(h).wrapped())
        .collect();
    Trajectory::from_headings(tr.start, &headings, tr.dt(x), tr.speed)
}

/// Warm-start trajectory for `mode`, chained at constant speed on the
/// scenario's node grid.
pub fn initialize(scenario: &Scenario, mode: &Initialization) -> Result<Trajectory> {
    scenario.validate()?;
    let x = initial_guess(scenario, mode)?;
    trajectory_from(&scenario.transcription(), &x)
}

/// Solve for the minimum-time path. A run that stops without meeting the
/// tolerances returns the best feasible iterate (or the last one) with
/// `converged = false`.
pub fn plan(scenario: &Scenario) -> Result<PlanResult> {
    scenario.validate()?;
    scenario.screen_endpoints()?;
    let tr = scenario.transcription();
    let x0 = initial_guess(scenario, &scenario.options.initialization)?;
    let opts = SqpOptions {
        max_iterations: scenario.options.max_iterations,
        constraint_tolerance: scenario.options.constraint_tolerance,
        opt_tolerance: scenario.options.opt_tolerance,
    };
    let mut x0 = x0;
    let mut disk_iterations = 0;
    if tr.segment_minima(&x0).iter().any(|s| s.clearance < 0.0) {
        // Heading-dependent zones invite local minima where a few segments
        // fly away from a threat to shrink its zone. Routing around the
        // keep-out disks first gives a start on the right side of each threat.
        let disks = Transcription {
            obstacle: Obstacle::KeepOutDisk,
            ..scenario.transcription()
        };
        let pre = sqp::solve(&disks, x0.clone(), &opts);
        disk_iterations = pre.iterations;
        debug!(
            "keep-out disk pass: {} iterations, violation {:.3e}",
            pre.iterations, pre.violation
        );
        if pre.violation <= opts.constraint_tolerance {
            x0 = pre.x;
        }
    }
    let mut out = sqp::solve(&tr, x0, &opts);
    out.iterations += disk_iterations;
    let ev = tr.evaluate(&out.x, false);
    let violation = ev.violation();
    let converged = out.converged && violation <= opts.constraint_tolerance;
    if converged {
        info!(
            "planner converged in {} iterations, t_f = {}",
            out.iterations, out.x[tr.segments]
        );
    } else {
        warn!(
            "planner stopped after {} iterations with violation {violation:.3e}",
            out.iterations
        );
    }
    debug!("final SQP violation {:.3e}", out.violation);

    let trajectory = trajectory_from(&tr, &out.x)?;
    let min_clearance = ev.c_in.iter().copied().fold(f64::INFINITY, f64::min);
    let node_clearances = node_clearances(&scenario.threats, &trajectory);
    Ok(PlanResult {
        t_f: out.x[tr.segments],
        trajectory,
        converged,
        min_clearance,
        iterations: out.iterations,
        violation,
        node_clearances,
    })
}

fn node_clearances(threats: &[Threat], traj: &Trajectory) -> Vec<Vec<f64>> {
    threats
        .iter()
        .map(|t| {
            traj.points
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    let heading = traj.headings[k.min(traj.headings.len() - 1)];
                    t.clearance(p, heading).unwrap_or(f64::NEG_INFINITY)
                })
                .collect()
        })
        .collect()
}

/// Dense re-check of a plan between its nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub factor: usize,
    pub points_checked: usize,
    /// Smallest clearance found; infinite without threats.
    pub worst_clearance: f64,
    pub worst_point: Option<Point2>,
    /// Points far enough from the boundary to be classified by the oracle.
    pub oracle_checked: usize,
    /// Points whose clearance sign contradicts the oracle.
    pub oracle_disagreements: usize,
}

/// Split every segment into `factor` pieces and evaluate clearance and the
/// brute-force oracle at each piece end, with the segment's heading.
pub fn resample_and_verify(
    result: &PlanResult,
    scenario: &Scenario,
    factor: usize,
) -> Result<VerificationReport> {
    if factor < 2 {
        return Err(Error::argument(format!(
            "resampling factor must be at least 2, got {factor}"
        )));
    }
    let tol = scenario.options.constraint_tolerance;
    let traj = &result.trajectory;
    let mut report = VerificationReport {
        factor,
        points_checked: 0,
        worst_clearance: f64::INFINITY,
        worst_point: None,
        oracle_checked: 0,
        oracle_disagreements: 0,
    };
    for (k, heading) in traj.headings.iter().enumerate() {
        let (a, b) = (traj.points[k], traj.points[k + 1]);
        for i in 0..=factor {
            let p = a.lerp(b, i as f64 / factor as f64);
            for threat in &scenario.threats {
                report.points_checked += 1;
                let Ok(c) = threat.clearance(p, *heading) else {
                    report.worst_clearance = f64::NEG_INFINITY;
                    report.worst_point = Some(p);
                    continue;
                };
                if c < report.worst_clearance {
                    report.worst_clearance = c;
                    report.worst_point = Some(p);
                }
                if c.abs() > tol {
                    report.oracle_checked += 1;
                    if threat.oracle_contains(p, *heading)? != (c < 0.0) {
                        report.oracle_disagreements += 1;
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Agreement between the analytic constraint Jacobian and central finite
/// differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub iterates: usize,
    pub entries: usize,
    /// Largest `|fd - analytic| / max(|analytic|, 1)` over all entries.
    pub worst_error: f64,
}

/// Compare Jacobians at `iterates` random perturbations of the circumnavigation
/// warm start: headings moved by up to 0.05 rad, terminal time scaled by up to 5%.
pub fn check_constraint_jacobian(
    scenario: &Scenario,
    iterates: usize,
    seed: u64,
) -> Result<JacobianCheck> {
    scenario.validate()?;
    let tr = scenario.transcription();
    let base = initial_guess(scenario, &Initialization::CircumnavReach)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-6;
    let mut check = JacobianCheck {
        iterates,
        entries: 0,
        worst_error: 0.0,
    };
    for _ in 0..iterates {
        let mut x = base.clone();
        for psi in &mut x[..tr.segments] {
            *psi += rng.random_range(-0.05..0.05);
        }
        x[tr.segments] *= rng.random_range(0.95..1.05);
        let ev = tr.evaluate(&x, true);
        for j in 0..tr.dim() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[j] += h;
            xm[j] -= h;
            let (ep, em) = (tr.evaluate(&xp, false), tr.evaluate(&xm, false));
            let rows = ep
                .c_eq
                .iter()
                .zip(&em.c_eq)
                .enumerate()
                .map(|(i, (a, b))| (ev.j_eq.row(i)[j], a - b));
            let rows = rows.chain(
                ep.c_in
                    .iter()
                    .zip(&em.c_in)
                    .enumerate()
                    .map(|(i, (a, b))| (ev.j_in.row(i)[j], a - b)),
            );
            for (analytic, diff) in rows {
                let fd = diff / (2.0 * h);
                check.entries += 1;
                check.worst_error = check
                    .worst_error
                    .max((fd - analytic).abs() / analytic.abs().max(1.0));
            }
        }
    }
    Ok(check)
}
