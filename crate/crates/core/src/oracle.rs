//! Brute-force engagement simulation used as ground truth for the closed-form
//! zones. Nothing here evaluates `rho` or the turret boundary construction;
//! capture is decided by scanning the engagement in time.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{angular_separation, Angle, Point2};
use crate::pursuit::{self, PursuerThreat};
use crate::turret::{self, TurretThreat};

/// Scan resolution and refinement depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Grid points over the pursuit time window.
    pub scan_steps: usize,
    /// Bisection / golden-section iterations when refining a bracket.
    pub refine_iterations: usize,
    /// Turret scan step as a fraction of `R / v_A`.
    pub turret_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            scan_steps: 1000,
            refine_iterations: 60,
            turret_step: 1e-4,
        }
    }
}

/// Earliest capture found by the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureCertificate {
    pub time: f64,
    /// Straight-line distance flown by the pursuer (speed 1), i.e. `time`.
    pub pursuer_path_length: f64,
}

fn check_pose(a0: Point2, heading: Angle, threat_pos: Point2) -> Result<()> {
    if !a0.is_finite() || !heading.radians().is_finite() {
        return Err(Error::domain("non-finite agent pose"));
    }
    if a0 == threat_pos {
        return Err(Error::domain("agent starts on top of the threat"));
    }
    Ok(())
}

/// Minimize `f` over `[lo, hi]` by golden-section search; returns the argmin.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// First time in `(outside, inside]` where `gap <= 0`, given `gap(outside) > 0`
/// and `gap(inside) <= 0`.
fn first_crossing(
    gap: impl Fn(f64) -> f64,
    mut outside: f64,
    mut inside: f64,
    iterations: usize,
) -> f64 {
    for _ in 0..iterations {
        let mid = 0.5 * (outside + inside);
        if gap(mid) <= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Indices of grid local minima (ends included when they qualify).
fn local_minima(values: &[f64]) -> impl Iterator<Item = usize> + '_ {
    let n = values.len();
    (0..n).filter(move |&i| {
        let left = i == 0 || values[i - 1] >= values[i];
        let right = i + 1 == n || values[i + 1] >= values[i];
        left && right
    })
}

pub fn pursuit_capture_certificate_with(
    cfg: &OracleConfig,
    a0: Point2,
    heading: Angle,
    threat: &PursuerThreat,
) -> Result<Option<CaptureCertificate>> {
    check_pose(a0, heading, threat.position)?;
    threat.validate()?;
    let dir = heading.unit() * threat.mu;
    let rel = a0 - threat.position;
    // Pursuer flies at unit speed, so after time t it covers t of its range
    // and is gone once t exceeds R.
    let gap = |t: f64| (rel + dir * t).norm() - t - threat.capture_radius;
    let horizon = threat.range;
    let certificate = |t: f64| {
        Some(CaptureCertificate {
            time: t,
            pursuer_path_length: t,
        })
    };

    if gap(0.0) <= 0.0 {
        return Ok(certificate(0.0));
    }
    let n = cfg.scan_steps.max(2);
    let times: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    let values: Vec<f64> = times.iter().map(|&t| gap(t)).collect();
    if let Some(i) = values.iter().position(|&v| v <= 0.0) {
        let t = first_crossing(gap, times[i - 1], times[i], cfg.refine_iterations);
        return Ok(certificate(t));
    }
    for i in local_minima(&values) {
        let lo = times[i.saturating_sub(1)];
        let hi = times[(i + 1).min(n)];
        let t_min = golden_min(gap, lo, hi, cfg.refine_iterations);
        if gap(t_min) <= 0.0 {
            let t = first_crossing(gap, lo, t_min, cfg.refine_iterations);
            return Ok(certificate(t));
        }
    }
    Ok(None)
}

/// Earliest capture time for an agent holding `heading` from `a0`, if any.
pub fn pursuit_capture_certificate(
    a0: Point2,
    heading: Angle,
    threat: &PursuerThreat,
) -> Result<Option<CaptureCertificate>> {
    pursuit_capture_certificate_with(&OracleConfig::default(), a0, heading, threat)
}

pub fn pursuit_capture_possible_with(
    cfg: &OracleConfig,
    a0: Point2,
    heading: Angle,
    threat: &PursuerThreat,
) -> Result<bool> {
    Ok(pursuit_capture_certificate_with(cfg, a0, heading, threat)?.is_some())
}

/// Whether the pursuer, flying straight at unit speed for at most its range,
/// can get within the capture radius of an agent holding `heading` from `a0`.
pub fn pursuit_capture_possible(
    a0: Point2,
    heading: Angle,
    threat: &PursuerThreat,
) -> Result<bool> {
    pursuit_capture_possible_with(&OracleConfig::default(), a0, heading, threat)
}

pub fn turret_neutralization_possible_with(
    cfg: &OracleConfig,
    a0: Point2,
    heading: Angle,
    threat: &TurretThreat,
) -> Result<bool> {
    check_pose(a0, heading, threat.position)?;
    threat.validate()?;
    let (mu, big_r) = (threat.mu, threat.range);
    let vel = heading.unit() * mu;
    let rel = a0 - threat.position;
    // In time units: >= 0 iff in range and the turret can already be on target.
    let margin = |t: f64| {
        let p = rel + vel * t;
        let in_range = (big_r - p.norm()) / mu;
        let on_target = t - angular_separation(p.angle(), threat.theta0);
        in_range.min(on_target)
    };

    let d0 = rel.norm();
    let t_lo = ((d0 - big_r) / mu).max(0.0);
    let t_hi = (d0 + big_r) / mu;
    let step = cfg.turret_step * big_r / mu;
    let n = (((t_hi - t_lo) / step).ceil() as usize).max(2);
    let times: Vec<f64> = (0..=n)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / n as f64)
        .collect();
    let values: Vec<f64> = times.iter().map(|&t| -margin(t)).collect();
    if values.iter().any(|&v| v <= 0.0) {
        return Ok(true);
    }
    for i in local_minima(&values) {
        let lo = times[i.saturating_sub(1)];
        let hi = times[(i + 1).min(n)];
        let t = golden_min(|t| -margin(t), lo, hi, cfg.refine_iterations);
        if margin(t) >= 0.0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether a turret slewing at its maximum rate can be pointing at an agent
/// holding `heading` from `a0` at some moment the agent is within range.
pub fn turret_neutralization_possible(
    a0: Point2,
    heading: Angle,
    threat: &TurretThreat,
) -> Result<bool> {
    turret_neutralization_possible_with(&OracleConfig::default(), a0, heading, threat)
}

/// Outcome of comparing closed-form membership with the oracle on random poses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepReport {
    /// Poses compared.
    pub samples: usize,
    /// Poses drawn but discarded for lying within the margin of the boundary.
    pub skipped: usize,
    pub disagreements: usize,
}

/// Compare `ez_contains` with the pursuit oracle on `samples` random poses
/// around `threat`, skipping poses closer than `margin * R` to the boundary.
///
/// `rho_scale` multiplies the closed-form radius before classification; any
/// value other than 1 deliberately corrupts the model (harness self-test).
pub fn pursuit_sweep(
    threat: &PursuerThreat,
    samples: usize,
    seed: u64,
    margin: f64,
    rho_scale: f64,
) -> Result<SweepReport> {
    threat.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extent = 1.5 * threat.rho_max();
    let mut report = SweepReport::default();
    while report.samples < samples {
        let radius = extent * rng.random::<f64>().sqrt();
        let offset = Point2::from_polar(radius, rng.random_range(-PI..PI));
        let heading = Angle::from_radians(rng.random_range(-PI..PI));
        let pos = threat.position + offset;
        if radius < 1e-9 {
            report.skipped += 1;
            continue;
        }
        let clearance = pursuit::signed_clearance(pos, heading, threat)?;
        if clearance.abs() < margin * threat.range {
            report.skipped += 1;
            continue;
        }
        let rho = radius - clearance;
        let analytic = radius <= rho * rho_scale;
        let oracle = pursuit_capture_possible(pos, heading, threat)?;
        report.samples += 1;
        if analytic != oracle {
            report.disagreements += 1;
        }
    }
    Ok(report)
}

/// Compare `ez_contains_turret` with the turret oracle on `samples` random
/// poses within `2.5 R` of the turret, skipping poses within `margin * R` of
/// the zone boundary or whose ray grazes the range circle.
pub fn turret_sweep(
    threat: &TurretThreat,
    samples: usize,
    seed: u64,
    margin: f64,
) -> Result<SweepReport> {
    threat.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_width = 2.5 * threat.range;
    let mut report = SweepReport::default();
    while report.samples < samples {
        let offset = Point2::new(
            rng.random_range(-half_width..half_width),
            rng.random_range(-half_width..half_width),
        );
        let heading = Angle::from_radians(rng.random_range(-PI..PI));
        let pos = threat.position + offset;
        let cross_track = offset.cross(heading.unit()).abs();
        if offset.norm() < 1e-9 || (cross_track - threat.range).abs() < margin * threat.range {
            report.skipped += 1;
            continue;
        }
        let clearance = turret::turret_signed_clearance(pos, heading, threat)?;
        if clearance.abs() < margin * threat.range {
            report.skipped += 1;
            continue;
        }
        let analytic = turret::ez_contains_turret(pos, heading, threat)?;
        let oracle = turret_neutralization_possible(pos, heading, threat)?;
        report.samples += 1;
        if analytic != oracle {
            report.disagreements += 1;
        }
    }
    Ok(report)
}
