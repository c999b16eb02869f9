use std::path::Path;

use anyhow::{bail, Result};
use clap::Args;
use ezpath::pursuit::sample_boundary;
use ezpath::turret::sample_turret_boundary;
use ezpath::{Angle, Point2, PursuerThreat, TurretThreat};
use serde::Serialize;

use crate::output::{cell, Format, OutputDir};
use crate::{Kind, OutputArgs, Status};

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BoundaryArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Speed ratio: agent over pursuer speed, or agent speed over slew rate.
    #[arg(long)]
    mu: f64,
    /// Pursuer range or turret range.
    #[arg(long = "R")]
    range: f64,
    /// Capture radius (pursuer only).
    #[arg(long = "r")]
    capture_radius: Option<f64>,
    /// Initial look angle in radians (turret only).
    #[arg(long)]
    theta0: Option<f64>,
    /// Number of boundary samples.
    #[arg(long, default_value_t = 360)]
    n: usize,
    /// Agent heading in radians.
    #[arg(long, default_value_t = 0.0)]
    heading: f64,
    /// Threat position x.
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    /// Threat position y.
    #[arg(long, default_value_t = 0.0)]
    y: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct Row {
    xi_or_gamma: f64,
    rho_or_x: f64,
    y: Option<f64>,
    world_x: f64,
    world_y: f64,
}

#[derive(Debug, Serialize)]
struct Extrema {
    min_world_distance: f64,
    max_world_distance: f64,
    min_rho_or_x: f64,
    max_rho_or_x: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    kind: &'static str,
    parameters: serde_json::Value,
    samples: usize,
    extrema: Extrema,
}

fn pursuer_rows(args: &BoundaryArgs, heading: Angle) -> Result<(Vec<Row>, serde_json::Value)> {
    let Some(r) = args.capture_radius else {
        bail!("--r is required for a pursuer")
    };
    let threat = PursuerThreat::new(Point2::new(args.x, args.y), args.mu, args.range, r)?;
    let rows = sample_boundary(&threat, heading, args.n)?
        .into_iter()
        .map(|s| Row {
            xi_or_gamma: s.xi.radians(),
            rho_or_x: s.rho,
            y: None,
            world_x: s.point.x,
            world_y: s.point.y,
        })
        .collect();
    Ok((rows, serde_json::to_value(threat)?))
}

fn turret_rows(args: &BoundaryArgs, heading: Angle) -> Result<(Vec<Row>, serde_json::Value)> {
    let Some(theta0) = args.theta0 else {
        bail!("--theta0 is required for a turret")
    };
    let threat = TurretThreat::new(Point2::new(args.x, args.y), theta0, args.mu, args.range)?;
    // Boundary points live in the heading frame; `theta0` is world-frame.
    let local = threat.in_heading_frame(heading);
    let rows = sample_turret_boundary(&local, args.n)?
        .into_iter()
        .map(|b| {
            let (world, _) = b.to_world(&threat, heading);
            Row {
                xi_or_gamma: b.gamma.radians(),
                rho_or_x: b.a0.x,
                y: Some(b.a0.y),
                world_x: world.x,
                world_y: world.y,
            }
        })
        .collect();
    Ok((rows, serde_json::to_value(threat)?))
}

pub fn run(args: &BoundaryArgs) -> Result<Status> {
    if !args.heading.is_finite() {
        bail!("--heading must be finite");
    }
    let heading = Angle::from_radians(args.heading);
    let (rows, parameters) = match args.kind {
        Kind::Pursuer => pursuer_rows(args, heading)?,
        Kind::Turret => turret_rows(args, heading)?,
    };
    let center = Point2::new(args.x, args.y);
    let dist = |r: &Row| (Point2::new(r.world_x, r.world_y) - center).norm();
    let fold = |f: fn(f64, f64) -> f64, init: f64, g: &dyn Fn(&Row) -> f64| {
        rows.iter().map(g).fold(init, f)
    };
    let extrema = Extrema {
        min_world_distance: fold(f64::min, f64::INFINITY, &dist),
        max_world_distance: fold(f64::max, f64::NEG_INFINITY, &dist),
        min_rho_or_x: fold(f64::min, f64::INFINITY, &|r| r.rho_or_x),
        max_rho_or_x: fold(f64::max, f64::NEG_INFINITY, &|r| r.rho_or_x),
    };
    let kind = match args.kind {
        Kind::Pursuer => "pursuer",
        Kind::Turret => "turret",
    };
    let summary = Summary {
        kind,
        parameters,
        samples: rows.len(),
        extrema,
    };

    let out = OutputDir::create(args.output.output_dir.as_deref().unwrap_or(Path::new(".")))?;
    let stem = format!("ez_boundary_{kind}");
    let data = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let header = ["xi_or_gamma", "rho_or_x", "y", "world_x", "world_y"].map(String::from);
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        cell(Some(r.xi_or_gamma)),
                        cell(Some(r.rho_or_x)),
                        cell(r.y),
                        cell(Some(r.world_x)),
                        cell(Some(r.world_y)),
                    ]
                })
                .collect();
            out.write_csv(&format!("{stem}.csv"), &header, &cells)?
        }
        Format::Json => out.write_json(&format!("{stem}.json"), &rows)?,
    };
    let summary_path = out.write_json(&format!("{stem}_summary.json"), &summary)?;
    println!(
        "{} boundary: {} samples, world distance {:.9} to {:.9}",
        kind,
        summary.samples,
        summary.extrema.min_world_distance,
        summary.extrema.max_world_distance
    );
    println!("wrote {} and {}", data.display(), summary_path.display());
    Ok(Status::Ok)
}
