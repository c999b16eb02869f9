use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use ezpath::oracle::{pursuit_sweep, turret_sweep, SweepReport};
use ezpath::{Point2, PursuerThreat, ScenarioFile, Threat, TurretThreat};
use serde::Serialize;

use crate::output::{cell, Format, OutputDir};
use crate::{Kind, OutputArgs, Status};

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Sweep every threat of this scenario file instead of the flags below.
    #[arg(long, conflicts_with_all = ["kind", "mu"])]
    scenario: Option<PathBuf>,
    #[arg(long, value_enum, requires = "mu")]
    kind: Option<Kind>,
    /// Speed ratios, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    mu: Vec<f64>,
    #[arg(long = "R", default_value_t = 1.0)]
    range: f64,
    /// Capture radius (pursuer).
    #[arg(long = "r", default_value_t = 0.25)]
    capture_radius: f64,
    /// Initial look angles in radians, comma separated (turret).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    theta0: Vec<f64>,
    /// Poses compared per configuration.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Poses closer than this fraction of R to the boundary are redrawn.
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    /// Scale the closed-form pursuit radius by (1 + value) to self-test the harness.
    #[arg(long, hide = true, default_value_t = 0.0)]
    corrupt_rho: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Serialize)]
struct Line {
    threat: Threat,
    samples: usize,
    skipped: usize,
    disagreements: usize,
}

fn threats(args: &VerifyArgs) -> Result<Vec<Threat>> {
    if let Some(path) = &args.scenario {
        let file = ScenarioFile::load(path)?;
        if file.threats.is_empty() {
            bail!("{} has no threats to verify", path.display());
        }
        return Ok(file.threats);
    }
    let Some(kind) = args.kind else {
        bail!("either --scenario or --kind with --mu is required")
    };
    let mut out = Vec::new();
    for &mu in &args.mu {
        match kind {
            Kind::Pursuer => out.push(
                PursuerThreat::new(Point2::ORIGIN, mu, args.range, args.capture_radius)?.into(),
            ),
            Kind::Turret => {
                if args.theta0.is_empty() {
                    bail!("--theta0 is required for a turret sweep");
                }
                for &th in &args.theta0 {
                    out.push(TurretThreat::new(Point2::ORIGIN, th, mu, args.range)?.into());
                }
            }
        }
    }
    Ok(out)
}

pub fn run(args: &VerifyArgs) -> Result<Status> {
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    if !(args.margin.is_finite() && args.margin >= 0.0) {
        bail!("--margin must be nonnegative");
    }
    if !(args.corrupt_rho.is_finite() && args.corrupt_rho > -1.0) {
        bail!("--corrupt-rho must be greater than -1");
    }
    let mut lines = Vec::new();
    for (i, threat) in threats(args)?.into_iter().enumerate() {
        let seed = args.seed.wrapping_add(i as u64);
        let report: SweepReport = match &threat {
            Threat::Pursuer(p) => {
                pursuit_sweep(p, args.samples, seed, args.margin, 1.0 + args.corrupt_rho)?
            }
            Threat::Turret(t) => turret_sweep(t, args.samples, seed, args.margin)?,
        };
        let label = match &threat {
            Threat::Pursuer(p) => {
                format!("pursuer mu={} R={} r={}", p.mu, p.range, p.capture_radius)
            }
            Threat::Turret(t) => format!("turret mu={} R={} theta0={}", t.mu, t.range, t.theta0),
        };
        println!(
            "{label}: {} samples, {} redrawn, {} disagreements",
            report.samples, report.skipped, report.disagreements
        );
        lines.push(Line {
            threat,
            samples: report.samples,
            skipped: report.skipped,
            disagreements: report.disagreements,
        });
    }
    let total: usize = lines.iter().map(|l| l.disagreements).sum();
    println!("total disagreements: {total}");

    if let Some(dir) = &args.output.output_dir {
        let out = OutputDir::create(dir)?;
        let path = match args.output.format.unwrap_or(Format::Csv) {
            Format::Csv => {
                let header = [
                    "kind",
                    "mu",
                    "range",
                    "capture_radius",
                    "theta0",
                    "samples",
                    "skipped",
                    "disagreements",
                ]
                .map(String::from);
                let rows: Vec<Vec<String>> = lines
                    .iter()
                    .map(|l| {
                        let (kind, mu, range, r, th) = match &l.threat {
                            Threat::Pursuer(p) => {
                                ("pursuer", p.mu, p.range, Some(p.capture_radius), None)
                            }
                            Threat::Turret(t) => ("turret", t.mu, t.range, None, Some(t.theta0)),
                        };
                        vec![
                            kind.to_owned(),
                            cell(Some(mu)),
                            cell(Some(range)),
                            cell(r),
                            cell(th),
                            l.samples.to_string(),
                            l.skipped.to_string(),
                            l.disagreements.to_string(),
                        ]
                    })
                    .collect();
                out.write_csv("verify.csv", &header, &rows)?
            }
            Format::Json => out.write_json("verify.json", &lines)?,
        };
        println!("wrote {}", path.display());
    }
    Ok(if total == 0 {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}
