use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use ezpath::{
    circumnavigate, percent_difference, plan, resample_and_verify, standard_specs, PlanResult,
    Scenario, ScenarioFile, Threat, VerificationReport,
};
use log::warn;
use serde::Serialize;

use crate::output::{cell, round9, Format, OutputDir};
use crate::{OutputArgs, Status};

/// Dense re-check factor applied to every plan.
const VERIFY_FACTOR: usize = 10;

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Scenario file (JSON, schema version 1).
    scenario: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

struct Loaded {
    file: ScenarioFile,
    scenario: Scenario,
    stem: String,
    out: OutputDir,
    formats: Vec<Format>,
}

fn load(args: &PlanArgs) -> Result<Loaded> {
    let file = ScenarioFile::load(&args.scenario)?;
    let scenario = file.to_scenario();
    let config = file.output();
    let dir = args.output.output_dir.clone().unwrap_or_else(|| {
        let base = args.scenario.parent().unwrap_or(Path::new("."));
        if config.directory.is_absolute() {
            config.directory.clone()
        } else {
            base.join(&config.directory)
        }
    });
    let formats = match args.output.format {
        Some(f) => vec![f],
        None => config.formats.iter().map(|&f| f.into()).collect(),
    };
    let stem = args.scenario.file_stem().map_or_else(
        || "scenario".to_owned(),
        |s| s.to_string_lossy().into_owned(),
    );
    Ok(Loaded {
        out: OutputDir::create(&dir)?,
        file,
        scenario,
        stem,
        formats,
    })
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    t: f64,
    x: f64,
    y: f64,
    psi: f64,
    clearance: Vec<f64>,
}

fn trajectory_rows(result: &PlanResult) -> Vec<TrajectoryRow> {
    let traj = &result.trajectory;
    (0..traj.len())
        .map(|k| TrajectoryRow {
            t: traj.times[k],
            x: traj.points[k].x,
            y: traj.points[k].y,
            psi: traj.headings[k.min(traj.headings.len() - 1)].radians(),
            clearance: result.node_clearances.iter().map(|c| c[k]).collect(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct PlanSummary<'a> {
    scenario: String,
    t_f: f64,
    converged: bool,
    min_clearance: f64,
    iterations: usize,
    violation: f64,
    n_nodes: usize,
    verification: &'a VerificationReport,
}

fn write_plan(
    loaded: &Loaded,
    result: &PlanResult,
    report: &VerificationReport,
) -> Result<Vec<PathBuf>> {
    let rows = trajectory_rows(result);
    let name = format!("{}_trajectory", loaded.stem);
    let mut written = Vec::new();
    for format in &loaded.formats {
        written.push(match format {
            Format::Csv => {
                let mut header: Vec<String> = ["t", "x", "y", "psi"].map(String::from).to_vec();
                header.extend((0..loaded.scenario.threats.len()).map(|i| format!("clearance_{i}")));
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let mut c = vec![
                            cell(Some(r.t)),
                            cell(Some(r.x)),
                            cell(Some(r.y)),
                            cell(Some(r.psi)),
                        ];
                        c.extend(r.clearance.iter().map(|&v| cell(Some(v))));
                        c
                    })
                    .collect();
                loaded
                    .out
                    .write_csv(&format!("{name}.csv"), &header, &cells)?
            }
            Format::Json => loaded.out.write_json(&format!("{name}.json"), &rows)?,
        });
    }
    let summary = PlanSummary {
        scenario: loaded.stem.clone(),
        t_f: result.t_f,
        converged: result.converged,
        min_clearance: result.min_clearance,
        iterations: result.iterations,
        violation: result.violation,
        n_nodes: loaded.file.to_scenario().options.n_nodes,
        verification: report,
    };
    written.push(
        loaded
            .out
            .write_json(&format!("{}_result.json", loaded.stem), &summary)?,
    );
    Ok(written)
}

fn solve(loaded: &Loaded) -> Result<(PlanResult, VerificationReport)> {
    let result = plan(&loaded.scenario)?;
    let report = resample_and_verify(&result, &loaded.scenario, VERIFY_FACTOR)?;
    if !result.converged {
        warn!("planner did not converge; writing the best iterate found");
    }
    Ok((result, report))
}

fn status(result: &PlanResult) -> Status {
    if result.converged {
        Status::Ok
    } else {
        Status::NotConverged
    }
}

pub fn run_plan(args: &PlanArgs) -> Result<Status> {
    let loaded = load(args)?;
    let (result, report) = solve(&loaded)?;
    let written = write_plan(&loaded, &result, &report)?;
    println!(
        "t_f = {:?}  converged = {}  iterations = {}  min clearance = {:?}",
        round9(result.t_f),
        result.converged,
        result.iterations,
        round9(result.min_clearance)
    );
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(status(&result))
}

#[derive(Debug, Serialize)]
struct CompareRow {
    baseline: String,
    r_hat: f64,
    t_circumnav: f64,
    t_ez: f64,
    percent_difference: f64,
}

pub fn run_compare(args: &PlanArgs) -> Result<Status> {
    let loaded = load(args)?;
    let pursuer = match loaded.scenario.threats.as_slice() {
        [Threat::Pursuer(p)] => *p,
        _ => bail!("compare needs a scenario with exactly one pursuer threat"),
    };
    let (result, report) = solve(&loaded)?;
    let agent = &loaded.scenario.agent;
    let mut rows = Vec::new();
    for spec in standard_specs(&pursuer) {
        let c = circumnavigate(
            agent.start,
            agent.goal,
            pursuer.position,
            &spec,
            agent.speed,
        )
        .with_context(|| format!("{} baseline", spec.label))?;
        rows.push(CompareRow {
            baseline: spec.label.to_string(),
            r_hat: spec.radius,
            t_circumnav: c.t_f,
            t_ez: result.t_f,
            percent_difference: percent_difference(result.t_f, c.t_f)?,
        });
    }

    println!(
        "{:<8} {:>14} {:>14} {:>14} {:>12}",
        "baseline", "R_hat", "t_circumnav", "t_ez", "% diff"
    );
    for r in &rows {
        println!(
            "{:<8} {:>14} {:>14} {:>14} {:>12}",
            r.baseline,
            cell(Some(r.r_hat)),
            cell(Some(r.t_circumnav)),
            cell(Some(r.t_ez)),
            format!("{:+.2}", r.percent_difference)
        );
    }
    if !result.converged {
        println!("note: the EZ plan did not converge");
    }

    let name = format!("{}_compare", loaded.stem);
    for format in &loaded.formats {
        let path = match format {
            Format::Csv => {
                let header = [
                    "baseline",
                    "r_hat",
                    "t_circumnav",
                    "t_ez",
                    "percent_difference",
                ]
                .map(String::from);
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.baseline.clone(),
                            cell(Some(r.r_hat)),
                            cell(Some(r.t_circumnav)),
                            cell(Some(r.t_ez)),
                            cell(Some(r.percent_difference)),
                        ]
                    })
                    .collect();
                loaded
                    .out
                    .write_csv(&format!("{name}.csv"), &header, &cells)?
            }
            Format::Json => loaded.out.write_json(&format!("{name}.json"), &rows)?,
        };
        println!("wrote {}", path.display());
    }
    let written = write_plan(&loaded, &result, &report)?;
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(status(&result))
}
