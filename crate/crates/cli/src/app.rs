//! Command-line interface.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chronodyn::chronometry::{time_map_dynamic, time_map_kinematic, time_map_ratio, Provenance};
use chronodyn::dynamics::FieldConfig;
use chronodyn::io::{load_worldline, write_time_map};
use chronodyn::{exec, Boost, FrameTag, Vec3};
use clap::{Parser, Subcommand};

use crate::error::CliError;
use crate::scenario::{parse, parse_perturb, Validated};
use crate::simulate::{perturb, simulate, write_artifacts};
use crate::verify::{criteria, run_battery, Tolerances};

#[derive(Debug, Parser)]
#[command(name = "chronodyn", version, about = "Frame time-course maps for relativistic point charges")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write worldlines, the time map, an energy audit
    /// and a JSON summary to <out>/<scenario name>/.
    Simulate {
        /// Scenario JSON file.
        #[arg(required_unless_present = "batch")]
        config: Option<PathBuf>,
        /// Run every *.json scenario in this directory instead.
        #[arg(long, conflicts_with = "config")]
        batch: Option<PathBuf>,
        #[arg(long, env = "CHRONO_OUT_DIR", default_value = "chrono-out")]
        out: PathBuf,
    },
    /// Run the verification battery; exits 1 if any criterion fails.
    Verify {
        /// List the criteria without running them.
        #[arg(long)]
        list: bool,
        /// Run only these criteria (repeatable or comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Compute the time map of a worldline CSV.
    Timemap {
        /// Worldline CSV; a JSON sidecar next to it sets the frame (default K').
        worldline: PathBuf,
        /// Velocity of the worldline's frame relative to the target frame.
        #[arg(long, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, value_parser = parse_provenance)]
        method: Provenance,
        /// Electric field in the worldline's frame, "x,y,z" (dynamic method).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
        e_field: Option<Vec3>,
        /// Magnetic field in the worldline's frame, "x,y,z" (dynamic method).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_vec3)]
        b_field: Option<Vec3>,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the slow-motion zero-order and correction equations.
    Perturb {
        config: PathBuf,
        #[arg(long, env = "CHRONO_OUT_DIR", default_value = "chrono-out")]
        out: PathBuf,
    },
}

fn parse_provenance(s: &str) -> Result<Provenance, String> {
    s.parse().map_err(|e: chronodyn::Error| e.to_string())
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [x, y, z] if parts.iter().all(|c| c.is_finite()) => Ok(Vec3::new(x, y, z)),
        _ => Err("expected three finite components x,y,z".into()),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Simulate { config, batch, out } => match (config, batch) {
            (Some(path), _) => run_simulate(&path, &out),
            (None, Some(dir)) => run_batch(&dir, &out),
            (None, None) => Err(CliError::Config("a scenario file or --batch directory is required".into())),
        },
        Command::Verify { list, only } => return run_verify(list, &only, &Tolerances::default()),
        Command::Timemap {
            worldline,
            v0,
            method,
            e_field,
            b_field,
            out,
        } => run_timemap(&worldline, v0, method, e_field, b_field, out.as_deref()),
        Command::Perturb { config, out } => run_perturb(&config, &out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: CliError) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn run_simulate(path: &Path, out: &Path) -> Result<(), CliError> {
    let scenario = parse(&read_config(path)?).map_err(|e| in_file(path, e))?;
    let artifacts = simulate(&scenario)?;
    let dir = out.join(&scenario.spec.name);
    write_artifacts(&dir, &artifacts)?;
    println!("{}: wrote {} files to {}", scenario.spec.name, artifacts.len(), dir.display());
    Ok(())
}

/// Runs every scenario in `dir` concurrently. Names must be unique so each
/// scenario writes to its own directory.
fn run_batch(dir: &Path, out: &Path) -> Result<(), CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Config(format!("{}: no *.json scenarios", dir.display())));
    }
    let scenarios: Vec<Validated> = paths
        .iter()
        .map(|p| parse(&read_config(p)?).map_err(|e| in_file(p, e)))
        .collect::<Result<_, _>>()?;
    let mut names = BTreeSet::new();
    for (s, p) in scenarios.iter().zip(&paths) {
        if !names.insert(s.spec.name.as_str()) {
            return Err(CliError::Config(format!("{}: name `{}` is used by another scenario", p.display(), s.spec.name)));
        }
    }
    let results = exec::map_coarse(&scenarios, |s| {
        let artifacts = simulate(s)?;
        write_artifacts(&out.join(&s.spec.name), &artifacts)?;
        Ok::<_, CliError>(artifacts.len())
    });
    let mut first_error = None;
    for (s, r) in scenarios.iter().zip(results) {
        match r {
            Ok(n) => println!("{}: wrote {n} files to {}", s.spec.name, out.join(&s.spec.name).display()),
            Err(e) => {
                eprintln!("{}: {e}", s.spec.name);
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

/// Prints the battery report; returns 0 iff every selected criterion passes.
pub fn run_verify(list: bool, only: &[usize], tol: &Tolerances) -> i32 {
    let all = criteria();
    if list {
        for c in &all {
            println!("{:>2}  {}", c.id, c.title);
        }
        return 0;
    }
    if let Some(bad) = only.iter().find(|id| !all.iter().any(|c| c.id == **id)) {
        eprintln!("error: config error: no criterion {bad}; see `verify --list`");
        return 2;
    }
    let start = Instant::now();
    let outcomes = run_battery(tol, only);
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!("{passed}/{} criteria passed in {:.1} s", outcomes.len(), start.elapsed().as_secs_f64());
    if passed == outcomes.len() {
        0
    } else {
        let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id.to_string()).collect();
        eprintln!("failed criteria: {}", failed.join(", "));
        1
    }
}

/// The other standard frame, for maps out of a worldline's own frame.
fn target_frame(frame: &FrameTag) -> FrameTag {
    if *frame == FrameTag::moving() {
        FrameTag::lab()
    } else if *frame == FrameTag::lab() {
        FrameTag::moving()
    } else {
        FrameTag::new(format!("{}*", frame.as_str()))
    }
}

fn run_timemap(path: &Path, v0: f64, method: Provenance, e: Option<Vec3>, b: Option<Vec3>, out: Option<&Path>) -> Result<(), CliError> {
    let (w, _) = load_worldline(path).map_err(|e| in_file(path, e.into()))?;
    let boost = Boost::with_frames(v0, w.frame().clone(), target_frame(w.frame())).map_err(|e| CliError::Config(format!("--v0: {e}")))?;
    let map = match method {
        Provenance::Kinematic => time_map_kinematic(&w, &boost)?,
        Provenance::Ratio => time_map_ratio(&w, &boost)?,
        Provenance::Dynamic => {
            if e.is_none() && b.is_none() {
                return Err(CliError::Config("--method dynamic needs --e-field and/or --b-field".into()));
            }
            let field = FieldConfig::new(e.unwrap_or_default(), b.unwrap_or_default(), w.frame().clone());
            time_map_dynamic(&w, &field, &boost)?
        }
    };
    let mut csv = Vec::new();
    write_time_map(map.samples(), &mut csv)?;
    match out {
        Some(p) => fs::write(p, csv)?,
        None => std::io::stdout().lock().write_all(&csv)?,
    }
    Ok(())
}

fn run_perturb(path: &Path, out: &Path) -> Result<(), CliError> {
    let config = parse_perturb(&read_config(path)?).map_err(|e| in_file(path, e))?;
    let artifacts = perturb(&config)?;
    let dir = out.join(&config.spec.name);
    write_artifacts(&dir, &artifacts)?;
    println!("{}: wrote {} files to {}", config.spec.name, artifacts.len(), dir.display());
    Ok(())
}
