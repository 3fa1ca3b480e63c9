//! The `simulate` and `perturb` pipelines. Both build their output files in
//! memory so that callers can write them or compare them byte for byte.

use std::fs;
use std::path::Path;

use chronodyn::analytic::{magnetic_period_map, osc_drift_period_map};
use chronodyn::chronometry::{period_map_numeric, simultaneity_series, time_map_dynamic, time_map_kinematic, time_map_ratio, Provenance, TimeMap};
use chronodyn::dynamics::{energy_audit, integrate, FieldConfig};
use chronodyn::io::{perturbation_rows, to_json_pretty, write_energy_audit, write_perturbation, write_time_map, write_worldline, BoostRecord, Sidecar};
use chronodyn::perturbation::{expansion_residual, expansion_residual_zero_order, residual_sweep, time_force_mismatch, PerturbationRun};
use chronodyn::worldline::{boost_worldline, uniform_times};
use chronodyn::{Boost, Error, Worldline};
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{Motion, Validated, ValidatedPerturb};

/// One output file: name relative to the scenario directory, and contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: &str, bytes: Vec<u8>) -> Self {
        Artifact { name: name.to_owned(), bytes }
    }

    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        Ok(Artifact::new(name, to_json_pretty(value)?.into_bytes()))
    }
}

/// Writes artifacts into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.name), &a.bytes)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub name: String,
    pub v0: f64,
    pub gamma: f64,
    pub samples: usize,
    pub time_map: TimeMapSummary,
    pub g_agreement: Agreement,
    pub period: Option<PeriodSummary>,
    pub energy: Option<EnergySummary>,
    pub simultaneity: Option<SimultaneitySummary>,
}

#[derive(Debug, Serialize)]
pub struct TimeMapSummary {
    pub method: Provenance,
    pub g_min: f64,
    pub g_max: f64,
    pub t_prime_span: f64,
    pub t_span: f64,
    /// max |∫g dt′ − γ(t′ + v0 x′)| over the samples.
    pub event_map_error: f64,
}

/// max |g_a − g_b| between the methods; `None` where a method is undefined.
#[derive(Debug, Serialize)]
pub struct Agreement {
    pub kinematic_vs_ratio: f64,
    pub kinematic_vs_dynamic: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PeriodSummary {
    pub t_prime: f64,
    /// ∫g dt′ over one period starting at the first sample.
    pub t_numeric: f64,
    pub t_closed_form: f64,
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct EnergySummary {
    pub max_relative_drift: f64,
}

#[derive(Debug, Serialize)]
pub struct SimultaneitySummary {
    pub partner_phase: f64,
    /// max |t₂ − t₁| over the samples.
    pub envelope: f64,
    pub closed_form_amplitude: f64,
}

fn worldline_artifacts(stem: &str, w: &Worldline, b: &Boost) -> Result<[Artifact; 2], CliError> {
    let mut csv = Vec::new();
    write_worldline(w, &mut csv)?;
    let sidecar = Sidecar {
        frame: w.frame().clone(),
        boost: Some(BoostRecord::from(b)),
    };
    Ok([Artifact::new(&format!("{stem}.csv"), csv), Artifact::json(&format!("{stem}.json"), &sidecar)?])
}

/// Runs a scenario and returns its output files. No randomness is involved,
/// so equal inputs give equal bytes.
pub fn simulate(v: &Validated) -> Result<Vec<Artifact>, CliError> {
    let b = &v.boost;
    let grid = &v.spec.integrator;
    let times = || uniform_times(grid.t0, grid.dt, grid.n_steps);
    let (w, field): (Worldline, Option<FieldConfig>) = match &v.motion {
        Motion::Integrated { state, field, config } => (integrate(state, field, config)?.worldline, Some(field.clone())),
        Motion::Cyclotron(p) => (p.worldline(&times())?, Some(p.field())),
        Motion::UniformE(p) => (p.worldline(&times())?, Some(p.field())),
        Motion::OscDrift(p) => (p.worldline(&times())?, None),
    };
    let k = boost_worldline(&w, b)?;

    let kinematic = time_map_kinematic(&w, b)?;
    let ratio = time_map_ratio(&w, b)?;
    let requested = v.spec.outputs.time_map;
    let dynamic = match (&field, requested) {
        (None, Provenance::Dynamic) => {
            return Err(CliError::Config("outputs.time_map: `dynamic` needs a field; this motion has none".into()));
        }
        (None, _) => None,
        (Some(f), Provenance::Dynamic) => Some(time_map_dynamic(&w, f, b)?),
        (Some(f), _) => time_map_dynamic(&w, f, b).ok(),
    };
    let chosen: &TimeMap = match requested {
        Provenance::Kinematic => &kinematic,
        Provenance::Ratio => &ratio,
        Provenance::Dynamic => dynamic.as_ref().expect("computed above"),
    };

    let mut artifacts = Vec::new();
    artifacts.extend(worldline_artifacts("worldline_kprime", &w, b)?);
    artifacts.extend(worldline_artifacts("worldline_k", &k, b)?);
    let mut csv = Vec::new();
    write_time_map(chosen.samples(), &mut csv)?;
    artifacts.push(Artifact::new("time_map.csv", csv));

    let energy = match (&field, v.spec.outputs.energy) {
        (Some(f), true) => {
            let audit = energy_audit(&w, f, &v.particle)?;
            let mut csv = Vec::new();
            write_energy_audit(&audit.rows, &mut csv)?;
            artifacts.push(Artifact::new("energy.csv", csv));
            Some(EnergySummary {
                max_relative_drift: audit.max_relative_drift,
            })
        }
        _ => None,
    };

    let g = chosen.g();
    let first = chosen.samples().first().expect("non-empty");
    let last = chosen.samples().last().expect("non-empty");
    let summary = Summary {
        name: v.spec.name.clone(),
        v0: b.v0(),
        gamma: b.gamma(),
        samples: w.len(),
        time_map: TimeMapSummary {
            method: requested,
            g_min: g.iter().copied().fold(f64::INFINITY, f64::min),
            g_max: g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            t_prime_span: last.t_prime - first.t_prime,
            t_span: last.t - first.t,
            event_map_error: chosen.max_event_map_error(&w)?,
        },
        g_agreement: Agreement {
            kinematic_vs_ratio: kinematic.max_g_discrepancy(&ratio)?,
            kinematic_vs_dynamic: dynamic.as_ref().map(|d| kinematic.max_g_discrepancy(d)).transpose()?,
        },
        period: period_summary(v, &w, field.as_ref())?,
        energy,
        simultaneity: simultaneity_summary(v, &w)?,
    };
    artifacts.push(Artifact::json("summary.json", &summary)?);
    Ok(artifacts)
}

/// Velocity period of the motion in K′ and the closed-form K duration, when
/// the motion is periodic.
fn periods(v: &Validated, field: Option<&FieldConfig>) -> Option<(f64, f64)> {
    let b = &v.boost;
    match &v.motion {
        Motion::Cyclotron(p) => Some(magnetic_period_map(p, b)),
        Motion::OscDrift(p) => Some(osc_drift_period_map(p, b)),
        Motion::Integrated { state, .. } => {
            let f = field?;
            if f.e != chronodyn::Vec3::zeros() || f.b == chronodyn::Vec3::zeros() {
                return None;
            }
            let t_prime = std::f64::consts::TAU * state.u.gamma() * v.particle.m0 / (v.particle.charge.abs() * f.b.norm());
            Some((t_prime, b.gamma() * t_prime))
        }
        Motion::UniformE(_) => None,
    }
}

fn period_summary(v: &Validated, w: &Worldline, field: Option<&FieldConfig>) -> Result<Option<PeriodSummary>, CliError> {
    let Some((t_prime, t_closed_form)) = periods(v, field) else {
        return Ok(None);
    };
    let t0 = w.samples()[0].t;
    match period_map_numeric(w, &v.boost, t0, 1.0, t_prime) {
        Ok(t_numeric) => Ok(Some(PeriodSummary {
            t_prime,
            t_numeric,
            t_closed_form,
            ratio: t_numeric / t_prime,
        })),
        // the sampled span is shorter than one period
        Err(Error::NonPeriodic { mismatch, .. }) if mismatch.is_infinite() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn simultaneity_summary(v: &Validated, w: &Worldline) -> Result<Option<SimultaneitySummary>, CliError> {
    let Motion::Cyclotron(p) = &v.motion else {
        return Ok(None);
    };
    let phase = v.spec.outputs.partner_phase;
    let partner = p.with_alpha(p.alpha() + phase);
    let w2 = partner.worldline(&w.times())?;
    let series = simultaneity_series(w, &w2, &v.boost)?;
    let envelope = series.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
    let b = &v.boost;
    Ok(Some(SimultaneitySummary {
        partner_phase: phase,
        envelope,
        closed_form_amplitude: 2.0 * b.gamma() * b.v0().abs() * p.u0() / p.omega().abs() * (phase / 2.0).sin().abs(),
    }))
}

#[derive(Debug, Serialize)]
pub struct PerturbSummary {
    pub name: String,
    pub v0: f64,
    pub force: String,
    pub samples: usize,
    pub max_correction: f64,
    /// max |m₀ü₁ − time force| along the run.
    pub time_force_mismatch: f64,
    pub expansion_residual: f64,
    pub expansion_residual_zero_order: f64,
    pub sweep: Option<SweepSummary>,
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub v0: Vec<f64>,
    pub residual: Vec<f64>,
    pub exponent: f64,
}

pub fn perturb(v: &ValidatedPerturb) -> Result<Vec<Artifact>, CliError> {
    let s = &v.spec;
    let vec3 = |a: [f64; 3]| chronodyn::Vec3::new(a[0], a[1], a[2]);
    let run = PerturbationRun::solve(
        &v.force,
        (vec3(s.initial.r), vec3(s.initial.u)),
        (vec3(s.perturbation.r), vec3(s.perturbation.u)),
        s.m0,
        &v.grid,
        v.boost.clone(),
    )?;
    let mut csv = Vec::new();
    write_perturbation(&perturbation_rows(&run), &mut csv)?;
    let sweep = match residual_sweep(&v.force, &run, &s.sweep) {
        Ok(sw) => Some(SweepSummary {
            v0: sw.v0,
            residual: sw.residual,
            exponent: sw.exponent,
        }),
        // a vanishing residual has no scaling to fit
        Err(Error::Domain { quantity: "sweep point", .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = PerturbSummary {
        name: s.name.clone(),
        v0: v.boost.v0(),
        force: v.force.name().to_owned(),
        samples: run.zero.len(),
        max_correction: run.correction.r.iter().map(|r| r.norm()).fold(0.0, f64::max),
        time_force_mismatch: time_force_mismatch(&run),
        expansion_residual: expansion_residual(&v.force, &run, &v.boost)?,
        expansion_residual_zero_order: expansion_residual_zero_order(&v.force, &run, &v.boost)?,
        sweep,
    };
    Ok(vec![Artifact::new("perturbation.csv", csv), Artifact::json("perturb_summary.json", &summary)?])
}
