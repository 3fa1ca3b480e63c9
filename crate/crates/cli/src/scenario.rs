//! Scenario files: one JSON object describing a boost, a particle and either
//! a field to integrate in or a closed-form motion to sample.

use chronodyn::analytic::{CyclotronParams, OscDriftParams, UniformEParams};
use chronodyn::chronometry::Provenance;
use chronodyn::dynamics::{FieldConfig, IntegratorConfig, Method, Particle, ParticleState};
use chronodyn::perturbation::{ForceLaw, TimeGrid};
use chronodyn::{Boost, FrameTag, Vec3, Velocity3};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Bundled cyclotron scenario, also used by the verification battery.
pub const BUNDLED_CYCLOTRON: &str = include_str!("../scenarios/cyclotron.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub boost: BoostSpec,
    pub particle: ParticleSpec,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub analytic: Option<AnalyticSpec>,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostSpec {
    pub v0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    pub m0: f64,
    pub charge: f64,
    /// Initial K′ position; used by field scenarios.
    #[serde(default)]
    pub r0: [f64; 3],
    /// Initial K′ velocity; used by field scenarios.
    #[serde(default)]
    pub u0: [f64; 3],
}

/// Homogeneous static field in K′.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(rename = "E", default)]
    pub e: [f64; 3],
    #[serde(rename = "B", default)]
    pub b: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticSpec {
    /// Circular motion at speed `u0` in a field B along z.
    Cyclotron {
        u0: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    /// Motion from rest in a uniform electric field.
    UniformE {
        #[serde(rename = "E")]
        e: [f64; 3],
        #[serde(default)]
        r0: [f64; 3],
    },
    /// r′ = a sin(ωt′) + u₀t′.
    OscDrift { amplitude: [f64; 3], omega: f64, drift: [f64; 3] },
}

/// Step and count for integration, or the sampling grid of a closed-form
/// motion (where `method` is ignored).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "default_method")]
    pub method: MethodSpec,
    #[serde(default)]
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

fn default_method() -> MethodSpec {
    MethodSpec::Rk4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSpec {
    Rk4,
    Boris,
}

impl From<MethodSpec> for Method {
    fn from(m: MethodSpec) -> Self {
        match m {
            MethodSpec::Rk4 => Method::Rk4,
            MethodSpec::Boris => Method::Boris,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Method whose map is written to `time_map.csv`.
    #[serde(default = "default_time_map")]
    pub time_map: Provenance,
    #[serde(default = "yes")]
    pub energy: bool,
    /// Phase offset of the partner particle used for the simultaneity
    /// envelope of cyclotron scenarios.
    #[serde(default = "default_partner_phase")]
    pub partner_phase: f64,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            time_map: default_time_map(),
            energy: true,
            partner_phase: default_partner_phase(),
        }
    }
}

fn default_time_map() -> Provenance {
    Provenance::Kinematic
}

fn yes() -> bool {
    true
}

fn default_partner_phase() -> f64 {
    std::f64::consts::PI
}

/// The motion a scenario describes, with validated parameters.
#[derive(Clone, Debug)]
pub enum Motion {
    Integrated { state: ParticleState, field: FieldConfig, config: IntegratorConfig },
    Cyclotron(CyclotronParams),
    UniformE(UniformEParams),
    OscDrift(OscDriftParams),
}

/// A parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct Validated {
    pub spec: Scenario,
    pub boost: Boost,
    pub particle: Particle,
    pub motion: Motion,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn config_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

/// Parses JSON text; errors carry the line and column of the offending token.
pub fn parse(text: &str) -> Result<Validated, CliError> {
    let spec: Scenario = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(spec)
}

pub fn validate(spec: Scenario) -> Result<Validated, CliError> {
    if spec.name.is_empty() || spec.name.contains(['/', '\\']) || spec.name == "." || spec.name == ".." {
        return Err(config_err("name", "must be a non-empty file-name-safe string"));
    }
    let boost = Boost::new(spec.boost.v0).map_err(|e| config_err("boost.v0", e))?;
    let particle = Particle::new(spec.particle.m0, spec.particle.charge).map_err(|e| config_err("particle", e))?;
    let grid = &spec.integrator;
    let config = IntegratorConfig::new(grid.method.into(), grid.dt, grid.n_steps).map_err(|e| config_err("integrator", e))?;
    if !grid.t0.is_finite() {
        return Err(config_err("integrator.t0", "must be finite"));
    }
    let motion = match (&spec.field, &spec.analytic) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(CliError::Config("scenario needs exactly one of `field` or `analytic`".into()));
        }
        (Some(f), None) => {
            let u0 = Velocity3::from_vec(vec3(spec.particle.u0)).map_err(|e| config_err("particle.u0", e))?;
            let state = ParticleState::new(grid.t0, vec3(spec.particle.r0), u0, particle, FrameTag::moving())
                .map_err(|e| config_err("particle.r0", e))?;
            if f.e.iter().chain(&f.b).any(|c| !c.is_finite()) {
                return Err(config_err("field", "components must be finite"));
            }
            Motion::Integrated {
                state,
                field: FieldConfig::new(vec3(f.e), vec3(f.b), FrameTag::moving()),
                config,
            }
        }
        (None, Some(a)) => match *a {
            AnalyticSpec::Cyclotron { u0, b, alpha, center } => Motion::Cyclotron(
                CyclotronParams::new(u0, b, alpha, vec3(center), particle.m0, particle.charge).map_err(|e| config_err("analytic", e))?,
            ),
            AnalyticSpec::UniformE { e, r0 } => Motion::UniformE(
                UniformEParams::new(vec3(e), particle.m0, particle.charge, vec3(r0)).map_err(|e| config_err("analytic", e))?,
            ),
            AnalyticSpec::OscDrift { amplitude, omega, drift } => {
                Motion::OscDrift(OscDriftParams::new(vec3(amplitude), omega, vec3(drift)).map_err(|e| config_err("analytic", e))?)
            }
        },
    };
    if !spec.outputs.partner_phase.is_finite() {
        return Err(config_err("outputs.partner_phase", "must be finite"));
    }
    Ok(Validated {
        spec,
        boost,
        particle,
        motion,
    })
}

/// Configuration of the `perturb` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbScenario {
    pub name: String,
    pub boost: BoostSpec,
    pub m0: f64,
    pub force: ForceSpec,
    pub initial: StateSpec,
    pub perturbation: StateSpec,
    pub grid: GridSpec,
    /// v0 values for the residual scaling fit.
    #[serde(default = "default_sweep")]
    pub sweep: Vec<f64>,
}

fn default_sweep() -> Vec<f64> {
    vec![0.001, 0.002, 0.004]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub r: [f64; 3],
    pub u: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceSpec {
    Harmonic {
        k: f64,
    },
    Lorentz {
        charge: f64,
        #[serde(rename = "E", default)]
        e: [f64; 3],
        #[serde(rename = "B", default)]
        b: [f64; 3],
    },
    Constant {
        #[serde(rename = "F")]
        f: [f64; 3],
    },
    Zero,
}

impl ForceSpec {
    pub fn build(&self) -> chronodyn::Result<ForceLaw> {
        match *self {
            ForceSpec::Harmonic { k } => ForceLaw::harmonic(k),
            ForceSpec::Lorentz { charge, e, b } => ForceLaw::lorentz(charge, vec3(e), vec3(b)),
            ForceSpec::Constant { f } => ForceLaw::constant(vec3(f)),
            ForceSpec::Zero => Ok(ForceLaw::zero()),
        }
    }
}

pub struct ValidatedPerturb {
    pub spec: PerturbScenario,
    pub boost: Boost,
    pub force: ForceLaw,
    pub grid: TimeGrid,
}

pub fn parse_perturb(text: &str) -> Result<ValidatedPerturb, CliError> {
    let spec: PerturbScenario = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if spec.name.is_empty() || spec.name.contains(['/', '\\']) || spec.name == "." || spec.name == ".." {
        return Err(config_err("name", "must be a non-empty file-name-safe string"));
    }
    let boost = Boost::new(spec.boost.v0).map_err(|e| config_err("boost.v0", e))?;
    if !(spec.m0.is_finite() && spec.m0 > 0.0) {
        return Err(config_err("m0", "must be finite and > 0"));
    }
    let force = spec.force.build().map_err(|e| config_err("force", e))?;
    let grid = TimeGrid::new(spec.grid.t0, spec.grid.dt, spec.grid.n_steps).map_err(|e| config_err("grid", e))?;
    for (field, s) in [("initial", &spec.initial), ("perturbation", &spec.perturbation)] {
        if s.r.iter().chain(&s.u).any(|c| !c.is_finite()) {
            return Err(config_err(field, "components must be finite"));
        }
    }
    if spec.sweep.len() < 2 || spec.sweep.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
        return Err(config_err("sweep", "needs at least two v0 values in (0, 1)"));
    }
    Ok(ValidatedPerturb {
        spec,
        boost,
        force,
        grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenario_parses() {
        let v = parse(BUNDLED_CYCLOTRON).unwrap();
        assert_eq!(v.spec.boost.v0, 0.6);
        assert!(matches!(v.motion, Motion::Cyclotron(_)));
    }

    #[test]
    fn errors_name_the_field() {
        let bad_v0 = BUNDLED_CYCLOTRON.replace("\"v0\": 0.6", "\"v0\": 1.0");
        let e = parse(&bad_v0).unwrap_err().to_string();
        assert!(e.contains("boost.v0"), "{e}");

        let typo = BUNDLED_CYCLOTRON.replace("\"n_steps\"", "\"nsteps\"");
        let e = parse(&typo).unwrap_err().to_string();
        assert!(e.contains("line"), "{e}");

        let both = BUNDLED_CYCLOTRON.replace("\"analytic\"", "\"field\": {\"B\": [0, 0, 1]}, \"analytic\"");
        assert!(parse(&both).unwrap_err().to_string().contains("exactly one"));
    }
}
