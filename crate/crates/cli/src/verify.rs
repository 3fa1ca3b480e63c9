//! The verification battery: every physical law the toolkit implements,
//! checked against closed forms or independent numerical oracles at pinned
//! tolerances. Random draws use fixed ChaCha seeds so runs are repeatable.

use std::f64::consts::{PI, TAU};
use std::fmt;

use chronodyn::analytic::{
    electric_proper_time, electric_time_map, magnetic_half_period_map, magnetic_period_map, osc_drift_period_map, simultaneity_difference,
    uniform_e_state, CyclotronParams, OscDriftParams, UniformEParams,
};
use chronodyn::chronometry::{index_independence_report, period_map_numeric, simultaneity_series, time_map_dynamic, time_map_kinematic, time_map_ratio};
use chronodyn::dynamics::{energy_audit, integrate, FieldConfig, IntegratorConfig, Method, Particle, ParticleState};
use chronodyn::exec;
use chronodyn::perturbation::{correction_solve, crossing_frequency, residual_sweep, zero_order_solve, ForceLaw, PerturbationRun, TimeGrid};
use chronodyn::quadrature::interpolate;
use chronodyn::spacetime::{inverse_kinematic_g, kinematic_g, velocity_addition_x};
use chronodyn::worldline::uniform_times;
use chronodyn::{Boost, FrameTag, Vec3, Velocity3, Worldline};
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::scenario::{parse, BUNDLED_CYCLOTRON};
use crate::simulate::simulate;

/// Pass thresholds for every check in the battery.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    pub reciprocity: f64,
    pub g_agreement: f64,
    pub index_spread: f64,
    pub period_map: f64,
    pub half_period: f64,
    pub half_period_amplitude: f64,
    pub simultaneity: f64,
    pub simultaneity_frequency: f64,
    pub electric_velocity: f64,
    pub proper_time: f64,
    pub energy_analytic: f64,
    pub energy_halving_ratio: f64,
    pub osc_drift_period: f64,
    pub superposition: f64,
    pub homogeneous_floor: f64,
    pub harmonic_frequency: f64,
    pub residual_exponent: f64,
    pub cyclotron_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            reciprocity: 1e-12,
            g_agreement: 1e-9,
            index_spread: 1e-9,
            period_map: 1e-9,
            half_period: 1e-9,
            half_period_amplitude: 1e-6,
            simultaneity: 1e-12,
            simultaneity_frequency: 1e-6,
            electric_velocity: 1e-8,
            proper_time: 1e-10,
            energy_analytic: 1e-10,
            energy_halving_ratio: 12.0,
            osc_drift_period: 1e-9,
            superposition: 1e-10,
            homogeneous_floor: 1e-14,
            harmonic_frequency: 1e-6,
            residual_exponent: 0.9,
            cyclotron_ratio: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    /// Passes when the measured value is strictly below the bound.
    Below(f64),
    /// Passes when the measured value is at least the bound.
    AtLeast(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            label: label.into(),
            measured,
            bound: Bound::Below(bound),
        }
    }

    fn at_least(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check {
            label: label.into(),
            measured,
            bound: Bound::AtLeast(bound),
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Below(b) => self.measured < b,
            Bound::AtLeast(b) => self.measured >= b,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Bound::Below(b) => write!(f, "{} = {:.3e} (< {:e})", self.label, self.measured, b),
            Bound::AtLeast(b) => write!(f, "{} = {:.4} (>= {})", self.label, self.measured, b),
        }
    }
}

type Runner = fn(&Tolerances) -> Result<Vec<Check>, CliError>;

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    run: Runner,
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, run| Criterion { id, title, run };
    vec![
        c(1, "reciprocity of forward and inverse time rates", reciprocity as Runner),
        c(2, "kinematic, ratio and 4-force time maps agree", three_way),
        c(3, "cyclotron period maps to gamma T'", period_map),
        c(4, "cyclotron half-period map and its oscillation", half_period),
        c(5, "simultaneity offset of two orbiting charges", simultaneity),
        c(6, "uniform electric field velocity, proper time and rate sign", electric),
        c(7, "energy conservation", energy),
        c(8, "oscillating-drift period map", osc_drift),
        c(9, "slow-motion correction equation", perturbation),
        c(10, "deterministic scenario output", determinism),
    ]
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {}", self.id, self.title)?;
        if let Some(e) = &self.error {
            return write!(f, ": error: {e}");
        }
        let details: Vec<String> = self
            .checks
            .iter()
            .map(|c| if c.passed() { c.to_string() } else { format!("{c} FAILED") })
            .collect();
        write!(f, ": {}", details.join("; "))
    }
}

/// Runs the selected criteria (all when `only` is empty), in id order.
pub fn run_battery(tol: &Tolerances, only: &[usize]) -> Vec<Outcome> {
    let selected: Vec<Criterion> = criteria().into_iter().filter(|c| only.is_empty() || only.contains(&c.id)).collect();
    exec::map_coarse(&selected, |c| match (c.run)(tol) {
        Ok(checks) => Outcome {
            id: c.id,
            title: c.title,
            checks,
            error: None,
        },
        Err(e) => Outcome {
            id: c.id,
            title: c.title,
            checks: Vec::new(),
            error: Some(e.to_string()),
        },
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Analytic cyclotron orbit sampled `per_period` times per period.
fn orbit(p: &CyclotronParams, periods: usize, per_period: usize) -> Result<Worldline, CliError> {
    Ok(p.worldline(&uniform_times(0.0, p.period() / per_period as f64, periods * per_period))?)
}

fn reciprocity(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(1);
    let draws: Vec<(f64, f64)> = (0..10_000).map(|_| (r.random_range(-0.99..=0.99), r.random_range(-0.999_999..0.999_999))).collect();
    let errs = exec::try_map(&draws, |&(v0, ux_prime)| {
        let b = Boost::new(v0)?;
        let ux = velocity_addition_x(ux_prime, v0)?;
        Ok::<_, chronodyn::Error>((kinematic_g(ux_prime, &b)? * inverse_kinematic_g(ux, &b)? - 1.0).abs())
    })?;
    Ok(vec![Check::below("max |g(u') g_inv(u) - 1| over 10^4 draws", max_of(errs), tol.reciprocity)])
}

fn three_way(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(2);
    let mut cases: Vec<(Worldline, FieldConfig, Boost)> = Vec::new();
    for i in 0..4 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let p = CyclotronParams::new(r.random_range(0.05..0.95), sign * r.random_range(0.5..2.0), r.random_range(0.0..TAU), Vec3::new(0.3, -0.2, 0.1), 1.0, 1.0)?;
        cases.push((orbit(&p, 2, 1000)?, p.field(), Boost::new(r.random_range(-0.95..0.95))?));
    }
    for _ in 0..2 {
        let e = Vec3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let p = UniformEParams::new(e, 1.0, -1.0, Vec3::zeros())?;
        let span = 3.0 / p.accel().norm();
        cases.push((p.worldline(&uniform_times(-span, span / 1000.0, 2000))?, p.field(), Boost::new(r.random_range(-0.95..0.95))?));
    }
    let results = exec::try_map_coarse(&cases, |(w, f, b)| {
        let kin = time_map_kinematic(w, b)?;
        let ratio = time_map_ratio(w, b)?;
        let dynamic = time_map_dynamic(w, f, b)?;
        let agreement = max_of([kin.max_g_discrepancy(&ratio)?, kin.max_g_discrepancy(&dynamic)?, ratio.max_g_discrepancy(&dynamic)?]);
        let spread = index_independence_report(w, f, b)?.max_spread;
        Ok::<_, chronodyn::Error>((agreement, spread))
    })?;
    Ok(vec![
        Check::below("max pairwise |g_a - g_b| (4 cyclotron, 2 uniform-E)", max_of(results.iter().map(|r| r.0)), tol.g_agreement),
        Check::below("max component spread of g_i", max_of(results.iter().map(|r| r.1)), tol.index_spread),
    ])
}

fn period_map(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(3);
    let cases: Vec<(f64, f64, f64, Vec<f64>)> = (0..10)
        .map(|_| {
            let v0 = r.random_range(-0.95..0.95);
            let u0 = r.random_range(0.05..0.95);
            let alpha = r.random_range(0.0..TAU);
            let t0s = (0..10).map(|_| r.random_range(0.0..1.0)).collect();
            (v0, u0, alpha, t0s)
        })
        .collect();
    let errs = exec::try_map_coarse(&cases, |(v0, u0, alpha, t0s)| {
        let p = CyclotronParams::new(*u0, 1.0, *alpha, Vec3::zeros(), 1.0, 1.0)?;
        let b = Boost::new(*v0)?;
        let w = orbit(&p, 2, 1000)?;
        let (_, expected) = magnetic_period_map(&p, &b);
        let mut worst: f64 = 0.0;
        for s in t0s {
            let t = period_map_numeric(&w, &b, s * p.period(), 1.0, p.period())?;
            worst = worst.max((t / expected - 1.0).abs());
        }
        Ok::<_, CliError>(worst)
    })?;
    Ok(vec![Check::below("max relative |int g dt' - gamma T'| (10 orbits x 10 starts)", max_of(errs), tol.period_map)])
}

fn half_period(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(4);
    let cases: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|i| {
            let sign = if i == 1 { -1.0 } else { 1.0 };
            (r.random_range(-0.95..0.95), r.random_range(0.1..0.95), sign * r.random_range(0.5..2.0), r.random_range(0.0..TAU))
        })
        .collect();
    const N: usize = 64;
    let results = exec::try_map_coarse(&cases, |&(v0, u0, bz, alpha)| {
        let p = CyclotronParams::new(u0, bz, alpha, Vec3::zeros(), 1.0, 1.0)?;
        let b = Boost::new(v0)?;
        let w = orbit(&p, 2, 1000)?;
        let tp = p.period();
        let mut worst: f64 = 0.0;
        let (mut sin_sum, mut cos_sum) = (0.0, 0.0);
        for k in 0..N {
            let t0 = tp * k as f64 / N as f64;
            let dt = period_map_numeric(&w, &b, t0, 0.5, tp)?;
            worst = worst.max((dt - magnetic_half_period_map(&p, &b, t0)).abs());
            let phase = p.omega() * t0;
            sin_sum += dt * phase.sin();
            cos_sum += dt * phase.cos();
        }
        // uniform samples over one period make the sinusoid basis orthogonal
        let amplitude = 2.0 / N as f64 * sin_sum.hypot(cos_sum);
        let expected = b.gamma() * tp / 2.0 * (2.0 / PI) * v0.abs() * u0;
        Ok::<_, CliError>((worst, (amplitude / expected - 1.0).abs()))
    })?;
    Ok(vec![
        Check::below("max |numeric - closed-form half-period|", max_of(results.iter().map(|r| r.0)), tol.half_period),
        Check::below("max relative amplitude error of fitted oscillation", max_of(results.iter().map(|r| r.1)), tol.half_period_amplitude),
    ])
}

fn simultaneity(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(5);
    let p1 = CyclotronParams::new(r.random_range(0.1..0.9), r.random_range(0.5..2.0), r.random_range(0.0..TAU), Vec3::new(1.0, 0.5, 0.0), 1.0, 1.0)?;
    let p2 = p1.with_alpha(p1.alpha() + r.random_range(0.5..3.0));
    let b = Boost::new(r.random_range(0.2..0.9))?;
    let periods = 3;
    let w1 = orbit(&p1, periods, 1000)?;
    let w2 = orbit(&p2, periods, 1000)?;
    let series = simultaneity_series(&w1, &w2, &b)?;
    let mut worst: f64 = 0.0;
    for (t, d) in &series {
        worst = worst.max((d - simultaneity_difference(&p1, &p2, &b, *t)?).abs());
    }
    let ts: Vec<f64> = series.iter().map(|s| s.0).collect();
    let ds: Vec<f64> = series.iter().map(|s| s.1).collect();
    let mut crossings = Vec::new();
    for i in 0..ds.len() - 1 {
        if ds[i] * ds[i + 1] < 0.0 {
            let (mut lo, mut hi) = (ts[i], ts[i + 1]);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if interpolate(&ts, &ds, mid) * ds[i] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    let cycles_per_period = crossings.len() as f64 / (2.0 * periods as f64);
    let omega = if crossings.len() >= 2 {
        PI * (crossings.len() - 1) as f64 / (crossings[crossings.len() - 1] - crossings[0])
    } else {
        f64::NAN
    };
    Ok(vec![
        Check::below("max |boost-and-subtract - closed form|", worst, tol.simultaneity),
        Check::below("|sign cycles per orbital period - 1|", (cycles_per_period - 1.0).abs(), 1e-12),
        Check::below("relative |crossing frequency - omega'|", (omega / p1.omega().abs() - 1.0).abs(), tol.simultaneity_frequency),
    ])
}

fn electric(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(6);
    let e = Vec3::new(1.2, -0.5, 0.3);
    let p = UniformEParams::new(e, 1.0, 1.0, Vec3::zeros())?;
    let a = p.accel().norm();
    let n = 1000;
    let state = ParticleState::new(0.0, Vec3::zeros(), Velocity3::zero(), Particle::new(1.0, 1.0)?, FrameTag::moving())?;
    let traj = integrate(&state, &p.field(), &IntegratorConfig::new(Method::Rk4, 3.0 / a / n as f64, n)?)?;
    let mut du: f64 = 0.0;
    let mut dtau: f64 = 0.0;
    for (s, tau) in traj.worldline.samples().iter().zip(&traj.proper_time) {
        du = du.max((s.u - uniform_e_state(&p, s.t).1).norm());
        dtau = dtau.max((tau - electric_proper_time(&p, s.t)).abs());
    }

    let draws: Vec<(f64, Vec3, f64)> = (0..10_000)
        .map(|_| {
            let v0 = r.random_range(0.01..0.99);
            let a = Vec3::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
            (v0, a, r.random_range(-3.0..3.0))
        })
        .collect();
    let violations = exec::try_map(&draws, |&(v0, a, t)| {
        let p = UniformEParams::new(a, 1.0, 1.0, Vec3::zeros())?;
        let b = Boost::new(v0)?;
        let excess = electric_time_map(&p, &b, t) - b.gamma();
        let expected = (a.x * t).signum();
        // a_x t' = 0 to rounding leaves the sign undetermined
        Ok::<_, chronodyn::Error>(((a.x * t).abs() > 1e-9 && excess.signum() != expected) as u32)
    })?;
    Ok(vec![
        Check::below("max |u_RK4 - u_exact| (10^3 steps, |a|t' in [0,3])", du, tol.electric_velocity),
        Check::below("max |tau - asinh(|a|t')/|a||", dtau, tol.proper_time),
        Check::below("sign-law violations in 10^4 draws", violations.iter().sum::<u32>() as f64, 0.5),
    ])
}

fn energy(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let p = UniformEParams::new(Vec3::new(0.7, 0.4, -0.2), 1.0, 1.0, Vec3::new(0.1, 0.0, 0.0))?;
    let w = p.worldline(&uniform_times(-4.0, 0.004, 2000))?;
    let analytic = energy_audit(&w, &p.field(), &Particle::new(1.0, 1.0)?)?.max_relative_drift;

    let field = FieldConfig::new(Vec3::new(0.3, 0.0, 0.1), Vec3::new(0.0, 0.2, 1.5), FrameTag::moving());
    let particle = Particle::new(1.0, 1.0)?;
    let state = ParticleState::new(0.0, Vec3::zeros(), Velocity3::new(0.1, 0.6, 0.0)?, particle, FrameTag::moving())?;
    let span = 20.0;
    let drifts = [100usize, 200, 400]
        .iter()
        .map(|&n| {
            let traj = integrate(&state, &field, &IntegratorConfig::new(Method::Rk4, span / n as f64, n)?)?;
            Ok(energy_audit(&traj.worldline, &field, &particle)?.max_relative_drift)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    let ratio = (drifts[0] / drifts[1]).min(drifts[1] / drifts[2]);
    Ok(vec![
        Check::below("analytic uniform-E relative drift of E+U", analytic, tol.energy_analytic),
        Check::at_least("min RK4 drift reduction per step halving", ratio, tol.energy_halving_ratio),
    ])
}

fn osc_drift(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(8);
    let mut unit = || {
        let v = Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        v / v.norm().max(1e-3)
    };
    let dirs: Vec<(Vec3, Vec3)> = (0..10).map(|_| (unit(), unit())).collect();
    let mut r = rng(9);
    let cases: Vec<(Vec3, Vec3, f64, f64, f64, f64)> = dirs
        .into_iter()
        .map(|(da, dd)| {
            let omega = r.random_range(0.5..3.0);
            let swing = r.random_range(0.05..0.5);
            let drift = r.random_range(0.0..0.4);
            (da * swing / omega, dd * drift, omega, r.random_range(-0.95..0.95), r.random_range(0.0..1.0), 0.0)
        })
        .collect();
    let errs = exec::try_map_coarse(&cases, |&(amplitude, drift, omega, v0, s, _)| {
        let p = OscDriftParams::new(amplitude, omega, drift)?;
        let b = Boost::new(v0)?;
        let w = p.worldline(&uniform_times(0.0, p.period() / 1000.0, 2000))?;
        let t = period_map_numeric(&w, &b, s * p.period(), 1.0, p.period())?;
        Ok::<_, CliError>((t / osc_drift_period_map(&p, &b).1 - 1.0).abs())
    })?;
    Ok(vec![Check::below("max relative |int g dt' - gamma(1+v0 u0x)T'| (10 sets)", max_of(errs), tol.osc_drift_period)])
}

/// A nonlinear force with random coefficients and no analytic Jacobians.
fn random_force(r: &mut ChaCha8Rng) -> ForceLaw {
    let mut m = || Matrix3::from_fn(|_, _| r.random_range(-1.0..1.0));
    let (a, b, c) = (m(), m(), m());
    ForceLaw::new("random", move |x, u, t| {
        let nl = Vec3::new(x.y.sin(), (x.z * x.x).cos(), x.x * x.x * x.x) * (1.0 + 0.1 * t);
        a * x + b * u + c * nl
    })
}

fn perturbation(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let mut r = rng(10);
    let grid = TimeGrid::new(0.0, 0.01, 300)?;
    let mut linearity: f64 = 0.0;
    let mut homogeneous: f64 = 0.0;
    for _ in 0..5 {
        let f = random_force(&mut r);
        let mut v = || Vec3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        let zero = zero_order_solve(&f, 0.5 * v(), 0.01 * v(), 1.0, &grid)?;
        let (a, b) = ((1e-3 * v(), 1e-4 * v()), (1e-3 * v(), 1e-4 * v()));
        let ra = correction_solve(&zero, &f, a.0, a.1, 1.0)?;
        let rb = correction_solve(&zero, &f, b.0, b.1, 1.0)?;
        let rab = correction_solve(&zero, &f, a.0 + 2.0 * b.0, a.1 + 2.0 * b.1, 1.0)?;
        for i in 0..rab.len() {
            linearity = linearity.max((rab.r[i] - ra.r[i] - 2.0 * rb.r[i]).norm());
        }
        let none = correction_solve(&zero, &f, Vec3::zeros(), Vec3::zeros(), 1.0)?;
        homogeneous = homogeneous.max(max_of(none.r.iter().map(|x| x.norm())));
    }

    let (k, m0): (f64, f64) = (2.5, 0.7);
    let harmonic = ForceLaw::harmonic(k)?;
    let run = PerturbationRun::solve(&harmonic, (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros()), (Vec3::new(1e-3, 0.0, 0.0), Vec3::new(0.0, 1e-3, 0.0)), m0, &TimeGrid::new(0.0, 0.002, 10_000)?, Boost::new(0.001)?)?;
    let omega = crossing_frequency(&run.correction, 0)?;

    let unit = ForceLaw::harmonic(1.0)?;
    let run = PerturbationRun::solve(&unit, (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros()), (Vec3::new(1e-3, 0.0, 0.0), Vec3::zeros()), 1.0, &TimeGrid::new(0.0, 0.01, 1000)?, Boost::new(0.001)?)?;
    let sweep = residual_sweep(&unit, &run, &[0.001, 0.002, 0.004])?;
    Ok(vec![
        Check::below("max superposition defect |r1(a+2b) - r1(a) - 2 r1(b)|", linearity, tol.superposition),
        Check::below("max |r1| from zero initial perturbation", homogeneous, tol.homogeneous_floor),
        Check::below("relative |correction frequency - sqrt(k/m0)|", (omega / (k / m0).sqrt() - 1.0).abs(), tol.harmonic_frequency),
        Check::at_least("fitted residual exponent over v0 in {0.001,0.002,0.004}", sweep.exponent, tol.residual_exponent),
    ])
}

fn determinism(tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let scenario = parse(BUNDLED_CYCLOTRON)?;
    let first = simulate(&scenario)?;
    let second = simulate(&scenario)?;
    let differing = first.len().abs_diff(second.len()) + first.iter().zip(&second).filter(|(a, b)| a != b).count();
    let summary = first
        .iter()
        .find(|a| a.name == "summary.json")
        .ok_or_else(|| CliError::Io("summary.json not produced".into()))?;
    let summary: serde_json::Value = serde_json::from_slice(&summary.bytes).map_err(|e| CliError::Io(e.to_string()))?;
    let ratio = summary["period"]["ratio"].as_f64().unwrap_or(f64::NAN);
    Ok(vec![
        Check::below("files differing between two runs", differing as f64, 0.5),
        Check::below("|T/T' - 1.25| for v0 = 0.6", (ratio - 1.25).abs(), tol.cyclotron_ratio),
    ])
}
