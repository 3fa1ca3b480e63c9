//! Relativistic motion of a point charge in homogeneous fields.
//!
//! The state advances in coordinate time t with momentum p as the integrated
//! variable, so the velocity u = p/√(m₀² + p²) stays subluminal by
//! construction. Proper time is carried along as an auxiliary integral.

use nalgebra::Vector4;

use crate::error::{ensure_finite, Error, Result};
use crate::spacetime::{boost_field_tensor, Boost, FieldTensor, FrameTag, Vec3, Velocity3};
use crate::worldline::{Sample, Worldline};

/// Homogeneous (E, B) in a declared frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConfig {
    pub e: Vec3,
    pub b: Vec3,
    pub frame: FrameTag,
}

impl FieldConfig {
    pub fn new(e: Vec3, b: Vec3, frame: FrameTag) -> Self {
        FieldConfig { e, b, frame }
    }

    pub fn tensor(&self) -> FieldTensor {
        FieldTensor::from_fields(&self.e, &self.b)
    }

    pub fn from_tensor(f: &FieldTensor, frame: FrameTag) -> Self {
        FieldConfig {
            e: f.electric(),
            b: f.magnetic(),
            frame,
        }
    }

    /// The same field seen from the boost's unprimed frame.
    pub fn boosted(&self, b: &Boost) -> Result<FieldConfig> {
        self.frame.expect(b.primed())?;
        Ok(Self::from_tensor(
            &boost_field_tensor(&self.tensor(), b),
            b.unprimed().clone(),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.e == Vec3::zeros() && self.b == Vec3::zeros()
    }
}

/// Rest mass and charge of the simulated particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub m0: f64,
    pub charge: f64,
}

impl Particle {
    pub fn new(m0: f64, charge: f64) -> Result<Self> {
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::Domain {
                quantity: "m0",
                value: m0,
                constraint: "finite and > 0",
            });
        }
        ensure_finite("charge", charge)?;
        Ok(Particle { m0, charge })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleState {
    pub t: f64,
    pub r: Vec3,
    pub u: Velocity3,
    pub particle: Particle,
    pub frame: FrameTag,
}

impl ParticleState {
    pub fn new(t: f64, r: Vec3, u: Velocity3, particle: Particle, frame: FrameTag) -> Result<Self> {
        ensure_finite("state time", t)?;
        for c in r.iter() {
            ensure_finite("state position", *c)?;
        }
        Ok(ParticleState {
            t,
            r,
            u,
            particle,
            frame,
        })
    }

    /// p = m₀u/√(1 − u²).
    pub fn momentum(&self) -> Vec3 {
        self.u.vec() * (self.particle.m0 * self.u.gamma())
    }

    /// ℰ = m₀/√(1 − u²).
    pub fn energy(&self) -> f64 {
        self.particle.m0 * self.u.gamma()
    }
}

/// dp/dt = eE + e(u × B).
pub fn lorentz_force(s: &ParticleState, f: &FieldConfig) -> Result<Vec3> {
    s.frame.expect(&f.frame)?;
    Ok((f.e + s.u.vec().cross(&f.b)) * s.particle.charge)
}

/// f^i = e F^{ik} dx_k/dt with dx_k/dt = (1, −u): time component eE·u,
/// space components the Lorentz force.
pub fn four_force(s: &ParticleState, f: &FieldConfig) -> Result<Vector4<f64>> {
    s.frame.expect(&f.frame)?;
    Ok(contract_four_force(&f.tensor(), &s.u.vec(), s.particle.charge))
}

pub(crate) fn contract_four_force(f: &FieldTensor, u: &Vec3, charge: f64) -> Vector4<f64> {
    let dx_lower = Vector4::new(1.0, -u.x, -u.y, -u.z);
    f.matrix() * dx_lower * charge
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    /// Relativistic Boris rotation; exact energy conservation in pure B.
    /// Only meaningful for homogeneous fields.
    Boris,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub n_steps: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain {
                quantity: "dt",
                value: dt,
                constraint: "finite and > 0",
            });
        }
        if n_steps == 0 {
            return Err(Error::Domain {
                quantity: "n_steps",
                value: 0.0,
                constraint: ">= 1",
            });
        }
        Ok(IntegratorConfig { method, dt, n_steps })
    }
}

/// Integrated worldline plus the proper time elapsed at each sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub worldline: Worldline,
    pub proper_time: Vec<f64>,
}

#[derive(Clone, Copy)]
struct PhaseState {
    r: Vec3,
    p: Vec3,
    tau: f64,
}

struct Derivative {
    dr: Vec3,
    dp: Vec3,
    dtau: f64,
}

fn velocity_of(p: &Vec3, m0: f64) -> Vec3 {
    p / (m0 * m0 + p.norm_squared()).sqrt()
}

fn checked_velocity(p: &Vec3, m0: f64, t: f64) -> Result<Vec3> {
    let u = velocity_of(p, m0);
    let speed = u.norm();
    if !speed.is_finite() {
        return Err(Error::NonFinite {
            quantity: format!("velocity at t = {t}"),
        });
    }
    if speed >= 1.0 {
        return Err(Error::Superluminal { t, speed });
    }
    Ok(u)
}

/// Fixed-step integration of dp/dt = eE + e(u × B) from `s0`.
///
/// Returns `n_steps + 1` samples including the initial state.
pub fn integrate(s0: &ParticleState, f: &FieldConfig, cfg: &IntegratorConfig) -> Result<Trajectory> {
    s0.frame.expect(&f.frame)?;
    let Particle { m0, charge } = s0.particle;
    let mut samples = Vec::with_capacity(cfg.n_steps + 1);
    let mut proper_time = Vec::with_capacity(cfg.n_steps + 1);
    samples.push(Sample::new(s0.t, s0.r, s0.u.vec()));
    proper_time.push(0.0);

    let mut state = PhaseState {
        r: s0.r,
        p: s0.momentum(),
        tau: 0.0,
    };
    let h = cfg.dt;
    match cfg.method {
        Method::Rk4 => {
            let deriv = |s: &PhaseState| {
                let root = (m0 * m0 + s.p.norm_squared()).sqrt();
                let u = s.p / root;
                Derivative {
                    dr: u,
                    dp: (f.e + u.cross(&f.b)) * charge,
                    dtau: m0 / root,
                }
            };
            let shifted = |s: &PhaseState, k: &Derivative, c: f64| PhaseState {
                r: s.r + k.dr * c,
                p: s.p + k.dp * c,
                tau: s.tau + k.dtau * c,
            };
            for n in 1..=cfg.n_steps {
                let k1 = deriv(&state);
                let k2 = deriv(&shifted(&state, &k1, h / 2.0));
                let k3 = deriv(&shifted(&state, &k2, h / 2.0));
                let k4 = deriv(&shifted(&state, &k3, h));
                state = PhaseState {
                    r: state.r + (k1.dr + (k2.dr + k3.dr) * 2.0 + k4.dr) * (h / 6.0),
                    p: state.p + (k1.dp + (k2.dp + k3.dp) * 2.0 + k4.dp) * (h / 6.0),
                    tau: state.tau + (k1.dtau + 2.0 * (k2.dtau + k3.dtau) + k4.dtau) * (h / 6.0),
                };
                let t = s0.t + h * n as f64;
                let u = checked_velocity(&state.p, m0, t)?;
                for c in state.r.iter() {
                    ensure_finite("integrated position", *c)?;
                }
                samples.push(Sample::new(t, state.r, u));
                proper_time.push(state.tau);
            }
        }
        Method::Boris => {
            // Momentum lives on the half-step grid; a half push recovers the
            // synchronized value at each output time.
            let q = charge / m0;
            let push = |w: &Vec3, dt: f64| -> Vec3 {
                let minus = w + f.e * (q * dt / 2.0);
                let gamma = (1.0 + minus.norm_squared()).sqrt();
                let tv = f.b * (q * dt / (2.0 * gamma));
                let sv = tv * (2.0 / (1.0 + tv.norm_squared()));
                let prime = minus + minus.cross(&tv);
                let plus = minus + prime.cross(&sv);
                plus + f.e * (q * dt / 2.0)
            };
            let mut w_half = push(&(state.p / m0), h / 2.0);
            let mut gamma_prev = (1.0 + (state.p / m0).norm_squared()).sqrt();
            for n in 1..=cfg.n_steps {
                let gamma_half = (1.0 + w_half.norm_squared()).sqrt();
                state.r += w_half * (h / gamma_half);
                let w_sync = push(&w_half, h / 2.0);
                let gamma_sync = (1.0 + w_sync.norm_squared()).sqrt();
                state.tau += 0.5 * h * (1.0 / gamma_prev + 1.0 / gamma_sync);
                gamma_prev = gamma_sync;
                state.p = w_sync * m0;
                let t = s0.t + h * n as f64;
                let u = checked_velocity(&state.p, m0, t)?;
                for c in state.r.iter() {
                    ensure_finite("integrated position", *c)?;
                }
                samples.push(Sample::new(t, state.r, u));
                proper_time.push(state.tau);
                w_half = push(&w_half, h);
            }
        }
    }
    Ok(Trajectory {
        worldline: Worldline::new(f.frame.clone(), samples)?,
        proper_time,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRow {
    pub t: f64,
    /// ℰ = m₀/√(1 − u²)
    pub kinetic: f64,
    /// U = −eE·r
    pub potential: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyAudit {
    pub rows: Vec<EnergyRow>,
    /// max |Δ(ℰ + U)| / |(ℰ + U)₀|
    pub max_relative_drift: f64,
}

/// Tracks ℰ + U along a worldline in a homogeneous field.
pub fn energy_audit(w: &Worldline, f: &FieldConfig, particle: &Particle) -> Result<EnergyAudit> {
    w.frame().expect(&f.frame)?;
    if w.is_empty() {
        return Err(Error::TooFewSamples { required: 1, found: 0 });
    }
    let rows: Vec<EnergyRow> = w
        .samples()
        .iter()
        .map(|s| {
            let kinetic = particle.m0 / (1.0 - s.u.norm_squared()).sqrt();
            let potential = -particle.charge * f.e.dot(&s.r);
            EnergyRow {
                t: s.t,
                kinetic,
                potential,
                total: kinetic + potential,
            }
        })
        .collect();
    let e0 = rows[0].total;
    let max_relative_drift = rows
        .iter()
        .map(|r| (r.total - e0).abs() / e0.abs())
        .fold(0.0, f64::max);
    Ok(EnergyAudit {
        rows,
        max_relative_drift,
    })
}

/// Largest mismatch between the central-difference momentum rate and the
/// Lorentz force at interior samples, relative to the largest force.
/// Second order in the sample spacing for a worldline that solves the
/// equations of motion.
pub fn motion_residual(w: &Worldline, f: &FieldConfig, particle: &Particle) -> Result<f64> {
    w.frame().expect(&f.frame)?;
    let s = w.samples();
    if s.len() < 3 {
        return Err(Error::TooFewSamples {
            required: 3,
            found: s.len(),
        });
    }
    let momentum = |u: &Vec3| u * (particle.m0 / (1.0 - u.norm_squared()).sqrt());
    let force = |u: &Vec3| (f.e + u.cross(&f.b)) * particle.charge;
    let scale = s.iter().map(|x| force(&x.u).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(s
            .windows(2)
            .map(|p| (momentum(&p[1].u) - momentum(&p[0].u)).norm())
            .fold(0.0, f64::max));
    }
    Ok(s
        .windows(3)
        .map(|p| {
            let rate = (momentum(&p[2].u) - momentum(&p[0].u)) / (p[2].t - p[0].t);
            (rate - force(&p[1].u)).norm()
        })
        .fold(0.0, f64::max)
        / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{cyclotron_state, uniform_e_state, CyclotronParams, UniformEParams};
    use approx::assert_relative_eq;

    fn unit() -> Particle {
        Particle::new(1.0, 1.0).unwrap()
    }

    fn state(t: f64, r: Vec3, u: Vec3, particle: Particle) -> ParticleState {
        ParticleState::new(t, r, Velocity3::from_vec(u).unwrap(), particle, FrameTag::moving()).unwrap()
    }

    fn field(e: Vec3, b: Vec3) -> FieldConfig {
        FieldConfig::new(e, b, FrameTag::moving())
    }

    #[test]
    fn lorentz_force_examples() {
        let b = field(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0));
        let at_rest = state(0.0, Vec3::zeros(), Vec3::zeros(), unit());
        assert_eq!(lorentz_force(&at_rest, &b).unwrap(), Vec3::zeros());
        let moving = state(0.0, Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0), unit());
        assert_relative_eq!(lorentz_force(&moving, &b).unwrap(), Vec3::new(0.0, -0.3, 0.0));
        let lab = FieldConfig::new(Vec3::zeros(), Vec3::zeros(), FrameTag::lab());
        assert!(matches!(lorentz_force(&moving, &lab), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn four_force_examples() {
        let e = field(Vec3::new(0.2, -0.4, 1.0), Vec3::zeros());
        let p = Particle::new(2.0, -1.5).unwrap();
        let rest = state(0.0, Vec3::zeros(), Vec3::zeros(), p);
        let f = four_force(&rest, &e).unwrap();
        assert_eq!(f[0], 0.0);
        assert_relative_eq!(Vec3::new(f[1], f[2], f[3]), e.e * -1.5);

        let c = CyclotronParams::new(0.5, 2.0, 0.3, Vec3::zeros(), 1.0, 1.0).unwrap();
        for t in [0.0, 0.4, 1.3] {
            let (r, u) = cyclotron_state(&c, t);
            let f = four_force(&state(t, r, u, unit()), &c.field()).unwrap();
            assert!(f[0].abs() < 1e-16);
        }

        let general = field(Vec3::new(0.3, 0.1, -0.7), Vec3::new(-1.2, 0.5, 0.9));
        let s = state(0.0, Vec3::zeros(), Vec3::new(0.2, -0.5, 0.4), p);
        let f = four_force(&s, &general).unwrap();
        let lf = lorentz_force(&s, &general).unwrap();
        assert!((Vec3::new(f[1], f[2], f[3]) - lf).norm() < 1e-15);
        assert_relative_eq!(f[0], p.charge * general.e.dot(&s.u.vec()), epsilon = 1e-15);
    }

    #[test]
    fn free_particle_moves_in_straight_line() {
        let s0 = state(0.5, Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.3, -0.2, 0.1), unit());
        let cfg = IntegratorConfig::new(Method::Rk4, 0.1, 50).unwrap();
        let traj = integrate(&s0, &field(Vec3::zeros(), Vec3::zeros()), &cfg).unwrap();
        for s in traj.worldline.samples() {
            let exact = s0.r + s0.u.vec() * (s.t - s0.t);
            assert!((s.r - exact).norm() < 1e-13);
        }
        let last = *traj.proper_time.last().unwrap();
        assert_relative_eq!(last, 5.0 * (1.0 - 0.14f64).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rk4_reproduces_cyclotron_orbit() {
        let c = CyclotronParams::new(0.6, 1.0, 0.0, Vec3::zeros(), 1.0, 1.0).unwrap();
        let (r0, u0) = cyclotron_state(&c, 0.0);
        let n = 1000;
        let cfg = IntegratorConfig::new(Method::Rk4, c.period() / n as f64, n).unwrap();
        let traj = integrate(&state(0.0, r0, u0, unit()), &c.field(), &cfg).unwrap();
        let worst = traj
            .worldline
            .samples()
            .iter()
            .map(|s| {
                let (r, u) = cyclotron_state(&c, s.t);
                (s.r - r).norm().max((s.u - u).norm())
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "worst {worst}");
        for s in traj.worldline.samples() {
            let st = state(s.t, s.r, s.u, unit());
            let shell = st.energy().powi(2) - st.momentum().norm_squared();
            assert!((shell - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_reproduces_hyperbolic_motion() {
        let p = UniformEParams::new(Vec3::new(0.8, 0.6, 0.0), 1.0, 1.0, Vec3::zeros()).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 3.0 / 1000.0, 1000).unwrap();
        let traj = integrate(&state(0.0, Vec3::zeros(), Vec3::zeros(), unit()), &p.field(), &cfg).unwrap();
        for (s, tau) in traj.worldline.samples().iter().zip(&traj.proper_time) {
            let (r, u) = uniform_e_state(&p, s.t);
            assert!((s.u - u).norm() < 1e-8 && (s.r - r).norm() < 1e-8);
            assert!((tau - s.t.asinh()).abs() < 1e-10);
        }
    }

    #[test]
    fn rk4_global_order() {
        // Richardson step-halving: no exact solution involved.
        let c = CyclotronParams::new(0.6, 1.0, 0.0, Vec3::zeros(), 1.0, 1.0).unwrap();
        let (r0, u0) = cyclotron_state(&c, 0.0);
        let end = |n: usize| {
            let cfg = IntegratorConfig::new(Method::Rk4, c.period() / n as f64, n).unwrap();
            let traj = integrate(&state(0.0, r0, u0, unit()), &c.field(), &cfg).unwrap();
            traj.worldline.samples().last().unwrap().r
        };
        let (a, b, d) = (end(100), end(200), end(400));
        let order = ((a - b).norm() / (b - d).norm()).log2();
        assert!(order >= 3.9, "order {order}");
    }

    #[test]
    fn boris_conserves_energy_in_pure_b() {
        let c = CyclotronParams::new(0.9, 1.0, 0.0, Vec3::zeros(), 1.0, 1.0).unwrap();
        let (r0, u0) = cyclotron_state(&c, 0.0);
        let cfg = IntegratorConfig::new(Method::Boris, c.period() / 64.0, 64).unwrap();
        let traj = integrate(&state(0.0, r0, u0, unit()), &c.field(), &cfg).unwrap();
        let audit = energy_audit(&traj.worldline, &c.field(), &unit()).unwrap();
        assert!(audit.max_relative_drift < 1e-13);
        // still follows the orbit to second order
        let last = traj.worldline.samples().last().unwrap();
        assert!((last.r - cyclotron_state(&c, last.t).0).norm() < 0.02);
    }

    #[test]
    fn energy_audit_examples() {
        let c = CyclotronParams::new(0.5, 1.0, 0.0, Vec3::zeros(), 1.0, 1.0).unwrap();
        let w = c.worldline(&crate::worldline::uniform_times(0.0, 0.01, 500)).unwrap();
        let audit = energy_audit(&w, &c.field(), &unit()).unwrap();
        assert!(audit.rows.iter().all(|r| r.potential == 0.0));
        assert!(audit.max_relative_drift < 1e-15);

        let p = UniformEParams::new(Vec3::new(0.0, 0.0, -2.0), 1.5, 0.7, Vec3::new(0.1, 0.2, 0.3)).unwrap();
        let w = p.worldline(&crate::worldline::uniform_times(0.0, 0.01, 800)).unwrap();
        let particle = Particle::new(1.5, 0.7).unwrap();
        let audit = energy_audit(&w, &p.field(), &particle).unwrap();
        assert!(audit.max_relative_drift < 1e-10);
    }

    #[test]
    fn power_matches_energy_rate() {
        let f = field(Vec3::new(0.4, -0.2, 0.1), Vec3::new(0.0, 0.3, 1.0));
        let s0 = state(0.0, Vec3::zeros(), Vec3::new(0.1, 0.2, 0.0), unit());
        let h = 1e-3;
        let traj = integrate(&s0, &f, &IntegratorConfig::new(Method::Rk4, h, 400).unwrap()).unwrap();
        let s = traj.worldline.samples();
        let energy = |u: &Vec3| 1.0 / (1.0 - u.norm_squared()).sqrt();
        for i in (1..s.len() - 1).step_by(50) {
            let rate = (energy(&s[i + 1].u) - energy(&s[i - 1].u)) / (2.0 * h);
            let st = state(s[i].t, s[i].r, s[i].u, unit());
            assert!((rate - four_force(&st, &f).unwrap()[0]).abs() < 1e-6);
        }
        assert!(motion_residual(&traj.worldline, &f, &unit()).unwrap() < 1e-6);
    }

    #[test]
    fn superluminal_and_bad_config_errors() {
        assert!(IntegratorConfig::new(Method::Rk4, 0.0, 5).is_err());
        assert!(IntegratorConfig::new(Method::Rk4, 0.1, 0).is_err());
        // enormous field and step: momentum overflows and the check trips
        let f = field(Vec3::new(1e300, 0.0, 0.0), Vec3::zeros());
        let s0 = state(0.0, Vec3::zeros(), Vec3::zeros(), unit());
        let r = integrate(&s0, &f, &IntegratorConfig::new(Method::Rk4, 1e10, 10).unwrap());
        assert!(matches!(r, Err(Error::Superluminal { .. }) | Err(Error::NonFinite { .. })));
    }
}
