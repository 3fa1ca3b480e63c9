//! Slow-motion split of a trajectory into a Newtonian zero-order part and a
//! linear correction driven by the change in the course of time.
//!
//! The zero-order trajectory solves m₀ r̈₀ = F′(r₀, u₀, t). The correction
//! solves the linearised equation
//!
//! ```text
//! m₀ r̈₁ = (r₁·∇_{r₀}) F′(r₀, u₀, t) + (u₁·∇_{u₀}) F′(r₀, u₀, t)
//! ```
//!
//! whose right-hand side is the time force. The equation is homogeneous, so
//! a nonzero correction needs a nonzero initial perturbation (r₁, u₁)(t₀),
//! which callers supply explicitly.
//!
//! Everything here is nonrelativistic. Force evaluators are shared between
//! threads and must be safe to call concurrently.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::exec;
use crate::quadrature::hermite;
use crate::spacetime::{Boost, Vec3};

pub type ForceFn = dyn Fn(&Vec3, &Vec3, f64) -> Vec3 + Send + Sync;
pub type JacobianFn = dyn Fn(&Vec3, &Vec3, f64) -> Matrix3<f64> + Send + Sync;

/// Relative agreement demanded between supplied and finite-difference
/// Jacobians when a force law is built.
pub const JACOBIAN_CHECK_TOL: f64 = 1e-6;

/// Points at which supplied Jacobians are spot-checked by default.
pub fn default_probes() -> Vec<(Vec3, Vec3, f64)> {
    vec![
        (Vec3::new(0.3, -0.2, 0.1), Vec3::new(0.01, 0.02, -0.015), 0.0),
        (Vec3::new(-1.1, 0.7, 0.4), Vec3::new(-0.03, 0.0, 0.02), 0.5),
        (Vec3::new(0.9, 1.3, -0.8), Vec3::new(0.005, -0.04, 0.01), 2.0),
    ]
}

/// A force F′(r, u, t) with optional analytic gradients.
///
/// Jacobians are indexed `[(i, j)] = ∂F_i/∂r_j` (resp. `∂F_i/∂u_j`), so
/// `(r₁·∇_r)F = J_r r₁`.
#[derive(Clone)]
pub struct ForceLaw {
    name: String,
    force: Arc<ForceFn>,
    grad_r: Option<Arc<JacobianFn>>,
    grad_u: Option<Arc<JacobianFn>>,
}

impl fmt::Debug for ForceLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForceLaw")
            .field("name", &self.name)
            .field("analytic_jacobians", &self.has_analytic_jacobians())
            .finish()
    }
}

impl ForceLaw {
    /// A force without analytic Jacobians; gradients fall back to finite differences.
    pub fn new<F>(name: impl Into<String>, force: F) -> Self
    where
        F: Fn(&Vec3, &Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        ForceLaw {
            name: name.into(),
            force: Arc::new(force),
            grad_r: None,
            grad_u: None,
        }
    }

    /// Attaches analytic Jacobians after checking them against finite
    /// differences at [`default_probes`].
    pub fn with_jacobians<R, U>(self, grad_r: R, grad_u: U) -> Result<Self>
    where
        R: Fn(&Vec3, &Vec3, f64) -> Matrix3<f64> + Send + Sync + 'static,
        U: Fn(&Vec3, &Vec3, f64) -> Matrix3<f64> + Send + Sync + 'static,
    {
        self.with_jacobians_at(grad_r, grad_u, &default_probes())
    }

    /// As [`ForceLaw::with_jacobians`] with caller-chosen probe points.
    pub fn with_jacobians_at<R, U>(mut self, grad_r: R, grad_u: U, probes: &[(Vec3, Vec3, f64)]) -> Result<Self>
    where
        R: Fn(&Vec3, &Vec3, f64) -> Matrix3<f64> + Send + Sync + 'static,
        U: Fn(&Vec3, &Vec3, f64) -> Matrix3<f64> + Send + Sync + 'static,
    {
        for (r, u, t) in probes {
            let (fd_r, fd_u) = fd_jacobians(&self, r, u, *t)?;
            for (label, analytic, fd) in [("∇_r", grad_r(r, u, *t), fd_r), ("∇_u", grad_u(r, u, *t), fd_u)] {
                let scale = analytic.norm().max(fd.norm());
                let diff = (analytic - fd).norm();
                if !(diff <= JACOBIAN_CHECK_TOL * scale + 1e-12) {
                    return Err(Error::ParameterMismatch(format!(
                        "{label} of `{}` disagrees with finite differences by {diff:e} at r = {r:?}",
                        self.name
                    )));
                }
            }
        }
        self.grad_r = Some(Arc::new(grad_r));
        self.grad_u = Some(Arc::new(grad_u));
        Ok(self)
    }

    /// F = −k r.
    pub fn harmonic(k: f64) -> Result<Self> {
        ForceLaw::new(format!("harmonic(k={k})"), move |r, _, _| -k * r)
            .with_jacobians(move |_, _, _| -k * Matrix3::identity(), |_, _, _| Matrix3::zeros())
    }

    /// F = e(E + u × B) with static homogeneous fields.
    pub fn lorentz(charge: f64, e: Vec3, b: Vec3) -> Result<Self> {
        ForceLaw::new(format!("lorentz(e={charge})"), move |_, u, _| charge * (e + u.cross(&b)))
            .with_jacobians(|_, _, _| Matrix3::zeros(), move |_, _, _| charge * (-b).cross_matrix())
    }

    pub fn constant(f: Vec3) -> Result<Self> {
        ForceLaw::new("constant", move |_, _, _| f).with_jacobians(|_, _, _| Matrix3::zeros(), |_, _, _| Matrix3::zeros())
    }

    pub fn zero() -> Self {
        ForceLaw::constant(Vec3::zeros()).expect("zero Jacobians are exact")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_analytic_jacobians(&self) -> bool {
        self.grad_r.is_some() && self.grad_u.is_some()
    }

    pub fn eval(&self, r: &Vec3, u: &Vec3, t: f64) -> Result<Vec3> {
        let f = (self.force)(r, u, t);
        if f.iter().all(|c| c.is_finite()) {
            Ok(f)
        } else {
            Err(Error::NonFinite {
                quantity: format!("force `{}` at t = {t}", self.name),
            })
        }
    }
}

fn fd_step(x: f64) -> f64 {
    1e-6f64.max(1e-6 * x.abs())
}

/// Central-difference Jacobians with step max(1e−6, 1e−6·|component|).
pub fn fd_jacobians(f: &ForceLaw, r: &Vec3, u: &Vec3, t: f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    fd_jacobians_by(f, r, u, t, fd_step)
}

/// Central-difference Jacobians with a fixed step `h`.
pub fn fd_jacobians_with_step(f: &ForceLaw, r: &Vec3, u: &Vec3, t: f64, h: f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    fd_jacobians_by(f, r, u, t, |_| h)
}

fn fd_jacobians_by(f: &ForceLaw, r: &Vec3, u: &Vec3, t: f64, step: impl Fn(f64) -> f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    let mut jr = Matrix3::zeros();
    let mut ju = Matrix3::zeros();
    for j in 0..3 {
        let h = step(r[j]);
        let (mut rp, mut rm) = (*r, *r);
        rp[j] += h;
        rm[j] -= h;
        jr.set_column(j, &((f.eval(&rp, u, t)? - f.eval(&rm, u, t)?) / (rp[j] - rm[j])));

        let h = step(u[j]);
        let (mut up, mut um) = (*u, *u);
        up[j] += h;
        um[j] -= h;
        ju.set_column(j, &((f.eval(r, &up, t)? - f.eval(r, &um, t)?) / (up[j] - um[j])));
    }
    Ok((jr, ju))
}

/// (∇_r F, ∇_u F): analytic when supplied, finite differences otherwise.
pub fn force_jacobians(f: &ForceLaw, r: &Vec3, u: &Vec3, t: f64) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    match (&f.grad_r, &f.grad_u) {
        (Some(gr), Some(gu)) => Ok((gr(r, u, t), gu(r, u, t))),
        _ => fd_jacobians(f, r, u, t),
    }
}

/// Fixed-step time grid `t0 + i·dt`, `i = 0..=n_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Domain {
                quantity: "dt",
                value: dt,
                constraint: "finite and > 0",
            });
        }
        if !t0.is_finite() {
            return Err(Error::NonFinite { quantity: "t0".into() });
        }
        if n_steps == 0 {
            return Err(Error::Domain {
                quantity: "n_steps",
                value: 0.0,
                constraint: "n_steps >= 1",
            });
        }
        Ok(TimeGrid { t0, dt, n_steps })
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }
}

/// Sampled Newtonian motion: positions, velocities and accelerations on a
/// uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Motion {
    pub grid: TimeGrid,
    pub r: Vec<Vec3>,
    pub u: Vec<Vec3>,
    pub accel: Vec<Vec3>,
}

impl Motion {
    pub fn times(&self) -> Vec<f64> {
        (0..self.r.len()).map(|i| self.grid.time(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// (r, u) on [t_i, t_i+1] by cubic Hermite interpolation, using u and
    /// the stored accelerations as slopes.
    fn state_in(&self, i: usize, t: f64) -> (Vec3, Vec3) {
        let (ta, tb) = (self.grid.time(i), self.grid.time(i + 1));
        let (r, _) = hermite(ta, tb, &self.r[i], &self.r[i + 1], &self.u[i], &self.u[i + 1], t);
        let (u, _) = hermite(ta, tb, &self.u[i], &self.u[i + 1], &self.accel[i], &self.accel[i + 1], t);
        (r, u)
    }
}

fn check_mass(m0: f64) -> Result<()> {
    if m0.is_finite() && m0 > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity: "m0",
            value: m0,
            constraint: "finite and > 0",
        })
    }
}

type Rhs<'a> = dyn Fn(f64, &Vec3, &Vec3, usize, Stage) -> Result<Vec3> + 'a;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Start,
    Mid,
    End,
}

/// Classical RK4 for r̈ = a(t, r, u). The step index and stage let the
/// right-hand side look up precomputed coefficients.
fn rk4(grid: &TimeGrid, r0: Vec3, u0: Vec3, accel: &Rhs<'_>) -> Result<Motion> {
    let n = grid.n_steps;
    let h = grid.dt;
    let mut r = Vec::with_capacity(n + 1);
    let mut u = Vec::with_capacity(n + 1);
    let mut a = Vec::with_capacity(n + 1);
    let (mut rc, mut uc) = (r0, u0);
    for i in 0..n {
        let t = grid.time(i);
        let k1a = accel(t, &rc, &uc, i, Stage::Start)?;
        r.push(rc);
        u.push(uc);
        a.push(k1a);
        let k1r = uc;
        let k2r = uc + 0.5 * h * k1a;
        let k2a = accel(t + 0.5 * h, &(rc + 0.5 * h * k1r), &k2r, i, Stage::Mid)?;
        let k3r = uc + 0.5 * h * k2a;
        let k3a = accel(t + 0.5 * h, &(rc + 0.5 * h * k2r), &k3r, i, Stage::Mid)?;
        let k4r = uc + h * k3a;
        let k4a = accel(t + h, &(rc + h * k3r), &k4r, i, Stage::End)?;
        rc += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        uc += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    }
    a.push(accel(grid.time(n), &rc, &uc, n, Stage::Start)?);
    r.push(rc);
    u.push(uc);
    Ok(Motion {
        grid: *grid,
        r,
        u,
        accel: a,
    })
}

/// RK4 solution of m₀ r̈₀ = F′(r₀, u₀, t). Intended for |u| ≪ 1; the speed
/// is not checked.
pub fn zero_order_solve(f: &ForceLaw, r0: Vec3, u0: Vec3, m0: f64, grid: &TimeGrid) -> Result<Motion> {
    check_mass(m0)?;
    rk4(grid, r0, u0, &|t, r, u, _, _| Ok(f.eval(r, u, t)? / m0))
}

/// Jacobians of F′ along the zero-order motion at the nodes and interval
/// midpoints.
struct Coefficients {
    nodes: Vec<(Matrix3<f64>, Matrix3<f64>)>,
    mids: Vec<(Matrix3<f64>, Matrix3<f64>)>,
}

impl Coefficients {
    fn along(zero: &Motion, f: &ForceLaw) -> Result<Self> {
        let idx: Vec<usize> = (0..zero.len()).collect();
        let nodes = exec::try_map(&idx, |&i| force_jacobians(f, &zero.r[i], &zero.u[i], zero.grid.time(i)))?;
        let mids = exec::try_map(&idx[..idx.len() - 1], |&i| {
            let t = zero.grid.time(i) + 0.5 * zero.grid.dt;
            let (r, u) = zero.state_in(i, t);
            force_jacobians(f, &r, &u, t)
        })?;
        Ok(Coefficients { nodes, mids })
    }

    fn at(&self, i: usize, stage: Stage) -> &(Matrix3<f64>, Matrix3<f64>) {
        match stage {
            Stage::Start => &self.nodes[i],
            Stage::Mid => &self.mids[i],
            Stage::End => &self.nodes[i + 1],
        }
    }
}

/// RK4 solution of the linearised correction equation with coefficients
/// taken along `zero` (same grid). Midpoint coefficients use Hermite
/// interpolation of the zero-order motion.
pub fn correction_solve(zero: &Motion, f: &ForceLaw, r1: Vec3, u1: Vec3, m0: f64) -> Result<Motion> {
    check_mass(m0)?;
    let coeffs = Coefficients::along(zero, f)?;
    rk4(&zero.grid, r1, u1, &|_, r, u, i, stage| {
        let (jr, ju) = coeffs.at(i, stage);
        Ok((jr * r + ju * u) / m0)
    })
}

/// Zero-order motion, its correction, and the time force along them.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationRun {
    pub zero: Motion,
    pub correction: Motion,
    pub boost: Boost,
    pub m0: f64,
    pub time_force: Vec<Vec3>,
}

impl PerturbationRun {
    /// Solves both orders from initial states `(r0, u0)` and `(r1, u1)`.
    pub fn solve(f: &ForceLaw, initial: (Vec3, Vec3), perturbation: (Vec3, Vec3), m0: f64, grid: &TimeGrid, boost: Boost) -> Result<Self> {
        let zero = zero_order_solve(f, initial.0, initial.1, m0, grid)?;
        let correction = correction_solve(&zero, f, perturbation.0, perturbation.1, m0)?;
        let mut run = PerturbationRun {
            zero,
            correction,
            boost,
            m0,
            time_force: Vec::new(),
        };
        run.time_force = time_force(&run, f)?;
        Ok(run)
    }
}

/// (r₁·∇_{r₀})F′ + (u₁·∇_{u₀})F′ at every node of the run.
pub fn time_force(run: &PerturbationRun, f: &ForceLaw) -> Result<Vec<Vec3>> {
    let (z, c) = (&run.zero, &run.correction);
    if z.len() != c.len() {
        return Err(Error::GridMismatch { index: z.len().min(c.len()) });
    }
    let idx: Vec<usize> = (0..z.len()).collect();
    exec::try_map(&idx, |&i| {
        let (jr, ju) = force_jacobians(f, &z.r[i], &z.u[i], z.grid.time(i))?;
        Ok(jr * c.r[i] + ju * c.u[i])
    })
}

/// max |m₀ ü₁ − time force| over the run, with ü₁ from the correction's
/// stored accelerations.
pub fn time_force_mismatch(run: &PerturbationRun) -> f64 {
    run.correction
        .accel
        .iter()
        .zip(&run.time_force)
        .map(|(a, f)| (run.m0 * a - f).norm())
        .fold(0.0, f64::max)
}

/// Residual of the first-order-in-v0 expanded equation of motion,
///
/// ```text
/// m₀ u̇′ − m₀ ü′ v0 x′ − F′(r′, u′, t) + (dF′/dt) v0 x′
/// ```
///
/// with r′ = r₀ + r₁ and x′ taken from the zero-order motion. u̇′ is the
/// solved acceleration, ü′ its central difference, and dF′/dt the chain-rule
/// derivative J_r u′ + J_u u̇′ + ∂F′/∂t. Returns the max norm over interior
/// nodes.
pub fn expansion_residual(f: &ForceLaw, run: &PerturbationRun, b: &Boost) -> Result<f64> {
    residual_with(f, run, b.v0(), true)
}

/// The same residual with the correction dropped (r′ = r₀).
pub fn expansion_residual_zero_order(f: &ForceLaw, run: &PerturbationRun, b: &Boost) -> Result<f64> {
    residual_with(f, run, b.v0(), false)
}

fn residual_with(f: &ForceLaw, run: &PerturbationRun, v0: f64, corrected: bool) -> Result<f64> {
    let (z, c) = (&run.zero, &run.correction);
    let n = z.len();
    if n < 3 {
        return Err(Error::TooFewSamples { required: 3, found: n });
    }
    let m0 = run.m0;
    let h = z.grid.dt;
    let state = |i: usize| -> (Vec3, Vec3, Vec3) {
        if corrected {
            (z.r[i] + c.r[i], z.u[i] + c.u[i], z.accel[i] + run.time_force[i] / m0)
        } else {
            (z.r[i], z.u[i], z.accel[i])
        }
    };
    let idx: Vec<usize> = (1..n - 1).collect();
    let norms = exec::try_map(&idx, |&i| {
        let t = z.grid.time(i);
        let (r, u, a) = state(i);
        let jerk = (state(i + 1).2 - state(i - 1).2) / (2.0 * h);
        let (jr, ju) = force_jacobians(f, &r, &u, t)?;
        let ht = fd_step(t);
        let df_dt_partial = (f.eval(&r, &u, t + ht)? - f.eval(&r, &u, t - ht)?) / (2.0 * ht);
        let df_dt = jr * u + ju * a + df_dt_partial;
        let shift = -v0 * z.r[i].x;
        let residual = m0 * a + m0 * jerk * shift - f.eval(&r, &u, t)? - df_dt * shift;
        Ok::<_, Error>(residual.norm())
    })?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// Residuals over a v0 sweep and the least-squares slope of
/// ln(residual) against ln(v0).
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSweep {
    pub v0: Vec<f64>,
    pub residual: Vec<f64>,
    pub exponent: f64,
}

pub fn residual_sweep(f: &ForceLaw, run: &PerturbationRun, v0s: &[f64]) -> Result<ResidualSweep> {
    if v0s.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: v0s.len(),
        });
    }
    let residual = v0s
        .iter()
        .map(|&v0| expansion_residual(f, run, &Boost::new(v0)?))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = v0s.iter().zip(&residual).position(|(v, r)| !(*v > 0.0 && *r > 0.0)) {
        return Err(Error::Domain {
            quantity: "sweep point",
            value: v0s[i],
            constraint: "v0 > 0 with a positive residual",
        });
    }
    let xs: Vec<f64> = v0s.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = residual.iter().map(|r| r.ln()).collect();
    Ok(ResidualSweep {
        v0: v0s.to_vec(),
        residual,
        exponent: slope(&xs, &ys),
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Angular frequency of a sampled oscillation from its sign changes.
///
/// Crossings are located by Hermite interpolation with the motion's
/// velocities as slopes and refined by bisection; the frequency is
/// π·(crossings − 1)/(last − first).
pub fn crossing_frequency(m: &Motion, component: usize) -> Result<f64> {
    let mut crossings = Vec::new();
    for i in 0..m.len() - 1 {
        let (a, b) = (m.r[i][component], m.r[i + 1][component]);
        if a == 0.0 {
            crossings.push(m.grid.time(i));
            continue;
        }
        if a * b < 0.0 {
            let (mut lo, mut hi) = (m.grid.time(i), m.grid.time(i + 1));
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if m.state_in(i, mid).0[component] * a > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    if crossings.len() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            found: crossings.len(),
        });
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Ok(std::f64::consts::PI * (crossings.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polynomial() -> ForceLaw {
        ForceLaw::new("poly", |r, u, t| {
            Vec3::new(r.x * r.x * r.y - u.z, u.x * u.x * u.x + r.z, t * r.y * u.z)
        })
    }

    type Jacobian = fn(&Vec3, &Vec3, f64) -> Matrix3<f64>;

    fn polynomial_jacobians() -> (Jacobian, Jacobian) {
        (
            |r: &Vec3, u: &Vec3, t: f64| {
                Matrix3::new(
                    2.0 * r.x * r.y, r.x * r.x, 0.0,
                    0.0, 0.0, 1.0,
                    0.0, t * u.z, 0.0,
                )
            },
            |r: &Vec3, u: &Vec3, t: f64| {
                Matrix3::new(
                    0.0, 0.0, -1.0,
                    3.0 * u.x * u.x, 0.0, 0.0,
                    0.0, 0.0, t * r.y,
                )
            },
        )
    }

    fn grid(dt: f64, n: usize) -> TimeGrid {
        TimeGrid::new(0.0, dt, n).unwrap()
    }

    #[test]
    fn zero_order_examples() {
        let free = zero_order_solve(&ForceLaw::zero(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.01, 0.02, 0.0), 1.0, &grid(0.1, 50)).unwrap();
        for (t, r) in free.times().iter().zip(&free.r) {
            assert!((r - Vec3::new(1.0 + 0.01 * t, 0.02 * t, 0.0)).norm() < 1e-14);
        }

        let (k, m0): (f64, f64) = (2.0, 0.5);
        let w = (k / m0).sqrt();
        let osc = zero_order_solve(&ForceLaw::harmonic(k).unwrap(), Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), m0, &grid(0.001, 5000)).unwrap();
        for (t, r) in osc.times().iter().zip(&osc.r) {
            assert!((r.x - (w * t).cos()).abs() < 1e-8);
        }

        let g = Vec3::new(0.0, -0.3, 0.1);
        let para = zero_order_solve(&ForceLaw::constant(g).unwrap(), Vec3::zeros(), Vec3::new(0.02, 0.0, 0.0), 2.0, &grid(0.25, 40)).unwrap();
        for (t, r) in para.times().iter().zip(&para.r) {
            let exact = Vec3::new(0.02 * t, 0.0, 0.0) + g / 2.0 * (t * t) / 2.0;
            assert!((r - exact).norm() < 1e-13);
        }
    }

    #[test]
    fn non_finite_force_is_reported() {
        let bad = ForceLaw::new("bad", |r, _, _| Vec3::new(1.0 / r.x, 0.0, 0.0));
        let e = zero_order_solve(&bad, Vec3::zeros(), Vec3::zeros(), 1.0, &grid(0.1, 3)).unwrap_err();
        assert!(matches!(e, Error::NonFinite { .. }));
    }

    #[test]
    fn jacobian_examples() {
        let r = Vec3::new(0.3, 0.4, -0.5);
        let u = Vec3::new(0.01, 0.0, 0.02);
        let (jr, ju) = force_jacobians(&ForceLaw::harmonic(3.0).unwrap(), &r, &u, 0.0).unwrap();
        assert_eq!(jr, -3.0 * Matrix3::identity());
        assert_eq!(ju, Matrix3::zeros());

        let b = Vec3::new(0.2, -1.0, 0.5);
        let lorentz = ForceLaw::lorentz(-2.0, Vec3::new(1.0, 0.0, 0.0), b).unwrap();
        let (_, ju) = force_jacobians(&lorentz, &r, &u, 0.0).unwrap();
        let du = Vec3::new(0.3, 0.1, -0.2);
        // u × B is linear in u, so ∇_u F applied to du is e (du × B)
        assert!((ju * du - (-2.0) * du.cross(&b)).norm() < 1e-15);
        let (_, fd) = fd_jacobians(&lorentz, &r, &u, 0.0).unwrap();
        assert!((fd - ju).norm() < 1e-9);

        let (gr, gu) = polynomial_jacobians();
        let (fr, fu) = fd_jacobians(&polynomial(), &r, &u, 0.7).unwrap();
        assert!((fr - gr(&r, &u, 0.7)).amax() < 1e-9);
        assert!((fu - gu(&r, &u, 0.7)).amax() < 1e-9);
    }

    #[test]
    fn wrong_jacobian_is_rejected() {
        let r = ForceLaw::new("h", |r, _, _| -r).with_jacobians(|_, _, _| -2.0 * Matrix3::identity(), |_, _, _| Matrix3::zeros());
        assert!(matches!(r, Err(Error::ParameterMismatch(_))));
        let (gr, gu) = polynomial_jacobians();
        assert!(polynomial().with_jacobians(gr, gu).unwrap().has_analytic_jacobians());
    }

    #[test]
    fn fd_jacobian_converges_at_second_order() {
        let f = ForceLaw::new("smooth", |r, u, _| Vec3::new((r.x * r.y).sin(), (u.x + r.z).exp(), r.y.cos() * u.y));
        let r = Vec3::new(0.7, -0.4, 0.2);
        let u = Vec3::new(0.1, 0.3, 0.0);
        let exact_rx = Vec3::new(r.y * (r.x * r.y).cos(), 0.0, 0.0);
        let err = |h: f64| (fd_jacobians_with_step(&f, &r, &u, 0.0, h).unwrap().0.column(0) - exact_rx).norm();
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn homogeneous_correction_stays_zero() {
        let (gr, gu) = polynomial_jacobians();
        for f in [ForceLaw::harmonic(1.5).unwrap(), polynomial(), polynomial().with_jacobians(gr, gu).unwrap()] {
            let run = PerturbationRun::solve(&f, (Vec3::new(0.5, 0.2, -0.1), Vec3::new(0.01, 0.0, 0.02)), (Vec3::zeros(), Vec3::zeros()), 1.0, &grid(0.01, 300), Boost::new(0.001).unwrap()).unwrap();
            assert!(run.correction.r.iter().all(|r| *r == Vec3::zeros()));
            assert!(run.time_force.iter().all(|f| *f == Vec3::zeros()));
        }
    }

    #[test]
    fn harmonic_correction_frequency_and_time_force() {
        let (k, m0): (f64, f64) = (4.0, 1.0);
        let f = ForceLaw::harmonic(k).unwrap();
        let run = PerturbationRun::solve(&f, (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros()), (Vec3::new(1e-3, 0.0, 0.0), Vec3::zeros()), m0, &grid(0.002, 10000), Boost::new(0.001).unwrap()).unwrap();
        let w = crossing_frequency(&run.correction, 0).unwrap();
        assert!((w / (k / m0).sqrt() - 1.0).abs() < 1e-6);
        for (tf, r1) in run.time_force.iter().zip(&run.correction.r) {
            assert!((tf + k * r1).norm() < 1e-18);
        }
        assert!(time_force_mismatch(&run) < 1e-15);
    }

    #[test]
    fn superposition() {
        let (gr, gu) = polynomial_jacobians();
        let f = polynomial().with_jacobians(gr, gu).unwrap();
        let g = grid(0.01, 200);
        let zero = zero_order_solve(&f, Vec3::new(0.4, 0.3, 0.2), Vec3::new(0.01, -0.02, 0.0), 1.0, &g).unwrap();
        let a = (Vec3::new(1e-3, 0.0, 2e-3), Vec3::new(0.0, 1e-4, 0.0));
        let b = (Vec3::new(0.0, -1e-3, 0.0), Vec3::new(3e-4, 0.0, -1e-4));
        let ra = correction_solve(&zero, &f, a.0, a.1, 1.0).unwrap();
        let rb = correction_solve(&zero, &f, b.0, b.1, 1.0).unwrap();
        let rab = correction_solve(&zero, &f, a.0 + 2.0 * b.0, a.1 + 2.0 * b.1, 1.0).unwrap();
        for i in 0..rab.len() {
            assert!((rab.r[i] - ra.r[i] - 2.0 * rb.r[i]).norm() < 1e-10);
        }
    }

    #[test]
    fn expansion_residual_scaling() {
        let f = ForceLaw::harmonic(1.0).unwrap();
        let run = PerturbationRun::solve(&f, (Vec3::new(1.0, 0.0, 0.0), Vec3::zeros()), (Vec3::new(1e-3, 0.0, 0.0), Vec3::zeros()), 1.0, &grid(0.01, 1000), Boost::new(0.0).unwrap()).unwrap();
        let at_rest = expansion_residual(&f, &run, &Boost::new(0.0).unwrap()).unwrap();
        assert!(at_rest < 1e-14, "{at_rest}");
        let sweep = residual_sweep(&f, &run, &[0.001, 0.002, 0.004]).unwrap();
        assert!(sweep.exponent >= 0.9, "{sweep:?}");
        let r0_only = expansion_residual_zero_order(&f, &run, &Boost::new(0.002).unwrap()).unwrap();
        assert!(r0_only.is_finite());
    }
}
