//! Sampled particle trajectories and their transformation between frames.

use crate::error::{ensure_finite, Error, Result};
use crate::exec;
use crate::quadrature::hermite;
use crate::spacetime::{boost_event, velocity_boost, Boost, Direction, Event, FrameTag, Vec3, Velocity3};

/// One worldline sample: coordinate time, position and velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub r: Vec3,
    pub u: Vec3,
}

impl Sample {
    pub fn new(t: f64, r: Vec3, u: Vec3) -> Self {
        Sample { t, r, u }
    }

    pub fn velocity(&self) -> Result<Velocity3> {
        Velocity3::from_vec(self.u)
    }
}

/// A strictly time-ordered, subluminal trajectory in a single frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Worldline {
    frame: FrameTag,
    samples: Vec<Sample>,
}

impl Worldline {
    pub fn new(frame: FrameTag, samples: Vec<Sample>) -> Result<Self> {
        for (i, s) in samples.iter().enumerate() {
            ensure_finite("sample time", s.t)?;
            for c in s.r.iter().chain(s.u.iter()) {
                ensure_finite("sample coordinate", *c)?;
            }
            let speed = s.u.norm();
            if speed >= 1.0 {
                return Err(Error::Superluminal { t: s.t, speed });
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::NonMonotonicTime { index: i });
            }
        }
        Ok(Worldline { frame, samples })
    }

    /// Samples a trajectory function `t -> (r, u)` at the given times.
    pub fn from_fn<F>(frame: FrameTag, times: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> (Vec3, Vec3) + Sync + Send,
    {
        let samples = exec::map(times, |&t| {
            let (r, u) = f(t);
            Sample { t, r, u }
        });
        Worldline::new(frame, samples)
    }

    pub fn frame(&self) -> &FrameTag {
        &self.frame
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    /// Largest |(r[i+1] − r[i−1])/(t[i+1] − t[i−1]) − u[i]| over interior
    /// samples. Second order in the step for smooth trajectories.
    pub fn velocity_consistency(&self) -> f64 {
        self.samples
            .windows(3)
            .map(|w| ((w[2].r - w[0].r) / (w[2].t - w[0].t) - w[1].u).norm())
            .fold(0.0, f64::max)
    }

    /// Interpolated (r, u) at time `t` using cubic Hermite segments whose
    /// node slopes are the stored velocities.
    pub fn state_at(&self, t: f64) -> Result<(Vec3, Vec3)> {
        let n = self.samples.len();
        if n < 2 {
            return Err(Error::TooFewSamples { required: 2, found: n });
        }
        let (first, last) = (self.samples[0].t, self.samples[n - 1].t);
        if !(t >= first && t <= last) {
            return Err(Error::OutOfRange {
                start: t,
                end: t,
                first,
                last,
            });
        }
        let k = self.samples.partition_point(|s| s.t <= t).clamp(1, n - 1);
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        Ok(hermite(a.t, b.t, &a.r, &b.r, &a.u, &b.u, t))
    }

    /// Resamples onto `t_start + i·dt` for `i = 0..=n_steps`.
    ///
    /// Positions come from cubic Hermite interpolation with the stored
    /// velocities as node slopes, and velocities from the interpolant's
    /// derivative.
    pub fn resample_uniform(&self, t_start: f64, dt: f64, n_steps: usize) -> Result<Worldline> {
        if !(dt > 0.0) {
            return Err(Error::Domain {
                quantity: "dt",
                value: dt,
                constraint: "dt > 0",
            });
        }
        let times = uniform_times(t_start, dt, n_steps);
        let samples = exec::try_map(&times, |&t| {
            self.state_at(t).map(|(r, u)| Sample { t, r, u })
        })?;
        Worldline::new(self.frame.clone(), samples)
    }
}

/// `t0 + i·dt` for `i = 0..=n_steps`.
pub fn uniform_times(t0: f64, dt: f64, n_steps: usize) -> Vec<f64> {
    (0..=n_steps).map(|i| t0 + dt * i as f64).collect()
}

/// Boosts every sample from the boost's primed frame into its unprimed frame.
///
/// Sample times become γ(t′ + v0 x′(t′)); the order is preserved because
/// dt/dt′ > 0 on subluminal trajectories.
pub fn boost_worldline(w: &Worldline, b: &Boost) -> Result<Worldline> {
    w.frame().expect(b.primed())?;
    let samples = exec::try_map(w.samples(), |s| {
        let e = Event::new(s.t, s.r, w.frame().clone())?;
        let k = boost_event(&e, b, Direction::Forward)?;
        let u = velocity_boost(&Velocity3::from_vec(s.u)?, b)?;
        Ok::<_, Error>(Sample {
            t: k.t,
            r: k.r,
            u: u.vec(),
        })
    })?;
    Worldline::new(b.unprimed().clone(), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::kinematic_g;

    fn circle(t: f64) -> (Vec3, Vec3) {
        let (u0, w) = (0.4, 1.3);
        (
            Vec3::new(u0 / w * (w * t).sin(), u0 / w * (w * t).cos(), 0.0),
            Vec3::new(u0 * (w * t).cos(), -u0 * (w * t).sin(), 0.0),
        )
    }

    #[test]
    fn validation() {
        let s = |t: f64, ux: f64| Sample::new(t, Vec3::zeros(), Vec3::new(ux, 0.0, 0.0));
        assert!(Worldline::new(FrameTag::moving(), vec![s(0.0, 0.1), s(1.0, 0.1)]).is_ok());
        assert!(matches!(
            Worldline::new(FrameTag::moving(), vec![s(0.0, 0.1), s(0.0, 0.1)]),
            Err(Error::NonMonotonicTime { index: 1 })
        ));
        assert!(matches!(
            Worldline::new(FrameTag::moving(), vec![s(0.0, 1.0)]),
            Err(Error::Superluminal { .. })
        ));
        assert!(Worldline::new(FrameTag::moving(), vec![s(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn zero_boost_is_identity_up_to_tag() {
        let w = Worldline::from_fn(FrameTag::moving(), &uniform_times(0.0, 0.01, 100), circle).unwrap();
        let k = boost_worldline(&w, &Boost::new(0.0).unwrap()).unwrap();
        assert_eq!(k.samples(), w.samples());
        assert_eq!(k.frame(), &FrameTag::lab());
    }

    #[test]
    fn boosted_times_follow_event_map_and_kinematic_g() {
        let b = Boost::new(0.7).unwrap();
        let dt = 0.01;
        let w = Worldline::from_fn(FrameTag::moving(), &uniform_times(0.3, dt, 600), circle).unwrap();
        let k = boost_worldline(&w, &b).unwrap();
        for (p, q) in w.samples().iter().zip(k.samples()) {
            assert_eq!(q.t, b.gamma() * (p.t + b.v0() * p.r.x));
        }
        // finite difference dt/dt' at the midpoint vs the kinematic map
        let mut worst: f64 = 0.0;
        for i in 0..w.len() - 1 {
            let ratio = (k.samples()[i + 1].t - k.samples()[i].t) / dt;
            let (_, um) = circle(w.samples()[i].t + dt / 2.0);
            worst = worst.max((ratio - kinematic_g(um.x, &b).unwrap()).abs());
        }
        // second-order oracle: error bounded by gamma v0 u0 w^2 dt^2 / 24
        assert!(worst < 1.4 * 0.7 * 0.4 * 1.69 * dt * dt / 24.0 * 1.01, "worst {worst}");
    }

    #[test]
    fn boost_rejects_wrong_frame() {
        let w = Worldline::from_fn(FrameTag::lab(), &uniform_times(0.0, 0.1, 5), circle).unwrap();
        assert!(boost_worldline(&w, &Boost::new(0.2).unwrap()).is_err());
    }

    #[test]
    fn velocity_consistency_is_second_order() {
        let e1 = Worldline::from_fn(FrameTag::moving(), &uniform_times(0.0, 0.02, 200), circle)
            .unwrap()
            .velocity_consistency();
        let e2 = Worldline::from_fn(FrameTag::moving(), &uniform_times(0.0, 0.01, 400), circle)
            .unwrap()
            .velocity_consistency();
        assert!((e1 / e2 - 4.0).abs() < 0.1);
    }

    #[test]
    fn resampling_boosted_worldline_onto_uniform_grid() {
        let b = Boost::new(0.5).unwrap();
        let w = Worldline::from_fn(FrameTag::moving(), &uniform_times(0.0, 0.005, 2000), circle).unwrap();
        let k = boost_worldline(&w, &b).unwrap();
        let t0 = k.samples()[0].t;
        let r = k.resample_uniform(t0, 0.01, 500).unwrap();
        assert_eq!(r.len(), 501);
        // compare against directly boosted exact states
        for s in r.samples().iter().step_by(37) {
            // invert t = gamma (t' + v0 x'(t')) by bisection
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (rp, _) = circle(mid);
                if b.gamma() * (mid + b.v0() * rp.x) < s.t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (rp, up) = circle(lo);
            let x = b.gamma() * (rp.x + b.v0() * lo);
            let u = velocity_boost(&Velocity3::from_vec(up).unwrap(), &b).unwrap();
            assert!((s.r.x - x).abs() < 1e-9 && (s.r.y - rp.y).abs() < 1e-9);
            assert!((s.u - u.vec()).norm() < 1e-7);
        }
        assert!(k.resample_uniform(t0 - 1.0, 0.01, 5).is_err());
    }
}
