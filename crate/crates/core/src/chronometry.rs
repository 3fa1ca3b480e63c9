//! The time-course map dt = g(t′) dt′ along a worldline, computed three
//! independent ways:
//!
//! * kinematic: g = γ(1 + v0 u′ₓ), from differentiating the event map;
//! * ratio: g = √[(1 − u′²)/(1 − u²)] with u the boosted velocity;
//! * dynamic: g_i = (L f′)^i / f^i, the ratio of the boosted K′ 4-force to
//!   the 4-force evaluated directly in K, for every non-degenerate index i.
//!
//! Each map is stored as sampled g together with its running integral, the
//! K time t(t′) accumulated from the K time of the first event.

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::dynamics::{contract_four_force, FieldConfig};
use crate::error::{Error, Result};
use crate::exec;
use crate::quadrature::{self, Antiderivative};
use crate::spacetime::{boost_event, boost_field_tensor, kinematic_g, velocity_boost, Boost, Direction, Event, FieldTensor, Velocity3};
use crate::worldline::Worldline;

/// Components with |f^i| at or below this fraction of max_i |f^i| are left
/// out of the dynamic ratio.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Floor of the relative agreement demanded between component ratios.
pub const RATIO_CONSISTENCY_TOL: f64 = 1e-9;

/// Which formula produced a [`TimeMap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Kinematic,
    Dynamic,
    Ratio,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Kinematic => "kinematic",
            Provenance::Dynamic => "dynamic",
            Provenance::Ratio => "ratio",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kinematic" => Ok(Provenance::Kinematic),
            "dynamic" => Ok(Provenance::Dynamic),
            "ratio" => Ok(Provenance::Ratio),
            other => Err(Error::Parse(format!("unknown time-map method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeMapSample {
    pub t_prime: f64,
    pub g: f64,
    /// K time of the event, accumulated as t(t′₀) + ∫ g dt′.
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeMap {
    samples: Vec<TimeMapSample>,
    boost: Boost,
    provenance: Provenance,
}

impl TimeMap {
    /// Integrates sampled g from the K time `t_start` of the first event.
    pub fn from_rates(t_prime: &[f64], g: &[f64], t_start: f64, boost: Boost, provenance: Provenance) -> Result<Self> {
        if let Some(i) = g.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Domain {
                quantity: "g",
                value: g[i],
                constraint: "finite and > 0",
            });
        }
        let accumulated = quadrature::cumulative(t_prime, g)?;
        let samples: Vec<TimeMapSample> = t_prime
            .iter()
            .zip(g)
            .zip(&accumulated)
            .map(|((&t_prime, &g), &acc)| TimeMapSample {
                t_prime,
                g,
                t: t_start + acc,
            })
            .collect();
        if let Some(i) = samples.windows(2).position(|w| !(w[1].t > w[0].t)) {
            return Err(Error::NonMonotonicTime { index: i + 1 });
        }
        Ok(TimeMap {
            samples,
            boost,
            provenance,
        })
    }

    pub fn samples(&self) -> &[TimeMapSample] {
        &self.samples
    }

    pub fn boost(&self) -> &Boost {
        &self.boost
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn g(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.g).collect()
    }

    pub fn t_prime(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t_prime).collect()
    }

    /// max |g − g_other| over shared samples.
    pub fn max_g_discrepancy(&self, other: &TimeMap) -> Result<f64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::GridMismatch {
                index: self.samples.len().min(other.samples.len()),
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.g - b.g).abs())
            .fold(0.0, f64::max))
    }

    /// max |t_accumulated − γ(t′ + v0 x′(t′))| against the exact event map.
    pub fn max_event_map_error(&self, w_prime: &Worldline) -> Result<f64> {
        let direct = event_times(w_prime, &self.boost)?;
        if direct.len() != self.samples.len() {
            return Err(Error::GridMismatch {
                index: direct.len().min(self.samples.len()),
            });
        }
        Ok(self
            .samples
            .iter()
            .zip(direct)
            .map(|(s, t)| (s.t - t).abs())
            .fold(0.0, f64::max))
    }
}

/// K time γ(t′ + v0 x′) of every sample.
fn event_times(w: &Worldline, b: &Boost) -> Result<Vec<f64>> {
    w.samples()
        .iter()
        .map(|s| {
            let e = Event::new(s.t, s.r, w.frame().clone())?;
            Ok(boost_event(&e, b, Direction::Forward)?.t)
        })
        .collect()
}

fn start_time(w: &Worldline, b: &Boost) -> Result<f64> {
    let s = w.samples().first().ok_or(Error::TooFewSamples { required: 4, found: 0 })?;
    let e = Event::new(s.t, s.r, w.frame().clone())?;
    Ok(boost_event(&e, b, Direction::Forward)?.t)
}

/// g = γ(1 + v0 u′ₓ) sampled along a K′ worldline.
pub fn time_map_kinematic(w_prime: &Worldline, b: &Boost) -> Result<TimeMap> {
    w_prime.frame().expect(b.primed())?;
    let g = exec::try_map(w_prime.samples(), |s| kinematic_g(s.u.x, b))?;
    TimeMap::from_rates(&w_prime.times(), &g, start_time(w_prime, b)?, b.clone(), Provenance::Kinematic)
}

/// g = √[(1 − u′²)/(1 − u²)] with u = velocity_boost(u′).
pub fn time_map_ratio(w_prime: &Worldline, b: &Boost) -> Result<TimeMap> {
    w_prime.frame().expect(b.primed())?;
    let g = exec::try_map(w_prime.samples(), |s| {
        let u = velocity_boost(&Velocity3::from_vec(s.u)?, b)?;
        Ok::<_, Error>(((1.0 - s.u.norm_squared()) / (1.0 - u.vec().norm_squared())).sqrt())
    })?;
    TimeMap::from_rates(&w_prime.times(), &g, start_time(w_prime, b)?, b.clone(), Provenance::Ratio)
}

/// Component ratios at one sample; `None` marks a degenerate component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentRatios {
    pub t_prime: f64,
    pub g: [Option<f64>; 4],
    /// |f^i| / max_k |f^k| per component.
    pub weight: [f64; 4],
    /// Index of the largest |f^i|; its ratio is the best conditioned.
    pub reference: usize,
}

impl ComponentRatios {
    pub fn reference_g(&self) -> f64 {
        self.g[self.reference].expect("reference component is defined")
    }

    /// max_i g_i − min_i g_i over defined components.
    pub fn spread(&self) -> f64 {
        let defined = self.g.iter().flatten();
        let max = defined.clone().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let min = defined.fold(f64::INFINITY, |a, &b| a.min(b));
        max - min
    }

    pub fn defined(&self) -> usize {
        self.g.iter().flatten().count()
    }
}

struct DynamicSetup {
    field_prime: FieldTensor,
    field_k: FieldTensor,
    boost: Boost,
}

impl DynamicSetup {
    fn new(w_prime: &Worldline, f_prime: &FieldConfig, b: &Boost) -> Result<Self> {
        w_prime.frame().expect(b.primed())?;
        f_prime.frame.expect(b.primed())?;
        let field_prime = f_prime.tensor();
        Ok(DynamicSetup {
            field_k: boost_field_tensor(&field_prime, b),
            field_prime,
            boost: b.clone(),
        })
    }

    fn ratios(&self, t_prime: f64, u_prime: &nalgebra::Vector3<f64>) -> Result<ComponentRatios> {
        let u = velocity_boost(&Velocity3::from_vec(*u_prime)?, &self.boost)?.vec();
        // the charge cancels in the ratio
        let boosted: Vector4<f64> = self.boost.matrix() * contract_four_force(&self.field_prime, u_prime, 1.0);
        let direct = contract_four_force(&self.field_k, &u, 1.0);
        let scale = direct.amax();
        if !(scale > 0.0) {
            return Err(Error::ZeroFourForce { t_prime });
        }
        let mut g = [None; 4];
        let mut weight = [0.0; 4];
        for i in 0..4 {
            weight[i] = direct[i].abs() / scale;
            if weight[i] > DEGENERACY_THRESHOLD {
                g[i] = Some(boosted[i] / direct[i]);
            }
        }
        let reference = (0..4)
            .max_by(|&a, &c| weight[a].total_cmp(&weight[c]))
            .expect("four components");
        Ok(ComponentRatios {
            t_prime,
            g,
            weight,
            reference,
        })
    }
}

/// Relative disagreement tolerated for a component of relative weight `w`:
/// the floor [`RATIO_CONSISTENCY_TOL`], widened in proportion to the
/// cancellation a small |f^i| suffers.
fn consistency_tol(weight: f64) -> f64 {
    RATIO_CONSISTENCY_TOL.max(1e-12 / weight)
}

/// g from the 4-force ratio g_i = (L f′)^i / f^i in a homogeneous field.
///
/// The returned g at each sample is the ratio of the best-conditioned
/// component; all other non-degenerate components must agree with it.
pub fn time_map_dynamic(w_prime: &Worldline, f_prime: &FieldConfig, b: &Boost) -> Result<TimeMap> {
    let setup = DynamicSetup::new(w_prime, f_prime, b)?;
    let g = exec::try_map(w_prime.samples(), |s| {
        let ratios = setup.ratios(s.t, &s.u)?;
        let reference = ratios.reference_g();
        for (i, gi) in ratios.g.iter().enumerate() {
            if let Some(gi) = gi {
                if (gi - reference).abs() > consistency_tol(ratios.weight[i]) * reference.abs() {
                    return Err(Error::InconsistentRatio {
                        t_prime: s.t,
                        index: i,
                        value: *gi,
                        reference,
                    });
                }
            }
        }
        Ok(reference)
    })?;
    TimeMap::from_rates(&w_prime.times(), &g, start_time(w_prime, b)?, b.clone(), Provenance::Dynamic)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    pub rows: Vec<ComponentRatios>,
    pub max_spread: f64,
}

impl IndexReport {
    /// Largest spread among samples whose defined components all carry at
    /// least `min_weight` of the largest |f^i|.
    pub fn max_spread_above(&self, min_weight: f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.g.iter().zip(r.weight).all(|(g, w)| g.is_none() || w >= min_weight))
            .map(ComponentRatios::spread)
            .fold(0.0, f64::max)
    }

    pub fn check(&self, tolerance: f64) -> Result<()> {
        match self.rows.iter().find(|r| !(r.spread() < tolerance)) {
            None => Ok(()),
            Some(r) => {
                let (index, value) = r
                    .g
                    .iter()
                    .enumerate()
                    .filter_map(|(i, g)| g.map(|g| (i, g)))
                    .max_by(|a, b| (a.1 - r.reference_g()).abs().total_cmp(&(b.1 - r.reference_g()).abs()))
                    .expect("at least one component");
                Err(Error::InconsistentRatio {
                    t_prime: r.t_prime,
                    index,
                    value,
                    reference: r.reference_g(),
                })
            }
        }
    }
}

/// Per-sample spread of the component ratios g_i.
pub fn index_independence_report(w_prime: &Worldline, f_prime: &FieldConfig, b: &Boost) -> Result<IndexReport> {
    let setup = DynamicSetup::new(w_prime, f_prime, b)?;
    let rows = exec::try_map(w_prime.samples(), |s| setup.ratios(s.t, &s.u))?;
    let max_spread = rows.iter().map(ComponentRatios::spread).fold(0.0, f64::max);
    Ok(IndexReport { rows, max_spread })
}

/// Relative velocity mismatch tolerated when checking periodicity.
pub const PERIODICITY_TOL: f64 = 1e-6;

/// ∫ g dt′ over [t′₀, t′₀ + window·T′] for a worldline whose velocity has
/// period T′ (`period`).
///
/// The worldline must span at least one period so periodicity can be
/// checked; the integration window must lie inside the samples.
pub fn period_map_numeric(w_prime: &Worldline, b: &Boost, t0_prime: f64, window: f64, period: f64) -> Result<f64> {
    w_prime.frame().expect(b.primed())?;
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::Domain {
            quantity: "period",
            value: period,
            constraint: "finite and > 0",
        });
    }
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::Domain {
            quantity: "window",
            value: window,
            constraint: "finite and > 0",
        });
    }
    check_periodic(w_prime, period)?;
    let ts = w_prime.times();
    let g = w_prime
        .samples()
        .iter()
        .map(|s| kinematic_g(s.u.x, b))
        .collect::<Result<Vec<_>>>()?;
    Antiderivative::new(&ts, &g)?.between(t0_prime, t0_prime + window * period)
}

fn check_periodic(w: &Worldline, period: f64) -> Result<()> {
    let samples = w.samples();
    if samples.len() < 4 {
        return Err(Error::TooFewSamples {
            required: 4,
            found: samples.len(),
        });
    }
    let first = samples[0].t;
    let last = samples[samples.len() - 1].t;
    let slack = last - first - period;
    if slack < -quadrature::UNIFORM_GRID_TOL * period {
        return Err(Error::NonPeriodic {
            period,
            mismatch: f64::INFINITY,
        });
    }
    let slack = slack.max(0.0);
    let scale = samples.iter().map(|s| s.u.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        let a = first + slack * k as f64 / 7.0;
        let b = (a + period).min(last);
        let (_, ua) = w.state_at(a)?;
        let (_, ub) = w.state_at(b)?;
        worst = worst.max((ua - ub).norm() / scale);
    }
    if worst > PERIODICITY_TOL {
        return Err(Error::NonPeriodic {
            period,
            mismatch: worst,
        });
    }
    Ok(())
}

/// K-time difference t₂ − t₁ between events of two worldlines that share
/// K′ time t′, computed by boosting both events and subtracting.
pub fn simultaneity_series(w1_prime: &Worldline, w2_prime: &Worldline, b: &Boost) -> Result<Vec<(f64, f64)>> {
    w1_prime.frame().expect(b.primed())?;
    w2_prime.frame().expect(b.primed())?;
    if w1_prime.len() != w2_prime.len() {
        return Err(Error::GridMismatch {
            index: w1_prime.len().min(w2_prime.len()),
        });
    }
    w1_prime
        .samples()
        .iter()
        .zip(w2_prime.samples())
        .enumerate()
        .map(|(i, (s1, s2))| {
            if (s1.t - s2.t).abs() > 1e-12 * s1.t.abs().max(1.0) {
                return Err(Error::GridMismatch { index: i });
            }
            let k1 = boost_event(&Event::new(s1.t, s1.r, w1_prime.frame().clone())?, b, Direction::Forward)?;
            let k2 = boost_event(&Event::new(s1.t, s2.r, w2_prime.frame().clone())?, b, Direction::Forward)?;
            Ok((s1.t, k2.t - k1.t))
        })
        .collect()
}
