//! Events, standard-configuration boosts and the differential time maps
//! between two inertial frames.
//!
//! Units are natural (c = 1). Frame K′ moves along the shared x-axis with
//! velocity `v0` relative to K, and the two coincide at t = t′ = 0. A
//! [`Boost`] in the [`Direction::Forward`] direction maps K′ coordinates to
//! K coordinates:
//!
//! ```text
//! t = γ(t′ + v0 x′),  x = γ(x′ + v0 t′),  y = y′,  z = z′
//! ```

use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{ensure_finite, Error, Result};

pub type Vec3 = Vector3<f64>;

/// Names the inertial frame a set of coordinates lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameTag(String);

impl FrameTag {
    pub const LAB: &'static str = "K";
    pub const MOVING: &'static str = "K'";

    pub fn new(name: impl Into<String>) -> Self {
        FrameTag(name.into())
    }

    /// The unprimed frame K.
    pub fn lab() -> Self {
        FrameTag::new(Self::LAB)
    }

    /// The primed frame K′.
    pub fn moving() -> Self {
        FrameTag::new(Self::MOVING)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn expect(&self, expected: &FrameTag) -> Result<()> {
        if self == expected {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected: expected.0.clone(),
                found: self.0.clone(),
            })
        }
    }
}

impl fmt::Display for FrameTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A point (t, r) in one frame's Galilean coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub r: Vec3,
    pub frame: FrameTag,
}

impl Event {
    pub fn new(t: f64, r: Vec3, frame: FrameTag) -> Result<Self> {
        ensure_finite("event time", t)?;
        for c in r.iter() {
            ensure_finite("event position", *c)?;
        }
        Ok(Event { t, r, frame })
    }

    /// Squared interval Δt² − |Δr|² to another event in the same frame.
    pub fn interval_sq(&self, other: &Event) -> Result<f64> {
        other.frame.expect(&self.frame)?;
        let dt = other.t - self.t;
        Ok(dt * dt - (other.r - self.r).norm_squared())
    }
}

/// Lorentz factor (1 − v0²)^(−1/2).
pub fn lorentz_gamma(v0: f64) -> Result<f64> {
    if !v0.is_finite() || v0.abs() >= 1.0 {
        return Err(Error::Domain {
            quantity: "v0",
            value: v0,
            constraint: "|v0| < 1",
        });
    }
    Ok(1.0 / (1.0 - v0 * v0).sqrt())
}

/// Which way a [`Boost`] is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// K′ → K.
    Forward,
    /// K → K′.
    Inverse,
}

/// Standard-configuration boost between the primed frame (moving with `v0`
/// along x) and the unprimed frame. γ is recomputed on read.
#[derive(Clone, Debug, PartialEq)]
pub struct Boost {
    v0: f64,
    primed: FrameTag,
    unprimed: FrameTag,
}

impl Boost {
    /// Boost from K′ to K with the default frame tags.
    pub fn new(v0: f64) -> Result<Self> {
        Self::with_frames(v0, FrameTag::moving(), FrameTag::lab())
    }

    pub fn with_frames(v0: f64, primed: FrameTag, unprimed: FrameTag) -> Result<Self> {
        lorentz_gamma(v0)?;
        Ok(Boost {
            v0,
            primed,
            unprimed,
        })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.v0 * self.v0).sqrt()
    }

    /// Frame whose coordinates are the input of a forward boost.
    pub fn primed(&self) -> &FrameTag {
        &self.primed
    }

    /// Frame whose coordinates are the output of a forward boost.
    pub fn unprimed(&self) -> &FrameTag {
        &self.unprimed
    }

    /// The K → K′ boost, expressed as a forward boost in its own right.
    pub fn inverse(&self) -> Boost {
        Boost {
            v0: -self.v0,
            primed: self.unprimed.clone(),
            unprimed: self.primed.clone(),
        }
    }

    /// Matrix L with x^i = L_ik x′^k.
    pub fn matrix(&self) -> Matrix4<f64> {
        let g = self.gamma();
        let gv = g * self.v0;
        Matrix4::new(
            g, gv, 0.0, 0.0, //
            gv, g, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        )
    }

    pub(crate) fn oriented(&self, direction: Direction) -> Boost {
        match direction {
            Direction::Forward => self.clone(),
            Direction::Inverse => self.inverse(),
        }
    }
}

/// Applies the boost to an event; the event must carry the source frame's tag.
pub fn boost_event(e: &Event, b: &Boost, direction: Direction) -> Result<Event> {
    let b = b.oriented(direction);
    e.frame.expect(b.primed())?;
    let g = b.gamma();
    let v0 = b.v0();
    Ok(Event {
        t: g * (e.t + v0 * e.r.x),
        r: Vec3::new(g * (e.r.x + v0 * e.t), e.r.y, e.r.z),
        frame: b.unprimed().clone(),
    })
}

/// Particle velocity as a fraction of c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity3(Vec3);

impl Velocity3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    /// Checks |u| < 1 and finiteness.
    pub fn from_vec(u: Vec3) -> Result<Self> {
        let speed = u.norm();
        if !speed.is_finite() {
            return Err(Error::NonFinite {
                quantity: "velocity".into(),
            });
        }
        if speed >= 1.0 {
            return Err(Error::Domain {
                quantity: "|u|",
                value: speed,
                constraint: "|u| < 1",
            });
        }
        Ok(Velocity3(u))
    }

    pub fn zero() -> Self {
        Velocity3(Vec3::zeros())
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn speed(&self) -> f64 {
        self.0.norm()
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    /// Lorentz factor of the particle, (1 − u²)^(−1/2).
    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.0.norm_squared()).sqrt()
    }
}

fn check_unit_interval(quantity: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value,
            constraint: "|value| <= 1",
        })
    }
}

/// Collinear velocity addition (u′ₓ + v0)/(1 + u′ₓ v0).
pub fn velocity_addition_x(ux_prime: f64, v0: f64) -> Result<f64> {
    check_unit_interval("ux_prime", ux_prime)?;
    lorentz_gamma(v0)?;
    Ok((ux_prime + v0) / (1.0 + ux_prime * v0))
}

/// Transforms a K′ velocity into K (forward boost).
pub fn velocity_boost(u_prime: &Velocity3, b: &Boost) -> Result<Velocity3> {
    let u = u_prime.vec();
    let v0 = b.v0();
    let denom = 1.0 + v0 * u.x;
    let transverse = 1.0 / (b.gamma() * denom);
    Velocity3::from_vec(Vec3::new(
        (u.x + v0) / denom,
        u.y * transverse,
        u.z * transverse,
    ))
}

/// dt/dt′ = γ(1 + v0 u′ₓ) along a trajectory with K′ velocity component u′ₓ.
pub fn kinematic_g(ux_prime: f64, b: &Boost) -> Result<f64> {
    check_unit_interval("ux_prime", ux_prime)?;
    Ok(b.gamma() * (1.0 + b.v0() * ux_prime))
}

/// dt′/dt = γ(1 − v0 uₓ) along a trajectory with K velocity component uₓ.
pub fn inverse_kinematic_g(ux: f64, b: &Boost) -> Result<f64> {
    check_unit_interval("ux", ux)?;
    Ok(b.gamma() * (1.0 - b.v0() * ux))
}

/// K′ velocity component u* = (√(1 − v0²) − 1)/v0 at which dt = dt′.
///
/// Undefined at v0 = 0, where every velocity qualifies (the limit of the
/// formula is 0).
pub fn crossover_velocity(v0: f64) -> Result<f64> {
    lorentz_gamma(v0)?;
    if v0 == 0.0 {
        return Err(Error::Domain {
            quantity: "v0",
            value: v0,
            constraint: "0 < |v0| < 1",
        });
    }
    // Rationalized form of (sqrt(1 - v0^2) - 1)/v0, free of cancellation at small v0.
    Ok(-v0 / (1.0 + (1.0 - v0 * v0).sqrt()))
}

/// dτ/dt = √(1 − u²).
pub fn proper_time_rate(u: &Velocity3) -> f64 {
    (1.0 - u.vec().norm_squared()).sqrt()
}

/// dx/dx′ = γ(1 + v0/u′ₓ) along the trajectory.
pub fn spatial_scale_ratio(ux_prime: f64, b: &Boost) -> Result<f64> {
    check_unit_interval("ux_prime", ux_prime)?;
    if ux_prime == 0.0 {
        return Err(Error::Domain {
            quantity: "ux_prime",
            value: ux_prime,
            constraint: "ux_prime != 0",
        });
    }
    Ok(b.gamma() * (1.0 + b.v0() / ux_prime))
}

/// Contravariant field tensor F^{ik} with the layout
///
/// ```text
///        0    -Ex  -Ey  -Ez
///        Ex    0   -Bz   By
///        Ey    Bz   0   -Bx
///        Ez   -By   Bx   0
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldTensor(Matrix4<f64>);

/// Largest |F + Fᵀ| entry accepted as antisymmetric.
const ANTISYMMETRY_TOL: f64 = 1e-12;

impl FieldTensor {
    pub fn from_fields(e: &Vec3, b: &Vec3) -> Self {
        FieldTensor(Matrix4::new(
            0.0, -e.x, -e.y, -e.z, //
            e.x, 0.0, -b.z, b.y, //
            e.y, b.z, 0.0, -b.x, //
            e.z, -b.y, b.x, 0.0,
        ))
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Result<Self> {
        let scale = m.amax().max(1.0);
        let asymmetry = (m + m.transpose()).amax();
        if !asymmetry.is_finite() || asymmetry > ANTISYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric { asymmetry });
        }
        Ok(FieldTensor(m))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn electric(&self) -> Vec3 {
        Vec3::new(self.0[(1, 0)], self.0[(2, 0)], self.0[(3, 0)])
    }

    pub fn magnetic(&self) -> Vec3 {
        Vec3::new(self.0[(3, 2)], self.0[(1, 3)], self.0[(2, 1)])
    }

    /// The invariants (B² − E², E·B).
    pub fn invariants(&self) -> (f64, f64) {
        let e = self.electric();
        let b = self.magnetic();
        (b.norm_squared() - e.norm_squared(), e.dot(&b))
    }
}

/// Transforms the field tensor from the boost's primed frame to its unprimed
/// frame: F = L F′ Lᵀ.
pub fn boost_field_tensor(f: &FieldTensor, b: &Boost) -> FieldTensor {
    let l = b.matrix();
    FieldTensor(l * f.0 * l.transpose())
}
