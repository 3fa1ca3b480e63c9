//! Relativistic point-charge dynamics and the time-course maps dt = g(t′) dt′
//! between standard-configuration inertial frames along particle worldlines.
//!
//! Natural units (c = 1) throughout.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod chronometry;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod io;
pub mod perturbation;
pub mod quadrature;
pub mod spacetime;
pub mod worldline;

pub use error::{Error, Result};
pub use spacetime::{Boost, Direction, Event, FieldTensor, FrameTag, Vec3, Velocity3};
pub use worldline::{Sample, Worldline};
