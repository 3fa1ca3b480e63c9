//! Cumulative quadrature and interpolation on sampled grids.

use crate::error::{Error, Result};
use crate::spacetime::Vec3;

/// Relative spacing deviation under which a grid counts as uniform.
pub const UNIFORM_GRID_TOL: f64 = 1e-9;

/// Returns the step if `ts` is a uniform grid.
pub fn uniform_step(ts: &[f64]) -> Option<f64> {
    if ts.len() < 2 {
        return None;
    }
    let n = ts.len() - 1;
    let h = (ts[n] - ts[0]) / n as f64;
    if !(h > 0.0) {
        return None;
    }
    ts.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORM_GRID_TOL * h)
        .then_some(h)
}

/// Running integral of `ys` over `ts`, starting at zero.
///
/// Uniform grids use composite Simpson at even nodes and a four-point
/// single-interval cubic rule at odd nodes; non-uniform grids integrate the local
/// four-point Lagrange cubic over each interval. Both are fourth order.
pub fn cumulative(ts: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if ts.len() != ys.len() {
        return Err(Error::ParameterMismatch(format!(
            "{} abscissae but {} ordinates",
            ts.len(),
            ys.len()
        )));
    }
    if ts.len() < 4 {
        return Err(Error::TooFewSamples {
            required: 4,
            found: ts.len(),
        });
    }
    match uniform_step(ts) {
        Some(h) => Ok(cumulative_simpson(h, ys)),
        None => Ok(cumulative_cubic(ts, ys)),
    }
}

fn cumulative_simpson(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut c = vec![0.0; n];
    c[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for i in 2..n {
        c[i] = if i % 2 == 0 {
            c[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i])
        } else if i + 1 < n {
            c[i - 1] + h / 24.0 * (-f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1])
        } else {
            c[i - 1] + h / 24.0 * (f[i - 3] - 5.0 * f[i - 2] + 19.0 * f[i - 1] + 9.0 * f[i])
        };
    }
    c
}

fn cumulative_cubic(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; ts.len()];
    for i in 0..ts.len() - 1 {
        c[i + 1] = c[i] + stencil_integral(ts, ys, i, ts[i + 1]);
    }
    c
}

/// Definite integral over the whole grid.
pub fn integrate(ts: &[f64], ys: &[f64]) -> Result<f64> {
    Ok(*cumulative(ts, ys)?.last().expect("non-empty"))
}

/// Four-node stencil start index for interval `i` (clamped at the ends).
fn stencil(len: usize, i: usize) -> usize {
    i.saturating_sub(1).min(len.saturating_sub(4))
}

fn lagrange(ts: &[f64], ys: &[f64], start: usize, x: f64) -> f64 {
    let nodes = &ts[start..start + 4];
    let vals = &ys[start..start + 4];
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (x - nodes[m]) / (nodes[j] - nodes[m]);
            }
        }
        acc += w * vals[j];
    }
    acc
}

/// ∫ from ts[i] to x of the cubic interpolant around interval i
/// (three-point Gauss-Legendre, exact for cubics).
fn stencil_integral(ts: &[f64], ys: &[f64], i: usize, x: f64) -> f64 {
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let start = stencil(ts.len(), i);
    let a = ts[i];
    let half = 0.5 * (x - a);
    let mid = 0.5 * (x + a);
    NODES
        .iter()
        .zip(WEIGHTS)
        .map(|(n, w)| w * lagrange(ts, ys, start, mid + half * n))
        .sum::<f64>()
        * half
}

/// Index of the interval containing x (last interval for x == ts[last]).
fn locate(ts: &[f64], x: f64) -> usize {
    let k = ts.partition_point(|&t| t <= x);
    k.saturating_sub(1).min(ts.len() - 2)
}

/// A sampled function plus its running integral, queryable between nodes.
#[derive(Clone, Debug)]
pub struct Antiderivative<'a> {
    ts: &'a [f64],
    ys: &'a [f64],
    cumulative: Vec<f64>,
}

impl<'a> Antiderivative<'a> {
    pub fn new(ts: &'a [f64], ys: &'a [f64]) -> Result<Self> {
        let cumulative = cumulative(ts, ys)?;
        Ok(Antiderivative { ts, ys, cumulative })
    }

    pub fn at_nodes(&self) -> &[f64] {
        &self.cumulative
    }

    /// Antiderivative value at an arbitrary x inside the grid.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (first, last) = (self.ts[0], self.ts[self.ts.len() - 1]);
        let slack = UNIFORM_GRID_TOL * (last - first);
        if !(x >= first - slack && x <= last + slack) {
            return Err(Error::OutOfRange {
                start: x,
                end: x,
                first,
                last,
            });
        }
        let i = locate(self.ts, x);
        Ok(self.cumulative[i] + stencil_integral(self.ts, self.ys, i, x))
    }

    /// ∫ over [a, b].
    pub fn between(&self, a: f64, b: f64) -> Result<f64> {
        let lo = self.eval(a).map_err(|_| self.range_error(a, b))?;
        let hi = self.eval(b).map_err(|_| self.range_error(a, b))?;
        Ok(hi - lo)
    }

    fn range_error(&self, a: f64, b: f64) -> Error {
        Error::OutOfRange {
            start: a,
            end: b,
            first: self.ts[0],
            last: self.ts[self.ts.len() - 1],
        }
    }
}

/// Cubic interpolation of sampled scalars at an arbitrary point.
pub fn interpolate(ts: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = locate(ts, x);
    lagrange(ts, ys, stencil(ts.len(), i), x)
}

/// Cubic Hermite interpolation on [t0, t1] from values and slopes.
/// Returns (value, derivative) at `t`.
pub fn hermite(t0: f64, t1: f64, y0: &Vec3, y1: &Vec3, d0: &Vec3, d1: &Vec3, t: f64) -> (Vec3, Vec3) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h);
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = y0 * dh00 + d0 * dh10 + y1 * dh01 + d1 * dh11;
    (value, slope)
}
