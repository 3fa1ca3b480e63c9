//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) [`map`] and [`try_map`] fan out over
//! the rayon global pool; without it they fall back to a plain sequential
//! iterator. [`map_sequential`] is always sequential and exists so benchmarks
//! and tests can compare both paths in the same build. Output order always
//! matches input order, so results are identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Inputs shorter than this are mapped sequentially even with `parallel` on.
pub const PARALLEL_THRESHOLD: usize = 256;

/// Returns true when [`map`] may dispatch to the thread pool.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

pub fn map_sequential<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if items.len() < PARALLEL_THRESHOLD {
        return map_sequential(items, f);
    }
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_sequential(items, f)
}

/// Like [`map`] but ignores [`PARALLEL_THRESHOLD`]; for coarse work items
/// (whole integrations, parameter sweeps) where even a handful is worth
/// spreading out.
#[cfg(feature = "parallel")]
pub fn map_coarse<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_coarse<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_sequential(items, f)
}

/// Fallible [`map`]; returns the first error in input order.
pub fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}

/// Fallible [`map_coarse`]; returns the first error in input order.
pub fn try_map_coarse<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    map_coarse(items, f).into_iter().collect()
}
