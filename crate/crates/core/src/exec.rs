//! Execution strategy for the data-parallel kernels.
//!
//! Every grid sweep in the crate goes through [`map_collect`] or [`sum_pairwise`]
//! so that the same code runs on rayon when the `parallel` feature is enabled
//! and on plain iterators otherwise. [`Execution::Sequential`] forces the
//! sequential path even when rayon is compiled in; the benches use it to
//! compare both.

use std::sync::atomic::{AtomicU8, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(1);

/// Sets the process-wide execution mode. `Parallel` silently degrades to
/// sequential when the crate is built without the `parallel` feature.
pub fn set_execution(mode: Execution) {
    MODE.store(matches!(mode, Execution::Parallel) as u8, Ordering::Relaxed);
}

pub fn execution() -> Execution {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Runs `f` with the given mode and restores the previous one afterwards.
pub fn with_execution<R>(mode: Execution, f: impl FnOnce() -> R) -> R {
    let prev = execution();
    set_execution(mode);
    let out = f();
    set_execution(prev);
    out
}

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "HKIT_THREADS";

/// Sizes the global worker pool from [`WORKERS_ENV`]. `1` selects the sequential
/// path; unset leaves the default pool. Returns the count that was applied.
pub fn init_workers_from_env() -> Result<Option<usize>, String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("{WORKERS_ENV}={raw} is not a worker count"))?;
    if n == 0 {
        return Err(format!("{WORKERS_ENV} must be at least 1"));
    }
    if n == 1 {
        set_execution(Execution::Sequential);
        return Ok(Some(1));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    Ok(Some(n))
}

/// `(0..n).map(f).collect()`, in parallel when enabled. Output order is the index order.
pub fn map_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Maps over a slice, in parallel when enabled.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match execution() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Pairwise (cascade) summation of `n` terms.
///
/// The tree shape depends only on `n`, so sequential and parallel runs give
/// bit-identical results.
pub fn sum_pairwise<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    fn rec<F: Fn(usize) -> f64 + Sync + Send>(lo: usize, hi: usize, f: &F, par: bool) -> f64 {
        let len = hi - lo;
        if len <= 64 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + len / 2;
        #[cfg(feature = "parallel")]
        if par && len > 4096 {
            let (a, b) = rayon::join(|| rec(lo, mid, f, par), || rec(mid, hi, f, par));
            return a + b;
        }
        let _ = par;
        rec(lo, mid, f, false) + rec(mid, hi, f, false)
    }
    if n == 0 {
        return 0.0;
    }
    rec(0, n, &f, execution() == Execution::Parallel)
}

/// Minimum of `f` over `0..n` together with its index (first index on ties).
pub fn min_by_index<F>(n: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let pick = |a: (usize, f64), b: (usize, f64)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    if n == 0 {
        return None;
    }
    match execution() {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n)
            .into_par_iter()
            .map(|i| (i, f(i)))
            .reduce_with(pick),
        _ => (0..n).map(|i| (i, f(i))).reduce(pick),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_across_modes() {
        let f = |i: usize| 1.0 / (1.0 + i as f64).powf(1.3);
        let a = with_execution(Execution::Sequential, || sum_pairwise(100_000, f));
        let b = with_execution(Execution::Parallel, || sum_pairwise(100_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn min_picks_first_on_ties() {
        let v = [3.0, 1.0, 2.0, 1.0];
        assert_eq!(min_by_index(4, |i| v[i]), Some((1, 1.0)));
        assert_eq!(min_by_index(0, |i| v[i]), None);
    }
}
