//! Index-range combinators with a rayon backend and a sequential fallback.
//!
//! Every combinator produces the same value regardless of the execution
//! mode: reductions that pick an element always pick the lowest index.

use crate::settings::Execution;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
fn parallel(exec: Execution) -> bool {
    exec == Execution::Parallel
}

pub(crate) fn map<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel(exec) {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

pub(crate) fn all<F>(exec: Execution, len: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel(exec) {
        return (0..len).into_par_iter().all(f);
    }
    let _ = exec;
    (0..len).all(f)
}

/// Largest value and the lowest index attaining it; `None` on an empty range.
pub(crate) fn argmax<F>(exec: Execution, len: usize, f: F) -> Option<(usize, f64)>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if parallel(exec) {
        return (0..len)
            .into_par_iter()
            .map(|i| (i, f(i)))
            .reduce_with(better);
    }
    let _ = exec;
    (0..len).map(|i| (i, f(i))).reduce(better)
}
