//! Index-ordered map over independent work items.
//!
//! With the `parallel` feature the map runs on the rayon pool when the caller
//! asks for it; otherwise (or without the feature) it is a plain loop. Output
//! order always follows the input index, so aggregation is deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && n > 1 {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    (0..n).map(f).collect()
}

/// True when this build can actually run data-parallel.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
