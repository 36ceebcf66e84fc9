//! Order-preserving indexed map, parallel when the `parallel` feature is
//! enabled. Results are collected by index, so output never depends on the
//! worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn par_map_collect<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
