//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these run on the rayon global pool;
//! without it they are plain sequential loops. All helpers preserve input
//! order, and the reductions offered here are exact (coordinatewise max), so
//! results are bit-identical across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Coordinatewise maximum of `f(item)` over all items, starting from `init`.
///
/// Every `f(item)` must have the same length as `init`.
pub fn max_reduce<T, F>(items: &[T], init: Vec<f64>, f: F) -> Vec<f64>
where
    T: Sync,
    F: Fn(&T) -> Vec<f64> + Sync + Send,
{
    let merge = |mut acc: Vec<f64>, v: Vec<f64>| {
        for (a, b) in acc.iter_mut().zip(v) {
            if b > *a {
                *a = b;
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    {
        let n = init.len();
        let partial = items
            .par_iter()
            .fold(|| vec![f64::NEG_INFINITY; n], |acc, item| merge(acc, f(item)))
            .reduce(|| vec![f64::NEG_INFINITY; n], merge);
        merge(init, partial)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().fold(init, |acc, item| merge(acc, f(item)))
    }
}

/// Fallible order-preserving map; returns the first error in input order.
pub fn try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(items, f).into_iter().collect()
}
