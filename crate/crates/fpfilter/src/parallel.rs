//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they are plain loops. Callers always get results in input order, so the
//! output is bit-identical either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Apply `f(element, paired)` over two slices of equal length.
#[cfg(feature = "parallel")]
pub fn zip_apply<T, S, F>(items: &mut [T], other: &[S], f: F)
where
    T: Send,
    S: Sync,
    F: Fn(&mut T, &S) + Sync + Send,
{
    debug_assert_eq!(items.len(), other.len());
    items
        .par_iter_mut()
        .zip(other.par_iter())
        .for_each(|(x, y)| f(x, y));
}

#[cfg(not(feature = "parallel"))]
pub fn zip_apply<T, S, F>(items: &mut [T], other: &[S], f: F)
where
    F: Fn(&mut T, &S),
{
    debug_assert_eq!(items.len(), other.len());
    for (x, y) in items.iter_mut().zip(other.iter()) {
        f(x, y);
    }
}
