//! Thin dispatch layer between rayon and plain iterators. With the
//! `parallel` feature enabled (the default) the map helpers fan work out to
//! the global rayon pool; without it the same code runs sequentially.
//! Result order always matches input order, so callers are deterministic
//! regardless of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

/// First `Some` in input order; later branches are cancelled once an
/// earlier one succeeds.
#[cfg(feature = "parallel")]
pub(crate) fn find_map_first<T, R, F>(items: Vec<T>, f: F) -> Option<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> Option<R> + Sync + Send,
{
    items.into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_map_first<T, R, F>(items: Vec<T>, f: F) -> Option<R>
where
    F: Fn(T) -> Option<R>,
{
    items.into_iter().find_map(f)
}
