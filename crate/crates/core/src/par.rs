//! Data-parallel helpers that fall back to plain iteration without the
//! `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

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

/// Index of the first item satisfying `pred`, independent of scheduling.
pub fn find_first<T, F>(items: &[T], pred: F) -> Option<usize>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().position_first(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().position(pred)
    }
}

/// Runs `f` on a pool of `workers` threads; `None` keeps the global pool.
pub fn with_workers<R, F>(workers: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(w) = workers {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = workers;
    f()
}
