//! Parallel map helpers. Work is split over items and re-assembled in index
//! order, so results are byte-identical no matter how many threads run.

/// Environment variable read by [`thread_count`].
pub const THREADS_ENV: &str = "QCFIELD_THREADS";

/// Requested worker count: `QCFIELD_THREADS` if set and positive, otherwise
/// the number of available CPUs.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

#[cfg(not(target_arch = "wasm32"))]
mod imp {
    use std::sync::OnceLock;

    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

    fn pool() -> &'static rayon::ThreadPool {
        POOL.get_or_init(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(super::thread_count())
                .build()
                .expect("worker pool")
        })
    }

    /// Ordered parallel map over an index range.
    pub fn map_indexed<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        use rayon::prelude::*;
        pool().install(|| (0..len).into_par_iter().map(f).collect())
    }
}

#[cfg(target_arch = "wasm32")]
mod imp {
    /// Sequential fallback for targets without threads.
    pub fn map_indexed<T>(len: usize, f: impl Fn(usize) -> T) -> Vec<T> {
        (0..len).map(f).collect()
    }
}

pub use imp::map_indexed;
