//! Shared thread pool honoring the `ROBUST_SEMIGROUP_THREADS` cap.
//!
//! `0` or an unset variable means "let rayon decide". Results never depend
//! on the thread count: parallel maps write disjoint indices and all
//! reductions happen sequentially on ordered buffers.

use std::sync::OnceLock;

static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();

pub fn pool() -> &'static rayon::ThreadPool {
    POOL.get_or_init(|| {
        let threads = std::env::var("ROBUST_SEMIGROUP_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction cannot fail with a sane configuration")
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn pool_is_usable() {
        let sum: i64 = super::pool().install(|| {
            use rayon::prelude::*;
            (0..100i64).into_par_iter().sum()
        });
        assert_eq!(sum, 4950);
    }
}
