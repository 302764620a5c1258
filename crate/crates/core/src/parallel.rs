//! Shared worker pool. `NC_THREADS` caps the number of workers; results of
//! every parallel routine in this crate are independent of the pool size.

use std::sync::OnceLock;

use rayon::{ThreadPool, ThreadPoolBuilder};

fn threads_from_env() -> usize {
    std::env::var("NC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0)
}

pub fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        ThreadPoolBuilder::new()
            .num_threads(threads_from_env())
            .build()
            .expect("failed to start worker pool")
    })
}
