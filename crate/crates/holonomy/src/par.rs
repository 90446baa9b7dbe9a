//! Thread-pool executor.

use holonomy_core::exec::Executor;
use holonomy_core::BallCoder;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "HOLONOMY_THREADS";

pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    pub fn new(threads: Option<usize>) -> Self {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads.filter(|&t| t > 0) {
            builder = builder.num_threads(t);
        }
        RayonExecutor { pool: builder.build().expect("thread pool") }
    }

    /// Honors `HOLONOMY_THREADS` when set to a positive integer.
    pub fn from_env() -> Self {
        Self::new(std::env::var(THREADS_VAR).ok().and_then(|s| s.trim().parse().ok()))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }
}

impl Executor for RayonExecutor {
    fn map<T, F>(&self, items: &[u32], f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut BallCoder, u32) -> T + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map_init(BallCoder::new, |coder, &x| f(coder, x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use holonomy_core::exec::Sequential;

    #[test]
    fn agrees_with_sequential() {
        let g = holonomy_core::blocks::make_cycle_block(50);
        let items: Vec<u32> = (0..100).rev().collect();
        let f = |c: &mut BallCoder, x: u32| c.fingerprint(&g, x, 3).0 ^ u128::from(x);
        assert_eq!(RayonExecutor::new(Some(3)).map(&items, f), Sequential.map(&items, f));
    }
}
