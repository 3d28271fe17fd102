//! Replicate fan-out.
//!
//! Replicates are evaluated with a per-index random stream and collected in
//! index order, so any reduction over the returned vector is independent of
//! the number of workers. With the `parallel` feature (default) the work is
//! spread over a rayon pool; without it, or with one worker, it runs inline.

use crate::rng::{replicate_rng, SimRng};

/// How replicate loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel { workers: usize },
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 || !cfg!(feature = "parallel") {
            Execution::Sequential
        } else {
            Execution::Parallel { workers }
        }
    }

    pub fn available() -> Self {
        Self::with_workers(default_workers())
    }

    pub fn workers(&self) -> usize {
        match self {
            Execution::Sequential => 1,
            Execution::Parallel { workers } => *workers,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Seeded replicate runner shared by the simulation experiments.
#[derive(Clone)]
pub struct Replicator {
    seed: u64,
    execution: Execution,
    #[cfg(feature = "parallel")]
    pool: Option<std::sync::Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Replicator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Replicator")
            .field("seed", &self.seed)
            .field("execution", &self.execution)
            .finish()
    }
}

impl Replicator {
    pub fn new(seed: u64, execution: Execution) -> Self {
        #[cfg(feature = "parallel")]
        let pool = match execution {
            Execution::Sequential => None,
            Execution::Parallel { workers } => rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .ok()
                .map(std::sync::Arc::new),
        };
        Self {
            seed,
            execution,
            #[cfg(feature = "parallel")]
            pool,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    /// Evaluate `f(index, rng)` for `index in 0..count`, results in index order.
    pub fn run<T, F>(&self, tag: &str, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut SimRng) -> T + Sync + Send,
    {
        let seed = self.seed;
        let task = |i: u64| {
            let mut rng = replicate_rng(seed, tag, i);
            f(i, &mut rng)
        };
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..count).into_par_iter().map(task).collect());
        }
        (0..count).map(task).collect()
    }

    /// Like [`Replicator::run`] for fallible replicates; the first error in
    /// index order is returned.
    pub fn try_run<T, F>(&self, tag: &str, count: u64, f: F) -> crate::Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64, &mut SimRng) -> crate::Result<T> + Sync + Send,
    {
        self.run(tag, count, f).into_iter().collect()
    }
}
