//! Replicate-parallel execution. Work items are replicate indices; results
//! come back in index order so every aggregate is independent of scheduling.

use rayon::prelude::*;

use crate::error::{LabError, Result};

pub const THREADS_ENV: &str = "SPDE_LAB_THREADS";

#[derive(Debug)]
pub struct Runner {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl Runner {
    pub fn new(threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(LabError::Config("thread count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
        Ok(Runner { pool, threads })
    }

    /// `--threads`, else the environment variable, else available cores.
    pub fn from_settings(threads: Option<usize>) -> Result<Self> {
        let threads = match threads {
            Some(t) => t,
            None => match std::env::var(THREADS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| LabError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
                Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            },
        };
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn map<T: Send>(&self, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }

    /// Like [`Runner::map`]; the error reported is the one with the lowest
    /// index, whatever order the failures happened in.
    pub fn try_map<T: Send, E: Send>(
        &self,
        n: usize,
        f: impl Fn(usize) -> std::result::Result<T, E> + Sync + Send,
    ) -> std::result::Result<Vec<T>, E> {
        self.map(n, f).into_iter().collect()
    }
}
