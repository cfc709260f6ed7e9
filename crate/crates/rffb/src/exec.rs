use rayon::prelude::*;
use rffb_core::lab::{Executor, WorkItems};

/// Runs work items on a dedicated rayon pool of `jobs` threads. Outputs come
/// back in index order, so results do not depend on `jobs`.
pub struct Pool {
    pool: rayon::ThreadPool,
    jobs: usize,
}

impl Pool {
    pub fn new(jobs: usize) -> anyhow::Result<Self> {
        let jobs = jobs.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .thread_name(|i| format!("rffb-{i}"))
            .build()?;
        Ok(Self { pool, jobs })
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }
}

impl Executor for Pool {
    fn execute<W: WorkItems>(&self, work: &W) -> Vec<W::Output> {
        self.pool.install(|| {
            (0..work.count())
                .into_par_iter()
                .map(|i| work.run(i))
                .collect()
        })
    }
}
