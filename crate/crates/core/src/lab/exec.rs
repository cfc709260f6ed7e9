use alloc::vec::Vec;

/// A batch of independent, indexed jobs.
pub trait WorkItems: Sync {
    type Output: Send;

    fn count(&self) -> usize;

    fn run(&self, index: usize) -> Self::Output;
}

/// Runs work items; implementations must return outputs in index order.
pub trait Executor {
    fn execute<W: WorkItems>(&self, work: &W) -> Vec<W::Output>;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn execute<W: WorkItems>(&self, work: &W) -> Vec<W::Output> {
        (0..work.count()).map(|i| work.run(i)).collect()
    }
}

/// Adapts a closure into [`WorkItems`].
pub struct FnItems<F> {
    pub count: usize,
    pub f: F,
}

impl<T: Send, F: Fn(usize) -> T + Sync> WorkItems for FnItems<F> {
    type Output = T;

    fn count(&self) -> usize {
        self.count
    }

    fn run(&self, index: usize) -> T {
        (self.f)(index)
    }
}

/// Runs `f(0), …, f(count − 1)` on `exec`, in index order.
pub fn run_indexed<E, T, F>(exec: &E, count: usize, f: F) -> Vec<T>
where
    E: Executor + ?Sized,
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    exec.execute(&FnItems { count, f })
}
