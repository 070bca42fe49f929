use hetnet_core::Executor;
use rayon::prelude::*;

/// Evaluates realizations on the rayon global pool. Results come back in
/// index order, so output is identical to [`hetnet_core::Sequential`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }
}
