//! Sequential and data-parallel execution of independent work items.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] silently
//! runs sequentially. Results never depend on the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_indices<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Splits `0..total` into contiguous chunks of at most `chunk` elements and
/// returns `f(start, end)` for each chunk, in order.
pub fn map_chunks<T, F>(exec: Execution, total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk) as usize;
    map_indices(exec, count, |c| {
        let start = c as u64 * chunk;
        f(start, (start + chunk).min(total))
    })
}

/// True iff `pred` holds for every index in `0..n`.
pub fn all_indices<F>(exec: Execution, n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().all(pred);
    }
    let _ = exec;
    (0..n).all(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let seq = map_chunks(Execution::Sequential, 1003, 10, |a, b| (a..b).sum::<u64>());
        let par = map_chunks(Execution::Parallel, 1003, 10, |a, b| (a..b).sum::<u64>());
        assert_eq!(seq, par);
        assert_eq!(seq.iter().sum::<u64>(), 1002 * 1003 / 2);
        assert_eq!(seq.len(), 101);
        assert!(all_indices(Execution::Parallel, 100, |i| i < 100));
        assert!(!all_indices(Execution::Sequential, 100, |i| i < 99));
    }
}
