//! Execution policy for the per-point loops.
//!
//! Every data-parallel loop in the crate goes through [`map_indices`]. With the
//! `parallel` feature (on by default) [`Exec::Parallel`] fans out over rayon;
//! without it, both policies run the same sequential loop. Each index is
//! computed independently, so both paths return bit-identical vectors.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this policy actually runs on a thread pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

pub fn map_indices<T, F>(n: usize, exec: Exec, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Caps the global worker pool. Returns `false` when the pool was already
/// initialized or the crate was built without the `parallel` feature.
pub fn init_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let a = map_indices(1000, Exec::Sequential, f);
        let b = map_indices(1000, Exec::Parallel, f);
        assert_eq!(a, b);
    }
}
