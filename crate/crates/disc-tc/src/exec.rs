//! Data-parallel map helpers. The `parallel` feature (default) dispatches the
//! hot sampling loops through rayon; without it everything runs sequentially.
//! `map_seq` is always available so benchmarks can compare both paths.

/// Sequential map, kept unconditionally for benchmarking against the
/// parallel dispatch.
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    map_seq(items, f)
}

/// Caps the rayon pool at `n` threads. Honoured only on the first call,
/// before any parallel work has run. No-op in sequential builds.
pub fn cap_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
}
