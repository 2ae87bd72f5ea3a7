//! Dataset generation, experiment drivers, and result serialization.

pub mod audit;
pub mod bench;
pub mod datasets;
pub mod sweep;

pub use audit::{analytic_level_audit, neighboring_pair, privacy_audit, AuditConfig, AuditReport};
pub use bench::{bench, bench_csv, BenchConfig, BenchReport};
pub use datasets::{generate_dataset, DatasetFamily, DatasetParams};
pub use sweep::{utility_sweep, SweepConfig, SweepRow};

/// Threads for trial parallelism, from DP_HULL_THREADS (default: all cores).
pub fn thread_count() -> usize {
    std::env::var("DP_HULL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Deterministic parallel map: results are ordered by item index no matter
/// how the work is scheduled.
pub fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(usize, &T) -> R + Sync,
) -> Vec<R> {
    let threads = thread_count().min(items.len().max(1));
    if threads <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let mut results: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        for (slot, task) in results.chunks_mut(chunk).zip(items.chunks(chunk)).enumerate() {
            let f = &f;
            let (out, inp) = task;
            let base = slot * chunk;
            scope.spawn(move || {
                for (i, item) in inp.iter().enumerate() {
                    out[i] = Some(f(base + i, item));
                }
            });
        }
    });
    results.into_iter().map(|r| r.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_is_ordered() {
        let items: Vec<usize> = (0..97).collect();
        let out = parallel_map(&items, |i, &x| i * 1000 + x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, i * 1000 + i);
        }
    }
}
