//! Multi-threaded preprocessing with static work partitioning.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use semcf_core::ged::Never;
use semcf_core::{CostModel, DistanceCache, ExplanationDataset, PairResult, Prepared, PreprocessConfig, StoreError};

type Chunk = Vec<((usize, usize), PairResult)>;

/// Called with `(pairs done, pairs total)` from worker threads.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

#[derive(Clone, Copy, Default)]
pub struct Options<'a> {
    pub jobs: usize,
    /// Per-pair wall-clock limit for graph searches.
    pub timeout: Option<Duration>,
    pub progress: Option<Progress<'a>>,
}

/// Computes every pair like [`semcf_core::preprocess`], splitting the pair
/// list into `jobs` contiguous chunks. Output does not depend on `jobs`; on
/// failure the error of the earliest failing pair is returned.
pub fn preprocess_parallel(
    ds: &ExplanationDataset,
    cm: &CostModel,
    config: PreprocessConfig,
    opts: Options<'_>,
) -> Result<DistanceCache, StoreError> {
    let prepared = Prepared::new(ds, config)?;
    let symmetric = cm.is_symmetric();
    let pairs = prepared.jobs(symmetric);
    let total = pairs.len();
    let jobs = opts.jobs.max(1);
    let chunk = total.div_ceil(jobs).max(1);
    let done = AtomicUsize::new(0);

    let run_chunk = |slice: &[(usize, usize)]| -> Result<Chunk, StoreError> {
        let mut out = Vec::with_capacity(slice.len());
        for &(i, j) in slice {
            let r = match opts.timeout {
                Some(limit) => {
                    let start = Instant::now();
                    let expired = move || start.elapsed() >= limit;
                    prepared.compute(cm, i, j, &expired)
                }
                None => prepared.compute(cm, i, j, &Never),
            };
            out.push(((i, j), r?));
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(p) = opts.progress {
                p(n, total);
            }
        }
        Ok(out)
    };

    let chunks: Vec<Result<_, StoreError>> = if jobs == 1 {
        vec![run_chunk(&pairs)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = pairs.chunks(chunk).map(|c| s.spawn(|| run_chunk(c))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };
    let mut results = Vec::with_capacity(total);
    for c in chunks {
        results.extend(c?);
    }
    Ok(DistanceCache::from_results(ds.exemplars.clone(), config.backend, symmetric, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use semcf_core::{preprocess, Backend, DatasetBuilder};

    fn dataset() -> ExplanationDataset {
        let mut b = DatasetBuilder::new();
        for i in 0..9 {
            let e = format!("e{i}");
            let x = format!("x{i}");
            b = b
                .assert_role("depicts", &e, &x)
                .assert_concept(["Cat", "Dog", "Ant"][i % 3], &x)
                .exemplar(&e, if i % 2 == 0 { "A" } else { "B" });
        }
        b.build().unwrap().0
    }

    #[test]
    fn matches_serial_for_any_job_count() {
        let ds = dataset();
        let cm = CostModel::from_dataset(&ds);
        let serial = preprocess(&ds, &cm, PreprocessConfig::default()).unwrap();
        for jobs in [1, 2, 3, 8, 64] {
            let par = preprocess_parallel(&ds, &cm, PreprocessConfig::default(), Options { jobs, ..Options::default() })
                .unwrap();
            assert_eq!(par, serial, "jobs = {jobs}");
        }
    }

    #[test]
    fn progress_reaches_total() {
        let ds = dataset();
        let cm = CostModel::from_dataset(&ds);
        let seen = AtomicUsize::new(0);
        let progress = |done: usize, total: usize| {
            assert!(done <= total);
            seen.fetch_max(done, Ordering::Relaxed);
        };
        preprocess_parallel(&ds, &cm, PreprocessConfig::default(), Options { jobs: 3, progress: Some(&progress), ..Options::default() })
            .unwrap();
        assert_eq!(seen.load(Ordering::Relaxed), 36);
    }

    #[test]
    fn budget_error_names_pair() {
        let ds = dataset();
        let cm = CostModel::from_dataset(&ds);
        let cfg = PreprocessConfig {
            backend: Backend::Graph,
            ged_budget: semcf_core::GedBudget { max_nodes: 1 },
            ..PreprocessConfig::default()
        };
        let err = preprocess_parallel(&ds, &cm, cfg, Options { jobs: 2, ..Options::default() }).unwrap_err();
        assert!(err.to_string().starts_with("pair e0 → e1"), "{err}");
    }
}
