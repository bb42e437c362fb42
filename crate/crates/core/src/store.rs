//! All-pairs preprocessing and nearest-exemplar queries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::cost::CostModel;
use crate::edit::{description_edit_distance, EditError, EditPath};
use crate::ged::{exact_ged, GedBudget, GedError, Interrupt, Never};
use crate::kb::graph::{exemplar_component, ABoxComponent, ABoxGraph};
use crate::kb::ExplanationDataset;
use crate::rollup::{roll_up, ConceptSetDescription, RollupOptions};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Set,
    Graph,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Set => "set",
            Backend::Graph => "graph",
        }
    }
}

impl core::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" => Ok(Backend::Set),
            "graph" => Ok(Backend::Graph),
            other => Err(alloc::format!("unknown backend `{other}` (expected set or graph)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PreprocessConfig {
    pub backend: Backend,
    pub rollup: RollupOptions,
    pub ged_budget: GedBudget,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("unknown exemplar `{0}`")]
    UnknownExemplar(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown prediction table `{0}`")]
    UnknownTable(String),
    #[error("k must be positive")]
    ZeroK,
    #[error("cache does not cover this dataset's exemplars")]
    CacheMismatch,
    #[error("pair {from} → {to}: {error}")]
    Graph { from: String, to: String, error: GedError },
    #[error("pair {from} → {to}: {error}")]
    Edit { from: String, to: String, error: EditError },
}

enum Inputs {
    Set(Vec<ConceptSetDescription>),
    Graph(Vec<ABoxComponent>),
}

/// Per-exemplar inputs (descriptions or components) ready for pairwise
/// distance jobs. Shareable across threads.
pub struct Prepared {
    exemplars: Vec<String>,
    inputs: Inputs,
    config: PreprocessConfig,
}

/// Distance and path for one ordered pair; `path` is `None` when no
/// finite-cost path exists.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub cost: f64,
    pub path: Option<EditPath>,
    pub optimal: bool,
}

impl Prepared {
    pub fn new(ds: &ExplanationDataset, config: PreprocessConfig) -> Result<Self, StoreError> {
        let g = ABoxGraph::from_dataset(ds);
        let mut components = Vec::with_capacity(ds.exemplars.len());
        for e in &ds.exemplars {
            let comp = exemplar_component(&g, e).map_err(|_| StoreError::UnknownExemplar(e.clone()))?;
            components.push(comp);
        }
        let inputs = match config.backend {
            Backend::Set => Inputs::Set(components.iter().map(|c| roll_up(c, &config.rollup)).collect()),
            Backend::Graph => Inputs::Graph(components),
        };
        Ok(Prepared { exemplars: ds.exemplars.clone(), inputs, config })
    }

    pub fn exemplars(&self) -> &[String] {
        &self.exemplars
    }

    pub fn config(&self) -> &PreprocessConfig {
        &self.config
    }

    /// Ordered pairs to compute: the upper triangle in row-major order,
    /// each followed by its mirror when costs are asymmetric.
    pub fn jobs(&self, symmetric: bool) -> Vec<(usize, usize)> {
        let n = self.exemplars.len();
        let mut jobs = Vec::with_capacity(n * n.saturating_sub(1) / if symmetric { 2 } else { 1 });
        for i in 0..n {
            for j in i + 1..n {
                jobs.push((i, j));
                if !symmetric {
                    jobs.push((j, i));
                }
            }
        }
        jobs
    }

    pub fn compute(
        &self,
        cm: &CostModel,
        source: usize,
        target: usize,
        interrupt: &dyn Interrupt,
    ) -> Result<PairResult, StoreError> {
        let (s, t) = (&self.exemplars[source], &self.exemplars[target]);
        match &self.inputs {
            Inputs::Set(descs) => match description_edit_distance(cm, &descs[source], &descs[target]) {
                Ok(path) => Ok(PairResult { cost: path.total_cost, path: Some(path), optimal: true }),
                Err(EditError::Infeasible(_)) => {
                    Ok(PairResult { cost: f64::INFINITY, path: None, optimal: true })
                }
                Err(error) => Err(StoreError::Edit { from: s.clone(), to: t.clone(), error }),
            },
            Inputs::Graph(comps) => {
                let r = exact_ged(cm, &comps[source], &comps[target], &self.config.ged_budget, interrupt)
                    .map_err(|error| StoreError::Graph { from: s.clone(), to: t.clone(), error })?;
                if r.cost.is_finite() {
                    let path = r.to_edit_path(s, t);
                    Ok(PairResult { cost: path.total_cost, path: Some(path), optimal: r.optimal })
                } else {
                    Ok(PairResult { cost: f64::INFINITY, path: None, optimal: r.optimal })
                }
            }
        }
    }
}

/// Persisted product of preprocessing: pairwise distances and edit paths.
#[derive(Debug)]
pub struct DistanceCache {
    pub dataset_sha256: String,
    pub costs_sha256: String,
    pub created_utc: String,
    backend: Backend,
    symmetric: bool,
    exemplars: Vec<String>,
    matrix: Vec<f64>,
    paths: BTreeMap<(usize, usize), EditPath>,
    non_optimal: BTreeSet<(usize, usize)>,
    lookups: AtomicUsize,
}

impl Clone for DistanceCache {
    fn clone(&self) -> Self {
        DistanceCache {
            dataset_sha256: self.dataset_sha256.clone(),
            costs_sha256: self.costs_sha256.clone(),
            created_utc: self.created_utc.clone(),
            backend: self.backend,
            symmetric: self.symmetric,
            exemplars: self.exemplars.clone(),
            matrix: self.matrix.clone(),
            paths: self.paths.clone(),
            non_optimal: self.non_optimal.clone(),
            lookups: AtomicUsize::new(0),
        }
    }
}

impl PartialEq for DistanceCache {
    fn eq(&self, other: &Self) -> bool {
        self.dataset_sha256 == other.dataset_sha256
            && self.costs_sha256 == other.costs_sha256
            && self.created_utc == other.created_utc
            && self.backend == other.backend
            && self.symmetric == other.symmetric
            && self.exemplars == other.exemplars
            && self.matrix == other.matrix
            && self.paths == other.paths
            && self.non_optimal == other.non_optimal
    }
}

impl DistanceCache {
    /// Assembles a cache from computed pairs. Missing pairs stay infinite;
    /// with `symmetric`, each pair also fills its mirror cell.
    pub fn from_results(
        exemplars: Vec<String>,
        backend: Backend,
        symmetric: bool,
        results: impl IntoIterator<Item = ((usize, usize), PairResult)>,
    ) -> Self {
        let n = exemplars.len();
        let mut matrix = vec![f64::INFINITY; n * n];
        for i in 0..n {
            matrix[i * n + i] = 0.0;
        }
        let mut paths = BTreeMap::new();
        let mut non_optimal = BTreeSet::new();
        for ((i, j), r) in results {
            matrix[i * n + j] = r.cost;
            if symmetric {
                matrix[j * n + i] = r.cost;
            }
            if !r.optimal {
                non_optimal.insert((i, j));
            }
            if let Some(p) = r.path {
                paths.insert((i, j), p);
            }
        }
        DistanceCache {
            dataset_sha256: String::new(),
            costs_sha256: String::new(),
            created_utc: String::new(),
            backend,
            symmetric,
            exemplars,
            matrix,
            paths,
            non_optimal,
            lookups: AtomicUsize::new(0),
        }
    }

    /// Rebuilds a cache from stored parts (used by file loaders).
    pub fn from_parts(
        exemplars: Vec<String>,
        backend: Backend,
        symmetric: bool,
        matrix: Vec<f64>,
        paths: BTreeMap<(usize, usize), EditPath>,
        non_optimal: BTreeSet<(usize, usize)>,
    ) -> Self {
        assert_eq!(matrix.len(), exemplars.len() * exemplars.len(), "matrix must be n × n");
        DistanceCache {
            dataset_sha256: String::new(),
            costs_sha256: String::new(),
            created_utc: String::new(),
            backend,
            symmetric,
            exemplars,
            matrix,
            paths,
            non_optimal,
            lookups: AtomicUsize::new(0),
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn exemplars(&self) -> &[String] {
        &self.exemplars
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    pub fn index_of(&self, exemplar: &str) -> Option<usize> {
        self.exemplars.iter().position(|e| e == exemplar)
    }

    /// Row-major `n × n` distances.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Stored paths keyed by ordered pair; mirrors are derived on demand
    /// when symmetric.
    pub fn stored_paths(&self) -> &BTreeMap<(usize, usize), EditPath> {
        &self.paths
    }

    pub fn non_optimal(&self) -> &BTreeSet<(usize, usize)> {
        &self.non_optimal
    }

    /// Distance from exemplar `i` to `j`. Counted in [`Self::lookup_count`].
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.lookups.fetch_add(1, Ordering::Relaxed);
        self.matrix[i * self.exemplars.len() + j]
    }

    pub fn lookup_count(&self) -> usize {
        self.lookups.load(Ordering::Relaxed)
    }

    pub fn reset_lookup_count(&self) {
        self.lookups.store(0, Ordering::Relaxed);
    }

    /// Edit path from `i` to `j`, if a finite one exists.
    pub fn path(&self, i: usize, j: usize) -> Option<EditPath> {
        if i == j {
            return Some(EditPath::empty(&self.exemplars[i], &self.exemplars[i]));
        }
        if let Some(p) = self.paths.get(&(i, j)) {
            return Some(p.clone());
        }
        if self.symmetric {
            return self.paths.get(&(j, i)).map(EditPath::inverted);
        }
        None
    }

    pub fn covers(&self, ds: &ExplanationDataset) -> bool {
        self.exemplars == ds.exemplars
    }
}

/// Single-threaded preprocessing of every exemplar pair.
pub fn preprocess(
    ds: &ExplanationDataset,
    cm: &CostModel,
    config: PreprocessConfig,
) -> Result<DistanceCache, StoreError> {
    let prepared = Prepared::new(ds, config)?;
    let symmetric = cm.is_symmetric();
    let mut results = Vec::new();
    for (i, j) in prepared.jobs(symmetric) {
        results.push(((i, j), prepared.compute(cm, i, j, &Never)?));
    }
    Ok(DistanceCache::from_results(ds.exemplars.clone(), config.backend, symmetric, results))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryStatus {
    Found,
    NoFiniteCandidates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nearest {
    /// `(exemplar, distance)`, ascending by distance then id.
    pub candidates: Vec<(String, f64)>,
    pub status: QueryStatus,
}

/// The `k` closest exemplars to `source` predicted as `target_class`,
/// excluding `source` itself. Reads one cache row.
pub fn nearest_by_class(
    cache: &DistanceCache,
    ds: &ExplanationDataset,
    table: &str,
    source: &str,
    target_class: &str,
    k: usize,
) -> Result<Nearest, StoreError> {
    if k == 0 {
        return Err(StoreError::ZeroK);
    }
    if !cache.covers(ds) {
        return Err(StoreError::CacheMismatch);
    }
    let predictions = ds.prediction_table(table).ok_or_else(|| StoreError::UnknownTable(table.to_string()))?;
    if !ds.classes.contains(target_class) {
        return Err(StoreError::UnknownClass(target_class.to_string()));
    }
    let s = cache.index_of(source).ok_or_else(|| StoreError::UnknownExemplar(source.to_string()))?;
    let mut candidates: Vec<(&str, f64)> = Vec::new();
    for (j, e) in cache.exemplars().iter().enumerate() {
        if j == s || predictions.get(e).map(String::as_str) != Some(target_class) {
            continue;
        }
        let d = cache.distance(s, j);
        if d.is_finite() {
            candidates.push((e, d));
        }
    }
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    candidates.truncate(k);
    let status = if candidates.is_empty() { QueryStatus::NoFiniteCandidates } else { QueryStatus::Found };
    Ok(Nearest { candidates: candidates.into_iter().map(|(e, d)| (e.to_string(), d)).collect(), status })
}
