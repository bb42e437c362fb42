//! The `.semcf-cache` file format.
//!
//! A cache is a UTF-8 text file of JSON lines:
//!
//! 1. the manifest object (version, fingerprints, metadata);
//! 2. the exemplar ids as an array;
//! 3. one line per matrix row, `n` numbers each (`"inf"` for no path);
//! 4. one record per stored edit path:
//!    `{"i":0,"j":1,"cost":4.0,"ops":[[from,to,cost,src,dst,sited],..],"alignment":[[src,dst],..]}`.
//!
//! Atoms are encoded as `["c",name]`, `["r",name]`, `["x",role,filler]` or
//! `["T"]`; missing sites and label sides are `null`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use semcf_core::{
    Atom, Backend, DistanceCache, EditOp, EditPath, GedBudget, LabelPair, PreprocessConfig, RollupOptions,
    Site, CACHE_VERSION,
};

pub const EXTENSION: &str = "semcf-cache";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cannot access cache {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cache version {found} is not supported (this build reads version {CACHE_VERSION})")]
    UnsupportedVersion { found: u64 },
    #[error("stale cache: the {what} changed since preprocessing; run `semcf preprocess` again")]
    Stale { what: &'static str },
    #[error("corrupt cache at line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("cannot fingerprint {what}: {message}")]
    Fingerprint { what: &'static str, message: String },
}

/// Settings that shape the stored distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub backend: BackendDoc,
    pub unlabeled_filler_as_top: bool,
    pub ged_budget: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendDoc {
    Set,
    Graph,
}

impl From<Backend> for BackendDoc {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Set => BackendDoc::Set,
            Backend::Graph => BackendDoc::Graph,
        }
    }
}

impl From<BackendDoc> for Backend {
    fn from(b: BackendDoc) -> Self {
        match b {
            BackendDoc::Set => Backend::Set,
            BackendDoc::Graph => Backend::Graph,
        }
    }
}

impl ConfigDoc {
    pub fn new(config: &PreprocessConfig, timeout_secs: Option<f64>) -> Self {
        ConfigDoc {
            backend: config.backend.into(),
            unlabeled_filler_as_top: config.rollup.unlabeled_filler_as_top,
            ged_budget: config.ged_budget.max_nodes,
            timeout_secs,
        }
    }

    pub fn preprocess_config(&self) -> PreprocessConfig {
        PreprocessConfig {
            backend: self.backend.into(),
            rollup: RollupOptions { unlabeled_filler_as_top: self.unlabeled_filler_as_top },
            ged_budget: GedBudget { max_nodes: self.ged_budget },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u64,
    pub dataset_sha256: String,
    pub costs_sha256: String,
    pub backend: BackendDoc,
    pub symmetric: bool,
    pub n_exemplars: usize,
    pub created_utc: String,
    #[serde(default)]
    pub dataset_path: Option<String>,
    #[serde(default)]
    pub overrides_path: Option<String>,
    pub config: ConfigDoc,
    /// Pairs whose search was cut short by the timeout.
    #[serde(default)]
    pub non_optimal: Vec<(usize, usize)>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Re-serializes JSON with sorted keys and no insignificant whitespace.
fn canonical(bytes: &[u8], what: &'static str) -> Result<Value, CacheError> {
    serde_json::from_slice(bytes).map_err(|e| CacheError::Fingerprint { what, message: e.to_string() })
}

pub fn dataset_fingerprint(dataset_json: &[u8]) -> Result<String, CacheError> {
    let v = canonical(dataset_json, "dataset")?;
    Ok(sha256_hex(v.to_string().as_bytes()))
}

pub fn costs_fingerprint(overrides_json: Option<&[u8]>, config: &ConfigDoc) -> Result<String, CacheError> {
    let overrides = match overrides_json {
        Some(b) => canonical(b, "overrides")?,
        None => Value::Null,
    };
    let doc = json!({ "overrides": overrides, "config": config });
    Ok(sha256_hex(doc.to_string().as_bytes()))
}

pub fn manifest_for(
    cache: &DistanceCache,
    config: ConfigDoc,
    dataset_path: Option<String>,
    overrides_path: Option<String>,
) -> Manifest {
    Manifest {
        version: u64::from(CACHE_VERSION),
        dataset_sha256: cache.dataset_sha256.clone(),
        costs_sha256: cache.costs_sha256.clone(),
        backend: cache.backend().into(),
        symmetric: cache.is_symmetric(),
        n_exemplars: cache.len(),
        created_utc: cache.created_utc.clone(),
        dataset_path,
        overrides_path,
        config,
        non_optimal: cache.non_optimal().iter().copied().collect(),
    }
}

pub fn now_utc() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn cost_value(c: f64) -> Value {
    if c.is_finite() {
        json!(c)
    } else {
        json!("inf")
    }
}

fn atom_value(a: &Atom) -> Value {
    match a {
        Atom::Concept(n) => json!(["c", n]),
        Atom::Role(n) => json!(["r", n]),
        Atom::Exists { role, filler } => json!(["x", role, filler]),
        Atom::Top => json!(["T"]),
    }
}

fn path_value(i: usize, j: usize, p: &EditPath) -> Value {
    let ops: Vec<Value> = p
        .ops
        .iter()
        .map(|op| {
            let (s, t) = match &op.site {
                Some(site) => (json!(site.source), json!(site.target)),
                None => (Value::Null, Value::Null),
            };
            json!([atom_value(&op.from), atom_value(&op.to), cost_value(op.cost), s, t, op.site.is_some()])
        })
        .collect();
    let alignment: Vec<Value> = p.alignment.iter().map(|l| json!([l.source, l.target])).collect();
    json!({ "i": i, "j": j, "cost": cost_value(p.total_cost), "ops": ops, "alignment": alignment })
}

/// Full file contents.
pub fn render(manifest: &Manifest, cache: &DistanceCache) -> String {
    let mut out = String::new();
    let mut line = |v: &Value| {
        out.push_str(&v.to_string());
        out.push('\n');
    };
    line(&serde_json::to_value(manifest).expect("manifest serializes"));
    line(&json!(cache.exemplars()));
    let n = cache.len();
    for row in cache.matrix().chunks(n.max(1)).take(n) {
        line(&Value::Array(row.iter().map(|&c| cost_value(c)).collect()));
    }
    for (&(i, j), p) in cache.stored_paths() {
        line(&path_value(i, j, p));
    }
    out
}

/// File contents with the creation time blanked: equal payloads mean equal
/// preprocessing results.
pub fn payload(manifest: &Manifest, cache: &DistanceCache) -> String {
    let mut m = manifest.clone();
    m.created_utc.clear();
    render(&m, cache)
}

pub fn save_cache(path: &Path, manifest: &Manifest, cache: &DistanceCache) -> Result<(), CacheError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CacheError::Io { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, render(manifest, cache))
        .map_err(|source| CacheError::Io { path: path.display().to_string(), source })
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_value(&mut self) -> Result<Option<(usize, Value)>, CacheError> {
        for (i, text) in self.inner.by_ref() {
            self.last = i + 1;
            if text.trim().is_empty() {
                continue;
            }
            let v = serde_json::from_str(text).map_err(|e| corrupt(i + 1, e))?;
            return Ok(Some((i + 1, v)));
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Value), CacheError> {
        match self.next_value()? {
            Some(v) => Ok(v),
            None => Err(corrupt(self.last + 1, format!("missing {what}"))),
        }
    }
}

fn corrupt(line: usize, message: impl ToString) -> CacheError {
    CacheError::Corrupt { line, message: message.to_string() }
}

fn parse_cost(line: usize, v: &Value) -> Result<f64, CacheError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| corrupt(line, "bad number")),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        other => Err(corrupt(line, format!("bad cost {other}"))),
    }
}

fn parse_atom(line: usize, v: &Value) -> Result<Atom, CacheError> {
    let parts: Vec<&str> = v
        .as_array()
        .ok_or_else(|| corrupt(line, "atom is not an array"))?
        .iter()
        .map(|x| x.as_str().ok_or_else(|| corrupt(line, "atom part is not a string")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        ["c", n] => Ok(Atom::concept(n)),
        ["r", n] => Ok(Atom::role(n)),
        ["x", r, c] => Ok(Atom::exists(r, c)),
        ["T"] => Ok(Atom::Top),
        other => Err(corrupt(line, format!("unknown atom {other:?}"))),
    }
}

fn opt_string(line: usize, v: &Value) -> Result<Option<String>, CacheError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => Ok(Some(s.clone())),
        other => Err(corrupt(line, format!("expected string or null, got {other}"))),
    }
}

fn parse_path(line: usize, v: &Value, exemplars: &[String]) -> Result<((usize, usize), EditPath), CacheError> {
    #[derive(Deserialize)]
    struct Record {
        i: usize,
        j: usize,
        cost: Value,
        ops: Vec<Vec<Value>>,
        alignment: Vec<(Option<String>, Option<String>)>,
    }
    let r: Record = serde_json::from_value(v.clone()).map_err(|e| corrupt(line, e))?;
    let n = exemplars.len();
    if r.i >= n || r.j >= n {
        return Err(corrupt(line, "pair index out of range"));
    }
    let mut ops = Vec::with_capacity(r.ops.len());
    for op in &r.ops {
        let [from, to, cost, s, t, has_site] = op.as_slice() else {
            return Err(corrupt(line, "edit record must have 6 fields"));
        };
        let site = match has_site.as_bool() {
            Some(true) => Some(Site { source: opt_string(line, s)?, target: opt_string(line, t)? }),
            Some(false) => None,
            None => return Err(corrupt(line, "site flag must be a boolean")),
        };
        ops.push(EditOp { from: parse_atom(line, from)?, to: parse_atom(line, to)?, cost: parse_cost(line, cost)?, site });
    }
    let path = EditPath {
        source: exemplars[r.i].clone(),
        target: exemplars[r.j].clone(),
        ops,
        alignment: r.alignment.into_iter().map(|(source, target)| LabelPair { source, target }).collect(),
        total_cost: parse_cost(line, &r.cost)?,
    };
    Ok(((r.i, r.j), path))
}

/// Parses cache file contents; the version is checked before anything else.
pub fn parse_cache(text: &str) -> Result<(Manifest, DistanceCache), CacheError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (l, head) = lines.expect("manifest")?;
    let version = head.get("version").and_then(Value::as_u64).ok_or_else(|| corrupt(l, "manifest has no version"))?;
    if version != u64::from(CACHE_VERSION) {
        return Err(CacheError::UnsupportedVersion { found: version });
    }
    let manifest: Manifest = serde_json::from_value(head).map_err(|e| corrupt(l, e))?;

    let (l, ex) = lines.expect("exemplar list")?;
    let exemplars: Vec<String> = serde_json::from_value(ex).map_err(|e| corrupt(l, e))?;
    let n = exemplars.len();
    if n != manifest.n_exemplars {
        return Err(corrupt(l, format!("{n} exemplars but manifest says {}", manifest.n_exemplars)));
    }
    let mut matrix = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (l, row) = lines.expect("matrix row")?;
        let row = row.as_array().ok_or_else(|| corrupt(l, "matrix row is not an array"))?;
        if row.len() != n {
            return Err(corrupt(l, format!("matrix row has {} entries, expected {n}", row.len())));
        }
        for v in row {
            matrix.push(parse_cost(l, v)?);
        }
    }
    let mut paths = BTreeMap::new();
    while let Some((l, v)) = lines.next_value()? {
        let (key, p) = parse_path(l, &v, &exemplars)?;
        paths.insert(key, p);
    }
    let non_optimal: BTreeSet<(usize, usize)> = manifest.non_optimal.iter().copied().collect();
    let mut cache = DistanceCache::from_parts(
        exemplars,
        manifest.backend.into(),
        manifest.symmetric,
        matrix,
        paths,
        non_optimal,
    );
    cache.dataset_sha256 = manifest.dataset_sha256.clone();
    cache.costs_sha256 = manifest.costs_sha256.clone();
    cache.created_utc = manifest.created_utc.clone();
    Ok((manifest, cache))
}

pub fn read_cache(path: &Path) -> Result<(Manifest, DistanceCache), CacheError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CacheError::Io { path: path.display().to_string(), source })?;
    parse_cache(&text)
}

/// Fails with a stale-cache error unless the dataset and cost inputs are the
/// ones the cache was built from.
pub fn verify(manifest: &Manifest, dataset_json: &[u8], overrides_json: Option<&[u8]>) -> Result<(), CacheError> {
    if dataset_fingerprint(dataset_json)? != manifest.dataset_sha256 {
        return Err(CacheError::Stale { what: "dataset" });
    }
    if costs_fingerprint(overrides_json, &manifest.config)? != manifest.costs_sha256 {
        return Err(CacheError::Stale { what: "cost configuration" });
    }
    Ok(())
}
