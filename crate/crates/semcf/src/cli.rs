//! The `semcf` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use semcf_core::ged::Never;
use semcf_core::{
    counterfactual, exemplar_component, global_importance, roll_up, validate_dataset, ABoxGraph, Backend,
    CostModel, DistanceCache, ExplanationDataset, GedBudget, Overrides, Prepared, PreprocessConfig,
    RollupOptions, Severity, SourceSelector, ValidationOptions,
};

use crate::cache::{self, CacheError, ConfigDoc, Manifest};
use crate::dataset::{read_dataset, DatasetFileError};
use crate::overrides::parse_overrides;
use crate::parallel::{preprocess_parallel, Options};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "semcf", version, about = "Semantic counterfactual explanations over a knowledge base")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a dataset for well-formedness.
    Validate {
        dataset: PathBuf,
        /// Severity of a class name reused as a role.
        #[arg(long, value_enum, default_value = "error")]
        class_as_role: SeverityArg,
    },
    /// Print the rolled-up description of one exemplar as JSON.
    Describe {
        dataset: PathBuf,
        exemplar: String,
        #[arg(long)]
        unlabeled_filler_as_top: bool,
    },
    /// Distance between two exemplars.
    Distance {
        dataset: PathBuf,
        source: String,
        target: String,
        #[command(flatten)]
        costs: CostArgs,
        #[arg(long)]
        show_path: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: TextFormat,
    },
    /// Compute and store all pairwise distances.
    Preprocess {
        dataset: PathBuf,
        /// Output path; defaults to `<stem>.semcf-cache` in $SEMCF_CACHE_DIR or the
        /// working directory.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        costs: CostArgs,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
        /// Wall-clock limit per pair for the graph backend.
        #[arg(long, value_name = "SECS")]
        timeout: Option<f64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Nearest counterfactuals of one exemplar.
    Explain {
        #[arg(long)]
        cache: PathBuf,
        /// Dataset file; defaults to the one recorded in the cache.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long, default_value = "default")]
        predictions: String,
        #[arg(long, value_enum, default_value = "table")]
        format: TextFormat,
        /// Keep raw description edits instead of assertion edits.
        #[arg(long)]
        no_collapse: bool,
    },
    /// Atom importance over a set of source exemplars.
    Global {
        #[arg(long)]
        cache: PathBuf,
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, conflicts_with = "sources", required_unless_present = "sources")]
        source_class: Option<String>,
        #[arg(long, value_delimiter = ',')]
        sources: Option<Vec<String>>,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "default")]
        predictions: String,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Summarize a cache file.
    CacheInfo {
        cache: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: TextFormat,
    },
}

#[derive(Args, Debug)]
struct CostArgs {
    /// JSON file of substitution cost overrides.
    #[arg(long)]
    overrides: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "set")]
    backend: BackendArg,
    #[arg(long)]
    unlabeled_filler_as_top: bool,
    /// Largest component the graph backend accepts.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(2..))]
    ged_budget: u32,
}

impl CostArgs {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            backend: match self.backend {
                BackendArg::Set => Backend::Set,
                BackendArg::Graph => Backend::Graph,
            },
            rollup: RollupOptions { unlabeled_filler_as_top: self.unlabeled_filler_as_top },
            ged_budget: GedBudget { max_nodes: self.ged_budget as usize },
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeverityArg {
    Warning,
    Error,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BackendArg {
    Set,
    Graph,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TextFormat {
    Table,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ReportFormat {
    Table,
    Json,
    Csv,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl ToString) -> Self {
        Failure { code: EXIT_ERROR, message: message.to_string() }
    }
}

impl From<DatasetFileError> for Failure {
    fn from(e: DatasetFileError) -> Self {
        let code = match e {
            DatasetFileError::Invalid(_) => EXIT_VIOLATIONS,
            _ => EXIT_ERROR,
        };
        Failure { code, message: e.to_string() }
    }
}

macro_rules! operational {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::error(e)
            }
        }
    )*};
}

operational!(
    CacheError,
    crate::overrides::OverridesFileError,
    semcf_core::StoreError,
    semcf_core::ExplainError,
    std::io::Error
);

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { dataset, class_as_role } => validate(&dataset, class_as_role, out, err),
        Command::Describe { dataset, exemplar, unlabeled_filler_as_top } => {
            let ds = load_dataset(&dataset, err)?.0;
            let g = ABoxGraph::from_dataset(&ds);
            if !ds.is_exemplar(&exemplar) {
                return Err(Failure::error(format!("unknown exemplar `{exemplar}`")));
            }
            let comp = exemplar_component(&g, &exemplar).map_err(Failure::error)?;
            let d = roll_up(&comp, &RollupOptions { unlabeled_filler_as_top });
            writeln!(out, "{}", pretty(&report::description_json(&d)))?;
            Ok(EXIT_OK)
        }
        Command::Distance { dataset, source, target, costs, show_path, format } => {
            distance(&dataset, &source, &target, &costs, show_path, format, out, err)
        }
        Command::Preprocess { dataset, cache, costs, jobs, timeout, quiet } => {
            preprocess(&dataset, cache, &costs, jobs as usize, timeout, quiet, out, err)
        }
        Command::Explain { cache, dataset, source, target, k, predictions, format, no_collapse } => {
            let (manifest, cache) = cache::read_cache(&cache)?;
            let ds = cached_dataset(&manifest, dataset.as_deref(), err)?;
            let collapse = !no_collapse && cache.backend() == Backend::Set;
            let xs = counterfactual(&cache, &ds, &predictions, &source, &target, k as usize, collapse)?;
            match format {
                TextFormat::Table => write!(out, "{}", report::explanations_table(&source, &target, &xs))?,
                TextFormat::Json => writeln!(out, "{}", pretty(&report::explanations_json(&source, &target, &xs)))?,
            }
            Ok(EXIT_OK)
        }
        Command::Global { cache, dataset, source_class, sources, target, predictions, format } => {
            let (manifest, cache) = cache::read_cache(&cache)?;
            let ds = cached_dataset(&manifest, dataset.as_deref(), err)?;
            let selector = match (source_class, sources) {
                (Some(c), _) => SourceSelector::Class(c),
                (None, Some(es)) => SourceSelector::Exemplars(es),
                (None, None) => unreachable!("clap requires one selector"),
            };
            let r = global_importance(&cache, &ds, &predictions, &selector, &target)?;
            match format {
                ReportFormat::Table => write!(out, "{}", report::importance_table(&r))?,
                ReportFormat::Json => writeln!(out, "{}", pretty(&report::importance_json(&r)))?,
                ReportFormat::Csv => write!(out, "{}", report::importance_csv(&r))?,
            }
            Ok(EXIT_OK)
        }
        Command::CacheInfo { cache, format } => {
            let (manifest, cache) = cache::read_cache(&cache)?;
            cache_info(&manifest, &cache, format, out)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn load_dataset(path: &Path, err: &mut dyn Write) -> Result<(ExplanationDataset, Vec<u8>), Failure> {
    let (ds, warnings, bytes) = read_dataset(path)?;
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok((ds, bytes))
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::error(format!("cannot read {}: {e}", path.display())))
}

fn cost_model(ds: &ExplanationDataset, overrides: Option<&[u8]>) -> Result<CostModel, Failure> {
    let cm = CostModel::from_dataset(ds);
    Ok(match overrides {
        Some(bytes) => cm.with_overrides(parse_overrides(bytes, &ds.vocabulary)?),
        None => cm.with_overrides(Overrides::new()),
    })
}

fn validate(path: &Path, class_as_role: SeverityArg, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let ds = match read_dataset(path) {
        Ok((ds, warnings, _)) => {
            for w in warnings {
                writeln!(err, "warning: {w}")?;
            }
            ds
        }
        Err(DatasetFileError::Invalid(e)) => {
            writeln!(out, "error: {e}")?;
            writeln!(out, "1 violations")?;
            return Ok(EXIT_VIOLATIONS);
        }
        Err(e) => return Err(e.into()),
    };
    let opts = ValidationOptions {
        class_as_role: match class_as_role {
            SeverityArg::Warning => Severity::Warning,
            SeverityArg::Error => Severity::Error,
        },
    };
    let r = validate_dataset(&ds, &opts);
    for v in &r.violations {
        writeln!(out, "{v}")?;
    }
    writeln!(out, "{} violations", r.violations.len())?;
    Ok(if r.has_errors() { EXIT_VIOLATIONS } else { EXIT_OK })
}

#[allow(clippy::too_many_arguments)]
fn distance(
    path: &Path,
    source: &str,
    target: &str,
    costs: &CostArgs,
    show_path: bool,
    format: TextFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let (ds, _) = load_dataset(path, err)?;
    let overrides = costs.overrides.as_deref().map(read_file).transpose()?;
    let cm = cost_model(&ds, overrides.as_deref())?;
    let index = |e: &str| ds.exemplar_index(e).ok_or_else(|| Failure::error(format!("unknown exemplar `{e}`")));
    let (i, j) = (index(source)?, index(target)?);
    let prepared = Prepared::new(&ds, costs.config())?;
    let r = prepared.compute(&cm, i, j, &Never)?;
    match format {
        TextFormat::Table => {
            writeln!(out, "d({source}, {target}) = {}", r.cost)?;
            if show_path {
                match &r.path {
                    Some(p) => write!(out, "{}", report::path_lines(p))?,
                    None => writeln!(out, "  no finite-cost path")?,
                }
            }
        }
        TextFormat::Json => {
            let mut v = json!({
                "source": source,
                "target": target,
                "cost": if r.cost.is_finite() { json!(r.cost) } else { json!("inf") },
                "optimal": r.optimal,
            });
            if show_path {
                v["path"] = r.path.as_ref().map(report::path_json).unwrap_or(serde_json::Value::Null);
            }
            writeln!(out, "{}", pretty(&v))?;
        }
    }
    Ok(EXIT_OK)
}

fn default_cache_path(dataset: &Path) -> PathBuf {
    let stem = dataset.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into());
    let file = format!("{stem}.{}", cache::EXTENSION);
    match std::env::var_os("SEMCF_CACHE_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(file),
        _ => PathBuf::from(file),
    }
}

fn absolute(path: &Path) -> String {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf()).display().to_string()
}

#[allow(clippy::too_many_arguments)]
fn preprocess(
    path: &Path,
    cache_path: Option<PathBuf>,
    costs: &CostArgs,
    jobs: usize,
    timeout: Option<f64>,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let timeout = match timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(Failure::error("--timeout must be a positive number")),
        t => t,
    };
    let (ds, bytes) = load_dataset(path, err)?;
    let report = validate_dataset(&ds, &ValidationOptions::default());
    if report.has_errors() {
        for v in report.errors() {
            writeln!(err, "{v}")?;
        }
        return Ok(EXIT_VIOLATIONS);
    }
    let overrides = costs.overrides.as_deref().map(read_file).transpose()?;
    let cm = cost_model(&ds, overrides.as_deref())?;
    let config = costs.config();
    let config_doc = ConfigDoc::new(&config, timeout);

    let progress = |done: usize, total: usize| {
        if done == total || done.is_multiple_of(1000) {
            eprint!("\rpreprocess: {done}/{total} pairs");
            if done == total {
                eprintln!();
            }
        }
    };
    let opts = Options {
        jobs,
        timeout: timeout.map(Duration::from_secs_f64),
        progress: if quiet { None } else { Some(&progress) },
    };
    let mut cache = preprocess_parallel(&ds, &cm, config, opts)?;
    cache.dataset_sha256 = cache::dataset_fingerprint(&bytes)?;
    cache.costs_sha256 = cache::costs_fingerprint(overrides.as_deref(), &config_doc)?;
    cache.created_utc = cache::now_utc();
    let manifest = cache::manifest_for(
        &cache,
        config_doc,
        Some(absolute(path)),
        costs.overrides.as_deref().map(absolute),
    );
    let target = cache_path.unwrap_or_else(|| default_cache_path(path));
    cache::save_cache(&target, &manifest, &cache)?;
    if !quiet {
        writeln!(
            out,
            "wrote {}: {} exemplars, backend {}, {} non-optimal pairs",
            target.display(),
            cache.len(),
            cache.backend().as_str(),
            cache.non_optimal().len()
        )?;
    }
    Ok(EXIT_OK)
}

/// Loads the dataset a cache was built from and checks both fingerprints.
fn cached_dataset(manifest: &Manifest, dataset: Option<&Path>, err: &mut dyn Write) -> Result<ExplanationDataset, Failure> {
    let path = match (dataset, &manifest.dataset_path) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => return Err(Failure::error("cache records no dataset path; pass --dataset")),
    };
    let (ds, bytes) = load_dataset(&path, err)?;
    let overrides = manifest.overrides_path.as_deref().map(|p| read_file(Path::new(p))).transpose()?;
    cache::verify(manifest, &bytes, overrides.as_deref())?;
    Ok(ds)
}

fn cache_info(manifest: &Manifest, cache: &DistanceCache, format: TextFormat, out: &mut dyn Write) -> Outcome {
    let n = cache.len();
    let infinite = cache.matrix().iter().filter(|c| !c.is_finite()).count();
    match format {
        TextFormat::Table => {
            writeln!(out, "version        {}", manifest.version)?;
            writeln!(out, "created        {}", manifest.created_utc)?;
            writeln!(out, "exemplars      {n}")?;
            writeln!(out, "backend        {}", cache.backend().as_str())?;
            writeln!(out, "symmetric      {}", manifest.symmetric)?;
            writeln!(out, "stored paths   {}", cache.stored_paths().len())?;
            writeln!(out, "infinite pairs {infinite}")?;
            writeln!(out, "non-optimal    {}", cache.non_optimal().len())?;
            writeln!(out, "dataset        {}", manifest.dataset_path.as_deref().unwrap_or("-"))?;
            writeln!(out, "dataset sha256 {}", manifest.dataset_sha256)?;
            writeln!(out, "overrides      {}", manifest.overrides_path.as_deref().unwrap_or("-"))?;
            writeln!(out, "costs sha256   {}", manifest.costs_sha256)?;
        }
        TextFormat::Json => {
            let mut v = serde_json::to_value(manifest).expect("manifest serializes");
            v["stored_paths"] = json!(cache.stored_paths().len());
            v["infinite_pairs"] = json!(infinite);
            writeln!(out, "{}", pretty(&v))?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("semcf").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn missing_required_flag_is_usage_error() {
        let (code, _, err) = run_args(&["explain", "--source", "e1", "--target", "D"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("--cache"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run_args(&["validate", "x.json", "--bogus"]).0, EXIT_ERROR);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("preprocess"));
    }

    #[test]
    fn jobs_and_budget_bounds() {
        assert_eq!(run_args(&["preprocess", "x.json", "--jobs", "0"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["preprocess", "x.json", "--ged-budget", "1"]).0, EXIT_ERROR);
    }

    #[test]
    fn missing_dataset_is_operational_error() {
        let (code, _, err) = run_args(&["validate", "/nonexistent/semcf.json"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn default_cache_location() {
        let p = default_cache_path(Path::new("data/toy.json"));
        assert!(p.to_string_lossy().ends_with("toy.semcf-cache"));
    }
}
