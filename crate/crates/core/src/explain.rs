//! Local counterfactual explanations and global atom-importance reports.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::cost::Atom;
use crate::edit::{EditOp, EditPath};
use crate::kb::ExplanationDataset;
use crate::store::{nearest_by_class, DistanceCache, StoreError};

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub source: String,
    pub target_class: String,
    pub counterfactual: String,
    pub cost: f64,
    pub edits: EditPath,
    pub collapsed: Option<Vec<AboxEdit>>,
}

/// An edit phrased over ABox assertions.
#[derive(Debug, Clone, PartialEq)]
pub enum AboxEdit {
    ReplaceConcept { individual: String, from: String, to: String },
    /// `individual` is `None` when the concept lands on a new individual.
    InsertConcept { individual: Option<String>, concept: String },
    DeleteConcept { individual: String, concept: String },
    Op(EditOp),
}

impl fmt::Display for AboxEdit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AboxEdit::ReplaceConcept { individual, from, to } => {
                write!(f, "replace {from}({individual}) with {to}({individual})")
            }
            AboxEdit::InsertConcept { individual: Some(i), concept } => write!(f, "insert {concept}({i})"),
            AboxEdit::InsertConcept { individual: None, concept } => write!(f, "insert {concept}(new)"),
            AboxEdit::DeleteConcept { individual, concept } => write!(f, "delete {concept}({individual})"),
            AboxEdit::Op(op) => op.fmt(f),
        }
    }
}

/// Up to `k` nearest exemplars of `target_class` with their edit paths.
pub fn counterfactual(
    cache: &DistanceCache,
    ds: &ExplanationDataset,
    table: &str,
    source: &str,
    target_class: &str,
    k: usize,
    collapse: bool,
) -> Result<Vec<Explanation>, StoreError> {
    let nearest = nearest_by_class(cache, ds, table, source, target_class, k)?;
    let s = cache.index_of(source).ok_or_else(|| StoreError::UnknownExemplar(source.to_string()))?;
    let mut out = Vec::with_capacity(nearest.candidates.len());
    for (c, cost) in nearest.candidates {
        let t = cache.index_of(&c).ok_or_else(|| StoreError::UnknownExemplar(c.clone()))?;
        let edits = cache.path(s, t).unwrap_or_else(|| EditPath::empty(source, &c));
        let mut x = Explanation {
            source: source.to_string(),
            target_class: target_class.to_string(),
            counterfactual: c,
            cost,
            edits,
            collapsed: None,
        };
        if collapse {
            x.collapsed = Some(collapse_to_abox_edits(&x, ds));
        }
        out.push(x);
    }
    Ok(out)
}

fn concept_name(a: &Atom) -> Option<&str> {
    match a {
        Atom::Concept(c) => Some(c),
        _ => None,
    }
}

fn source_node(op: &EditOp) -> Option<&str> {
    op.site.as_ref()?.source.as_deref()
}

/// Rewrites concept edits as assertion edits on their individual, absorbing
/// the matching existential edits on every ABox subject pointing at it.
/// Everything else is kept as a raw op.
pub fn collapse_to_abox_edits(x: &Explanation, ds: &ExplanationDataset) -> Vec<AboxEdit> {
    let ops = &x.edits.ops;
    let mut absorbed = alloc::vec![false; ops.len()];
    let mut concept_edits: BTreeMap<usize, AboxEdit> = BTreeMap::new();

    for (i, op) in ops.iter().enumerate() {
        let (from, to) = (concept_name(&op.from), concept_name(&op.to));
        if (from.is_none() && !op.from.is_top()) || (to.is_none() && !op.to.is_top()) || (from.is_none() && to.is_none()) {
            continue;
        }
        let node = source_node(op);
        let edit = match (node, from, to) {
            (Some(b), Some(c), Some(d)) => {
                AboxEdit::ReplaceConcept { individual: b.to_string(), from: c.to_string(), to: d.to_string() }
            }
            (node, None, Some(d)) => {
                AboxEdit::InsertConcept { individual: node.map(str::to_string), concept: d.to_string() }
            }
            (Some(b), Some(c), None) => AboxEdit::DeleteConcept { individual: b.to_string(), concept: c.to_string() },
            _ => continue,
        };
        absorbed[i] = true;
        concept_edits.insert(i, edit);

        let Some(b) = node else { continue };
        let expected = |role: &str, filler: Option<&str>| match filler {
            Some(c) => Atom::exists(role, c),
            None => Atom::Top,
        };
        for ra in ds.kb.role_assertions.iter().filter(|ra| ra.object == b) {
            let want_from = expected(&ra.role, from);
            let want_to = expected(&ra.role, to);
            if let Some(j) = ops.iter().enumerate().position(|(j, o)| {
                !absorbed[j] && o.from == want_from && o.to == want_to && source_node(o) == Some(ra.subject.as_str())
            }) {
                absorbed[j] = true;
            }
        }
    }

    let mut out = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        if let Some(e) = concept_edits.remove(&i) {
            out.push(e);
        } else if !absorbed[i] {
            out.push(AboxEdit::Op(op.clone()));
        }
    }
    out
}

/// Which exemplars the global report explains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSelector {
    Class(String),
    Exemplars(Vec<String>),
}

impl fmt::Display for SourceSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSelector::Class(c) => write!(f, "class {c}"),
            SourceSelector::Exemplars(es) => write!(f, "exemplars {}", es.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceRow {
    pub atom: Atom,
    pub importance: f64,
    pub introduced: usize,
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub source_selector: SourceSelector,
    pub target_class: String,
    /// Sorted by `|importance|` descending, then by atom.
    pub rows: Vec<ImportanceRow>,
    pub n_explanations: usize,
    /// Selected exemplars without a finite-cost counterfactual.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExplainError {
    #[error("source selector matches no exemplar")]
    EmptySelector,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Counts introductions and removals of each atom across `paths` and
/// normalizes the net count by the number of paths.
pub fn importance_from_paths<'a>(paths: impl IntoIterator<Item = &'a EditPath>) -> (Vec<ImportanceRow>, usize) {
    let mut counts: BTreeMap<Atom, (usize, usize)> = BTreeMap::new();
    let mut n = 0usize;
    for p in paths {
        n += 1;
        for op in &p.ops {
            if !op.to.is_top() {
                counts.entry(op.to.clone()).or_default().0 += 1;
            }
            if !op.from.is_top() {
                counts.entry(op.from.clone()).or_default().1 += 1;
            }
        }
    }
    let mut rows: Vec<ImportanceRow> = counts
        .into_iter()
        .map(|(atom, (introduced, removed))| ImportanceRow {
            atom,
            importance: (introduced as f64 - removed as f64) / n as f64,
            introduced,
            removed,
        })
        .collect();
    rows.sort_by(|a, b| {
        let (x, y) = (abs(a.importance), abs(b.importance));
        y.total_cmp(&x).then_with(|| a.atom.cmp(&b.atom))
    });
    (rows, n)
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// One minimal explanation per selected exemplar, aggregated into atom
/// importances.
pub fn global_importance(
    cache: &DistanceCache,
    ds: &ExplanationDataset,
    table: &str,
    selector: &SourceSelector,
    target_class: &str,
) -> Result<ImportanceReport, ExplainError> {
    let predictions = ds.prediction_table(table).ok_or_else(|| StoreError::UnknownTable(table.to_string()))?;
    let sources: Vec<&str> = match selector {
        SourceSelector::Class(c) => {
            if !ds.classes.contains(c) {
                return Err(StoreError::UnknownClass(c.clone()).into());
            }
            ds.exemplars
                .iter()
                .filter(|e| predictions.get(*e) == Some(c))
                .map(String::as_str)
                .collect()
        }
        SourceSelector::Exemplars(es) => {
            let unique: BTreeSet<&str> = es.iter().map(String::as_str).collect();
            unique.into_iter().collect()
        }
    };
    if sources.is_empty() {
        return Err(ExplainError::EmptySelector);
    }
    let mut paths = Vec::new();
    let mut skipped = Vec::new();
    for s in sources {
        match counterfactual(cache, ds, table, s, target_class, 1, false)?.into_iter().next() {
            Some(x) => paths.push(x.edits),
            None => skipped.push(s.to_string()),
        }
    }
    let (rows, n) = importance_from_paths(&paths);
    Ok(ImportanceReport {
        source_selector: selector.clone(),
        target_class: target_class.to_string(),
        rows,
        n_explanations: n,
        skipped,
    })
}
