//! Two-level set edit distance between concept-set descriptions.
//!
//! Inner level: label-set to label-set, a full matching where the smaller
//! side is padded with `TOP` (matched `TOP` means insertion or deletion).
//! Outer level: description to description, a full matching over labels
//! weighted by the inner distances, padded with empty labels whose pairing
//! cost is the whole-label insertion or deletion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::cost::{Atom, CostError, CostModel};
use crate::matching::{min_weight_full_match, CostMatrix, MatchError};
use crate::rollup::{ConceptSetDescription, Label};

/// Which label an edit touches: the source label it starts from and the
/// target label it ends in. `None` marks a label that is inserted or
/// deleted as a whole.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site {
    pub source: Option<String>,
    pub target: Option<String>,
}

/// A single semantic edit `from → to`.
#[derive(Debug, Clone, PartialEq)]
pub struct EditOp {
    pub from: Atom,
    pub to: Atom,
    pub cost: f64,
    pub site: Option<Site>,
}

impl EditOp {
    pub fn is_insertion(&self) -> bool {
        self.from.is_top()
    }

    pub fn is_deletion(&self) -> bool {
        self.to.is_top()
    }

    pub fn inverted(&self) -> EditOp {
        EditOp {
            from: self.to.clone(),
            to: self.from.clone(),
            cost: self.cost,
            site: self
                .site
                .as_ref()
                .map(|s| Site { source: s.target.clone(), target: s.source.clone() }),
        }
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{} → {}] ({})", self.from, self.to, self.cost)
    }
}

/// Pairing of a source label with a target label in an edit path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelPair {
    pub source: Option<String>,
    pub target: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditPath {
    pub source: String,
    pub target: String,
    pub ops: Vec<EditOp>,
    pub alignment: Vec<LabelPair>,
    pub total_cost: f64,
}

impl EditPath {
    pub fn empty(source: &str, target: &str) -> Self {
        EditPath {
            source: source.to_string(),
            target: target.to_string(),
            ops: Vec::new(),
            alignment: Vec::new(),
            total_cost: 0.0,
        }
    }

    /// The reverse path; optimal for the reverse direction when costs are
    /// symmetric.
    pub fn inverted(&self) -> EditPath {
        EditPath {
            source: self.target.clone(),
            target: self.source.clone(),
            ops: self.ops.iter().map(EditOp::inverted).collect(),
            alignment: self
                .alignment
                .iter()
                .map(|p| LabelPair { source: p.target.clone(), target: p.source.clone() })
                .collect(),
            total_cost: self.total_cost,
        }
    }

    pub fn op_cost_sum(&self) -> f64 {
        self.ops.iter().map(|op| op.cost).sum()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EditError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("no finite-cost edit path (blocking elements {0:?})")]
    Infeasible(Vec<usize>),
    #[error("edit path does not fit the description: {0}")]
    InconsistentPath(String),
}

fn infeasible(e: MatchError) -> EditError {
    match e {
        MatchError::Infeasible { blocking, .. } => EditError::Infeasible(blocking),
        other => EditError::InconsistentPath(other.to_string()),
    }
}

/// Minimum-cost edits turning label-set `a` into `b`, returned as
/// `(cost, non-identity edits)`. Ops carry no site.
pub fn label_edit_distance(
    cm: &CostModel,
    a: &BTreeSet<Atom>,
    b: &BTreeSet<Atom>,
) -> Result<(f64, Vec<EditOp>), EditError> {
    let a: Vec<&Atom> = a.iter().collect();
    let b: Vec<&Atom> = b.iter().collect();
    let k = a.len().max(b.len());
    if k == 0 {
        return Ok((0.0, Vec::new()));
    }
    let top = Atom::Top;
    let left = |i: usize| a.get(i).copied().unwrap_or(&top);
    let right = |j: usize| b.get(j).copied().unwrap_or(&top);

    let mut w = CostMatrix::new(k, k, 0.0);
    for i in 0..k {
        for j in 0..k {
            w.set(i, j, cm.edit_cost(left(i), right(j))?);
        }
    }
    let m = min_weight_full_match(&w).map_err(infeasible)?;
    let mut ops = Vec::new();
    let mut total = 0.0;
    for (i, j) in m.pairs {
        let (x, y) = (left(i), right(j));
        if x == y {
            continue;
        }
        let cost = w.get(i, j);
        total += cost;
        ops.push(EditOp { from: x.clone(), to: y.clone(), cost, site: None });
    }
    Ok((total, ops))
}

fn whole_label(cm: &CostModel, label: &Label, delete: bool) -> Result<(f64, Vec<EditOp>), EditError> {
    let mut total = 0.0;
    let mut ops = Vec::with_capacity(label.atoms.len());
    for atom in &label.atoms {
        let (from, to, site) = if delete {
            (atom.clone(), Atom::Top, Site { source: Some(label.node.clone()), target: None })
        } else {
            (Atom::Top, atom.clone(), Site { source: None, target: Some(label.node.clone()) })
        };
        let cost = cm.edit_cost(&from, &to)?;
        total += cost;
        ops.push(EditOp { from, to, cost, site: Some(site) });
    }
    Ok((total, ops))
}

/// Optimal edit path between two descriptions. Inner pairs that cannot be
/// matched at finite cost are treated as infinite outer weights.
pub fn description_edit_distance(
    cm: &CostModel,
    a: &ConceptSetDescription,
    b: &ConceptSetDescription,
) -> Result<EditPath, EditError> {
    let (n, m) = (a.labels.len(), b.labels.len());
    let k = n.max(m);
    let mut path = EditPath::empty(&a.exemplar, &b.exemplar);
    if k == 0 {
        return Ok(path);
    }

    let mut inner: Vec<Option<Vec<EditOp>>> = Vec::with_capacity(n * m);
    let mut w = CostMatrix::new(k, k, f64::INFINITY);
    for (i, la) in a.labels.iter().enumerate() {
        for (j, lb) in b.labels.iter().enumerate() {
            match label_edit_distance(cm, &la.atoms, &lb.atoms) {
                Ok((cost, ops)) => {
                    w.set(i, j, cost);
                    inner.push(Some(ops));
                }
                Err(EditError::Infeasible(_)) => inner.push(None),
                Err(e) => return Err(e),
            }
        }
    }
    let mut deletions = Vec::new();
    if m < k {
        for (i, la) in a.labels.iter().enumerate() {
            let (cost, ops) = whole_label(cm, la, true)?;
            for j in m..k {
                w.set(i, j, cost);
            }
            deletions.push(ops);
        }
    }
    let mut insertions = Vec::new();
    if n < k {
        for (j, lb) in b.labels.iter().enumerate() {
            let (cost, ops) = whole_label(cm, lb, false)?;
            for i in n..k {
                w.set(i, j, cost);
            }
            insertions.push(ops);
        }
    }

    let matching = min_weight_full_match(&w).map_err(infeasible)?;
    for (i, j) in matching.pairs {
        match (i < n, j < m) {
            (true, true) => {
                let (src, dst) = (&a.labels[i].node, &b.labels[j].node);
                let site = Site { source: Some(src.clone()), target: Some(dst.clone()) };
                let ops = inner[i * m + j].take().expect("finite pair");
                path.ops.extend(ops.into_iter().map(|op| EditOp { site: Some(site.clone()), ..op }));
                path.alignment.push(LabelPair { source: Some(src.clone()), target: Some(dst.clone()) });
            }
            (true, false) => {
                path.ops.append(&mut deletions[i]);
                path.alignment.push(LabelPair { source: Some(a.labels[i].node.clone()), target: None });
            }
            (false, true) => {
                path.ops.append(&mut insertions[j]);
                path.alignment.push(LabelPair { source: None, target: Some(b.labels[j].node.clone()) });
            }
            (false, false) => unreachable!("only the smaller side is padded"),
        }
    }
    path.total_cost = path.op_cost_sum();
    Ok(path)
}

/// Applies `path` to `a`. Edits within one label are applied
/// simultaneously: all removals first, then all additions.
pub fn apply_edit_path(
    a: &ConceptSetDescription,
    path: &EditPath,
) -> Result<ConceptSetDescription, EditError> {
    let bad = |msg: String| Err(EditError::InconsistentPath(msg));
    let mut source: BTreeMap<&str, &Label> = BTreeMap::new();
    for l in &a.labels {
        if source.insert(l.node.as_str(), l).is_some() {
            return bad(alloc::format!("duplicate source label `{}`", l.node));
        }
    }

    let mut by_site: BTreeMap<(Option<&str>, Option<&str>), Vec<&EditOp>> = BTreeMap::new();
    for op in &path.ops {
        let Some(site) = &op.site else {
            return bad(alloc::format!("edit {op} has no site"));
        };
        by_site.entry((site.source.as_deref(), site.target.as_deref())).or_default().push(op);
    }

    let mut touched: BTreeSet<&str> = BTreeSet::new();
    let mut labels = Vec::new();
    for pair in &path.alignment {
        let key = (pair.source.as_deref(), pair.target.as_deref());
        let ops = by_site.remove(&key).unwrap_or_default();
        let mut atoms = match pair.source.as_deref() {
            Some(s) => {
                let Some(label) = source.get(s) else {
                    return bad(alloc::format!("no source label `{s}`"));
                };
                if !touched.insert(s) {
                    return bad(alloc::format!("source label `{s}` aligned twice"));
                }
                label.atoms.clone()
            }
            None => BTreeSet::new(),
        };
        for op in &ops {
            if !op.from.is_top() && !atoms.remove(&op.from) {
                return bad(alloc::format!("`{}` is not in the label", op.from));
            }
        }
        for op in &ops {
            if !op.to.is_top() && !atoms.insert(op.to.clone()) {
                return bad(alloc::format!("`{}` inserted twice", op.to));
            }
        }
        match &pair.target {
            Some(t) => labels.push(Label { node: t.clone(), atoms }),
            None if atoms.is_empty() => {}
            None => return bad(alloc::format!("deleted label `{:?}` is not empty", pair.source)),
        }
    }
    if let Some(((s, t), _)) = by_site.into_iter().next() {
        return bad(alloc::format!("edits for unaligned site {s:?} → {t:?}"));
    }
    for l in &a.labels {
        if !touched.contains(l.node.as_str()) {
            labels.push(l.clone());
        }
    }
    labels.sort();
    Ok(ConceptSetDescription { exemplar: path.target.clone(), labels })
}
