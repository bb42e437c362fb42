//! Edit costs derived from hop distances on the undirected TBox graph.
//!
//! Replacing `x` by `y` costs their shortest-path distance; inserting or
//! deleting `x` costs its distance to `TOP`. Existential atoms `∃r.C` are
//! priced component-wise. User overrides take precedence over every
//! computed value and may be asymmetric or infinite.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::kb::graph::{TBoxGraph, TBoxNodeKind};
use crate::kb::{ExplanationDataset, Vocabulary, TOP};

/// A member of a label: atomic concept, role, existential `∃role.filler`,
/// or `TOP`. A filler of `"TOP"` stands for `∃r.⊤`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Concept(String),
    Exists { role: String, filler: String },
    Role(String),
    Top,
}

impl Atom {
    pub fn concept(name: &str) -> Self {
        Atom::Concept(name.to_string())
    }

    pub fn role(name: &str) -> Self {
        Atom::Role(name.to_string())
    }

    pub fn exists(role: &str, filler: &str) -> Self {
        Atom::Exists { role: role.to_string(), filler: filler.to_string() }
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Atom::Top)
    }

    /// Textual form used in override files and reports: `Cat`, `isIn`,
    /// `exists:isIn:Forest`, `TOP`.
    pub fn token(&self) -> String {
        match self {
            Atom::Concept(n) | Atom::Role(n) => n.clone(),
            Atom::Exists { role, filler } => alloc::format!("exists:{role}:{filler}"),
            Atom::Top => TOP.to_string(),
        }
    }

    /// Parses [`Atom::token`] output, resolving plain names against the
    /// vocabulary.
    pub fn from_token(token: &str, vocabulary: &Vocabulary) -> Result<Atom, CostError> {
        if token == TOP {
            return Ok(Atom::Top);
        }
        if let Some(rest) = token.strip_prefix("exists:") {
            let (role, filler) =
                rest.split_once(':').ok_or_else(|| CostError::BadToken(token.to_string()))?;
            if !vocabulary.is_role(role) {
                return Err(CostError::UnknownAtom(role.to_string()));
            }
            if filler != TOP && !vocabulary.is_concept(filler) {
                return Err(CostError::UnknownAtom(filler.to_string()));
            }
            return Ok(Atom::exists(role, filler));
        }
        if vocabulary.is_concept(token) {
            Ok(Atom::concept(token))
        } else if vocabulary.is_role(token) {
            Ok(Atom::role(token))
        } else {
            Err(CostError::UnknownAtom(token.to_string()))
        }
    }

    fn filler_atom(filler: &str) -> Atom {
        if filler == TOP {
            Atom::Top
        } else {
            Atom::concept(filler)
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Concept(n) | Atom::Role(n) => f.write_str(n),
            Atom::Exists { role, filler } if filler == TOP => write!(f, "∃{role}.⊤"),
            Atom::Exists { role, filler } => write!(f, "∃{role}.{filler}"),
            Atom::Top => f.write_str("⊤"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CostError {
    #[error("cannot compare {0} with {1}: concepts and roles are never substituted")]
    KindMismatch(String, String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("`{0}` is not an atomic concept, role or TOP")]
    NotAtomic(String),
    #[error("an edit cannot go from TOP to TOP")]
    TopToTop,
    #[error("invalid cost {0}: costs must be nonnegative")]
    InvalidCost(f64),
    #[error("override from `{0}` to itself")]
    IdentityOverride(String),
    #[error("malformed atom token `{0}`")]
    BadToken(String),
}

/// User-assigned edit costs keyed by `(from, to)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    costs: BTreeMap<(Atom, Atom), f64>,
}

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: Atom, to: Atom, cost: f64) -> Result<(), CostError> {
        if cost.is_nan() || cost < 0.0 {
            return Err(CostError::InvalidCost(cost));
        }
        if from.is_top() && to.is_top() {
            return Err(CostError::TopToTop);
        }
        if from == to {
            return Err(CostError::IdentityOverride(from.token()));
        }
        self.costs.insert((from, to), cost);
        Ok(())
    }

    pub fn get(&self, from: &Atom, to: &Atom) -> Option<f64> {
        // avoid cloning keys for the common miss
        if self.costs.is_empty() {
            return None;
        }
        self.costs.get(&(from.clone(), to.clone())).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, &Atom, f64)> {
        self.costs.iter().map(|((a, b), &c)| (a, b, c))
    }

    /// True when every override has a mirror entry with the same cost.
    pub fn is_symmetric(&self) -> bool {
        self.costs.iter().all(|((a, b), c)| {
            self.costs.get(&(b.clone(), a.clone())).is_some_and(|m| m == c)
        })
    }
}

#[cfg(feature = "std")]
type Row = alloc::sync::Arc<Vec<u32>>;

#[cfg(feature = "std")]
#[derive(Debug, Default)]
struct Memo(std::sync::RwLock<BTreeMap<usize, Row>>);

#[cfg(feature = "std")]
impl Memo {
    fn row(&self, graph: &TBoxGraph, source: usize) -> Row {
        if let Some(row) = self.0.read().unwrap_or_else(|e| e.into_inner()).get(&source) {
            return row.clone();
        }
        let row = Row::new(graph.distances_from(source));
        self.0
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .entry(source)
            .or_insert(row)
            .clone()
    }

    fn clear(&self) {
        self.0.write().unwrap_or_else(|e| e.into_inner()).clear();
    }
}

#[cfg(not(feature = "std"))]
#[derive(Debug, Default)]
struct Memo;

#[cfg(not(feature = "std"))]
impl Memo {
    fn row(&self, graph: &TBoxGraph, source: usize) -> Vec<u32> {
        graph.distances_from(source)
    }

    fn clear(&self) {}
}

/// Edit-cost function over a TBox graph plus overrides.
///
/// Distances are computed lazily by breadth-first search from the queried
/// atom and memoized per source node; the memo is invisible to callers and
/// safe to fill concurrently.
#[derive(Debug)]
pub struct CostModel {
    graph: TBoxGraph,
    overrides: Overrides,
    memo: Memo,
}

impl Clone for CostModel {
    fn clone(&self) -> Self {
        CostModel { graph: self.graph.clone(), overrides: self.overrides.clone(), memo: Memo::default() }
    }
}

impl CostModel {
    pub fn new(graph: TBoxGraph) -> Self {
        CostModel { graph, overrides: Overrides::default(), memo: Memo::default() }
    }

    pub fn from_dataset(ds: &ExplanationDataset) -> Self {
        Self::new(TBoxGraph::from_dataset(ds))
    }

    pub fn with_overrides(mut self, overrides: Overrides) -> Self {
        self.overrides = overrides;
        self.memo.clear();
        self
    }

    pub fn graph(&self) -> &TBoxGraph {
        &self.graph
    }

    pub fn overrides(&self) -> &Overrides {
        &self.overrides
    }

    /// Whether `edit_cost(x, y) == edit_cost(y, x)` is guaranteed.
    pub fn is_symmetric(&self) -> bool {
        self.overrides.is_symmetric()
    }

    fn resolve(&self, atom: &Atom) -> Result<usize, CostError> {
        let (name, kind) = match atom {
            Atom::Concept(n) => (n.as_str(), TBoxNodeKind::Concept),
            Atom::Role(n) => (n.as_str(), TBoxNodeKind::Role),
            Atom::Top => return Ok(self.graph.top()),
            Atom::Exists { .. } => return Err(CostError::NotAtomic(atom.token())),
        };
        let node = self.graph.node(name).ok_or_else(|| CostError::UnknownAtom(name.to_string()))?;
        if self.graph.kind(node) != kind {
            return Err(CostError::UnknownAtom(name.to_string()));
        }
        Ok(node)
    }

    /// Shortest undirected hop count between two atomic atoms (or `TOP`).
    pub fn atom_distance(&self, x: &Atom, y: &Atom) -> Result<f64, CostError> {
        if matches!((x, y), (Atom::Concept(_), Atom::Role(_)) | (Atom::Role(_), Atom::Concept(_))) {
            return Err(CostError::KindMismatch(x.token(), y.token()));
        }
        let a = self.resolve(x)?;
        let b = self.resolve(y)?;
        if a == b {
            return Ok(0.0);
        }
        let (src, dst) = if a < b { (a, b) } else { (b, a) };
        let row = self.memo.row(&self.graph, src);
        Ok(match row[dst] {
            u32::MAX => f64::INFINITY,
            d => f64::from(d),
        })
    }

    /// Cost of the edit `from → to`; `TOP` on either side encodes insertion
    /// or deletion.
    pub fn edit_cost(&self, from: &Atom, to: &Atom) -> Result<f64, CostError> {
        if from.is_top() && to.is_top() {
            return Err(CostError::TopToTop);
        }
        if let Some(c) = self.overrides.get(from, to) {
            return Ok(c);
        }
        if from == to {
            return Ok(0.0);
        }
        match (from, to) {
            (Atom::Exists { role: r, filler: c }, Atom::Exists { role: s, filler: d }) => {
                let roles = self.part_cost(&Atom::role(r), &Atom::role(s))?;
                let fillers = self.part_cost(&Atom::filler_atom(c), &Atom::filler_atom(d))?;
                Ok(roles + fillers)
            }
            (Atom::Exists { role, filler }, Atom::Top) => {
                Ok(self.part_cost(&Atom::role(role), &Atom::Top)?
                    + self.part_cost(&Atom::filler_atom(filler), &Atom::Top)?)
            }
            (Atom::Top, Atom::Exists { role, filler }) => {
                Ok(self.part_cost(&Atom::Top, &Atom::role(role))?
                    + self.part_cost(&Atom::Top, &Atom::filler_atom(filler))?)
            }
            (Atom::Exists { .. }, Atom::Concept(_)) | (Atom::Concept(_), Atom::Exists { .. }) => {
                Ok(self.edit_cost(from, &Atom::Top)? + self.edit_cost(&Atom::Top, to)?)
            }
            (Atom::Exists { .. }, Atom::Role(_)) | (Atom::Role(_), Atom::Exists { .. }) => {
                Err(CostError::KindMismatch(from.token(), to.token()))
            }
            _ => self.atom_distance(from, to),
        }
    }

    fn part_cost(&self, from: &Atom, to: &Atom) -> Result<f64, CostError> {
        if from == to {
            Ok(0.0)
        } else {
            self.edit_cost(from, to)
        }
    }
}
