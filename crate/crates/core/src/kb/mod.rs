//! Knowledge base model: vocabulary, TBox axioms, ABox assertions, exemplars
//! and classifier prediction tables.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub mod graph;
pub mod validate;

/// Reserved identifier for the universal concept/role.
pub const TOP: &str = "TOP";
/// Concept flagging individuals that carry a classifier prediction.
pub const EXEMPLAR: &str = "Exemplar";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NameKind {
    Concept,
    Role,
    Individual,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Concept => "concept",
            NameKind::Role => "role",
            NameKind::Individual => "individual",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub concept_names: BTreeSet<String>,
    pub role_names: BTreeSet<String>,
    pub individual_names: BTreeSet<String>,
}

impl Vocabulary {
    /// Every kind under which `name` is declared.
    pub fn kinds_of(&self, name: &str) -> Vec<NameKind> {
        let mut kinds = Vec::new();
        if self.concept_names.contains(name) {
            kinds.push(NameKind::Concept);
        }
        if self.role_names.contains(name) {
            kinds.push(NameKind::Role);
        }
        if self.individual_names.contains(name) {
            kinds.push(NameKind::Individual);
        }
        kinds
    }

    pub fn is_concept(&self, name: &str) -> bool {
        self.concept_names.contains(name)
    }

    pub fn is_role(&self, name: &str) -> bool {
        self.role_names.contains(name)
    }

    pub fn is_individual(&self, name: &str) -> bool {
        self.individual_names.contains(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomKind {
    Concept,
    Role,
}

impl AxiomKind {
    pub fn name_kind(self) -> NameKind {
        match self {
            AxiomKind::Concept => NameKind::Concept,
            AxiomKind::Role => NameKind::Role,
        }
    }
}

/// Subsumption axiom `sub ⊑ sup`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Axiom {
    pub sub: String,
    pub sup: String,
    pub kind: AxiomKind,
}

impl Axiom {
    pub fn concept(sub: &str, sup: &str) -> Self {
        Axiom { sub: sub.to_string(), sup: sup.to_string(), kind: AxiomKind::Concept }
    }

    pub fn role(sub: &str, sup: &str) -> Self {
        Axiom { sub: sub.to_string(), sup: sup.to_string(), kind: AxiomKind::Role }
    }
}

/// `concept(individual)`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptAssertion {
    pub concept: String,
    pub individual: String,
}

/// `role(subject, object)`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleAssertion {
    pub role: String,
    pub subject: String,
    pub object: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub tbox: Vec<Axiom>,
    pub concept_assertions: Vec<ConceptAssertion>,
    pub role_assertions: Vec<RoleAssertion>,
}

/// Knowledge base plus exemplars and one or more prediction tables.
///
/// `Exemplar(e)` is implied for every listed exemplar; it does not need to
/// appear in `kb.concept_assertions`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplanationDataset {
    pub vocabulary: Vocabulary,
    pub kb: KnowledgeBase,
    pub exemplars: Vec<String>,
    /// classifier id -> (exemplar -> class label)
    pub predictions: BTreeMap<String, BTreeMap<String, String>>,
    pub classes: BTreeSet<String>,
}

impl ExplanationDataset {
    pub fn is_exemplar(&self, name: &str) -> bool {
        self.exemplars.iter().any(|e| e == name)
    }

    pub fn exemplar_index(&self, name: &str) -> Option<usize> {
        self.exemplars.iter().position(|e| e == name)
    }

    pub fn prediction_table(&self, table: &str) -> Option<&BTreeMap<String, String>> {
        self.predictions.get(table)
    }

    pub fn prediction(&self, table: &str, exemplar: &str) -> Option<&str> {
        self.predictions.get(table)?.get(exemplar).map(String::as_str)
    }
}

/// Non-fatal observations made while building a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    UndeclaredIdentifier { name: String, kind: NameKind },
    TboxCycle(Vec<String>),
    UnknownField(String),
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::UndeclaredIdentifier { name, kind } => {
                write!(f, "undeclared identifier `{name}` inferred as {kind}")
            }
            Warning::TboxCycle(members) => {
                write!(f, "TBox cycle among: {}", members.join(", "))
            }
            Warning::UnknownField(key) => write!(f, "unknown field `{key}` ignored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatasetError {
    #[error("identifier `{name}` used both as {first} and as {second}")]
    KindConflict { name: String, first: NameKind, second: NameKind },
    #[error("`TOP` is reserved and cannot be used in a dataset ({context})")]
    ReservedIdentifier { context: String },
    #[error("empty identifier in {context}")]
    EmptyIdentifier { context: String },
    #[error("prediction table `{table}` references unknown exemplar `{exemplar}`")]
    UnknownExemplar { table: String, exemplar: String },
    #[error("exemplar `{0}` listed more than once")]
    DuplicateExemplar(String),
}

/// Collects raw declarations and assertions and turns them into a dataset,
/// inferring declarations for identifiers that are used but not declared.
#[derive(Debug, Clone, Default)]
pub struct DatasetBuilder {
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub classes: Option<Vec<String>>,
    pub tbox: Vec<Axiom>,
    pub concept_assertions: Vec<ConceptAssertion>,
    pub role_assertions: Vec<RoleAssertion>,
    pub exemplars: Vec<String>,
    pub predictions: BTreeMap<String, BTreeMap<String, String>>,
}

struct Declarations {
    kinds: BTreeMap<String, NameKind>,
    warnings: Vec<Warning>,
}

impl Declarations {
    fn declare(&mut self, name: &str, kind: NameKind) -> Result<(), DatasetError> {
        match self.kinds.get(name) {
            Some(&k) if k == kind => Ok(()),
            Some(&k) => Err(DatasetError::KindConflict {
                name: name.to_string(),
                first: k,
                second: kind,
            }),
            None => {
                self.kinds.insert(name.to_string(), kind);
                Ok(())
            }
        }
    }

    fn use_name(&mut self, name: &str, kind: NameKind, context: &str) -> Result<(), DatasetError> {
        check_identifier(name, context)?;
        if kind != NameKind::Individual && !self.kinds.contains_key(name) {
            self.warnings.push(Warning::UndeclaredIdentifier { name: name.to_string(), kind });
        }
        self.declare(name, kind)
    }
}

fn check_identifier(name: &str, context: &str) -> Result<(), DatasetError> {
    if name.is_empty() {
        return Err(DatasetError::EmptyIdentifier { context: context.to_string() });
    }
    if name == TOP {
        return Err(DatasetError::ReservedIdentifier { context: context.to_string() });
    }
    Ok(())
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn concept(mut self, name: &str) -> Self {
        self.concepts.push(name.to_string());
        self
    }

    pub fn role(mut self, name: &str) -> Self {
        self.roles.push(name.to_string());
        self
    }

    pub fn class(mut self, name: &str) -> Self {
        self.classes.get_or_insert_with(Vec::new).push(name.to_string());
        self
    }

    pub fn axiom(mut self, axiom: Axiom) -> Self {
        self.tbox.push(axiom);
        self
    }

    pub fn assert_concept(mut self, concept: &str, individual: &str) -> Self {
        self.concept_assertions.push(ConceptAssertion {
            concept: concept.to_string(),
            individual: individual.to_string(),
        });
        self
    }

    pub fn assert_role(mut self, role: &str, subject: &str, object: &str) -> Self {
        self.role_assertions.push(RoleAssertion {
            role: role.to_string(),
            subject: subject.to_string(),
            object: object.to_string(),
        });
        self
    }

    pub fn exemplar(mut self, name: &str, class: &str) -> Self {
        self.exemplars.push(name.to_string());
        self.predictions
            .entry("default".to_string())
            .or_default()
            .insert(name.to_string(), class.to_string());
        self
    }

    pub fn predict(mut self, table: &str, exemplar: &str, class: &str) -> Self {
        self.predictions
            .entry(table.to_string())
            .or_default()
            .insert(exemplar.to_string(), class.to_string());
        self
    }

    /// Builds the dataset. Fails on kind conflicts, reserved or empty
    /// identifiers, duplicate exemplars and predictions for non-exemplars.
    pub fn build(self) -> Result<(ExplanationDataset, Vec<Warning>), DatasetError> {
        let mut decl = Declarations { kinds: BTreeMap::new(), warnings: Vec::new() };
        for c in &self.concepts {
            check_identifier(c, "concepts")?;
            decl.declare(c, NameKind::Concept)?;
        }
        for r in &self.roles {
            check_identifier(r, "roles")?;
            decl.declare(r, NameKind::Role)?;
        }
        decl.declare(EXEMPLAR, NameKind::Concept)?;

        for ax in &self.tbox {
            decl.use_name(&ax.sub, ax.kind.name_kind(), "tbox")?;
            decl.use_name(&ax.sup, ax.kind.name_kind(), "tbox")?;
        }
        for ca in &self.concept_assertions {
            decl.use_name(&ca.concept, NameKind::Concept, "concept assertion")?;
            decl.use_name(&ca.individual, NameKind::Individual, "concept assertion")?;
        }
        for ra in &self.role_assertions {
            decl.use_name(&ra.role, NameKind::Role, "role assertion")?;
            decl.use_name(&ra.subject, NameKind::Individual, "role assertion")?;
            decl.use_name(&ra.object, NameKind::Individual, "role assertion")?;
        }
        let mut seen = BTreeSet::new();
        for e in &self.exemplars {
            decl.use_name(e, NameKind::Individual, "exemplars")?;
            if !seen.insert(e.as_str()) {
                return Err(DatasetError::DuplicateExemplar(e.clone()));
            }
        }
        for (table, rows) in &self.predictions {
            for (exemplar, class) in rows {
                if !seen.contains(exemplar.as_str()) {
                    return Err(DatasetError::UnknownExemplar {
                        table: table.clone(),
                        exemplar: exemplar.clone(),
                    });
                }
                check_identifier(class, "predictions")?;
            }
        }

        let mut vocabulary = Vocabulary::default();
        for (name, kind) in decl.kinds {
            match kind {
                NameKind::Concept => vocabulary.concept_names.insert(name),
                NameKind::Role => vocabulary.role_names.insert(name),
                NameKind::Individual => vocabulary.individual_names.insert(name),
            };
        }
        let classes = match self.classes {
            Some(cs) => {
                for c in &cs {
                    check_identifier(c, "classes")?;
                }
                cs.into_iter().collect()
            }
            None => self.predictions.values().flat_map(|t| t.values().cloned()).collect(),
        };

        let mut warnings = decl.warnings;
        let kb = KnowledgeBase {
            tbox: self.tbox,
            concept_assertions: self.concept_assertions,
            role_assertions: self.role_assertions,
        };
        for cycle in graph::tbox_cycles(&kb.tbox) {
            warnings.push(Warning::TboxCycle(cycle));
        }
        let ds = ExplanationDataset {
            vocabulary,
            kb,
            exemplars: self.exemplars,
            predictions: self.predictions,
            classes,
        };
        Ok((ds, warnings))
    }
}
