//! JSON dataset documents.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use semcf_core::{
    Axiom, AxiomKind, ConceptAssertion, DatasetBuilder, DatasetError, ExplanationDataset, RoleAssertion,
    Warning, EXEMPLAR,
};

#[derive(Debug, thiserror::Error)]
pub enum DatasetFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed dataset JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid dataset: {0}")]
    Invalid(#[from] DatasetError),
}

impl From<serde_json::Error> for DatasetFileError {
    fn from(e: serde_json::Error) -> Self {
        DatasetFileError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Concept,
    Role,
}

#[derive(Debug, Serialize, Deserialize)]
struct AxiomDoc {
    sub: String,
    sup: String,
    kind: KindDoc,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConceptAssertionDoc {
    concept: String,
    individual: String,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RoleAssertionDoc {
    role: String,
    subject: String,
    object: String,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct AboxDoc {
    #[serde(default)]
    concept_assertions: Vec<ConceptAssertionDoc>,
    #[serde(default)]
    role_assertions: Vec<RoleAssertionDoc>,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetDoc {
    #[serde(default)]
    concepts: Vec<String>,
    #[serde(default)]
    roles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classes: Option<Vec<String>>,
    #[serde(default)]
    tbox: Vec<AxiomDoc>,
    #[serde(default)]
    abox: AboxDoc,
    #[serde(default)]
    exemplars: Vec<String>,
    #[serde(default)]
    predictions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

fn unknown(prefix: &str, extra: &BTreeMap<String, Value>, out: &mut Vec<Warning>) {
    out.extend(extra.keys().map(|k| Warning::UnknownField(format!("{prefix}{k}"))));
}

/// Parses a dataset document. Unknown keys are reported as warnings next to
/// the ones raised while inferring undeclared identifiers.
pub fn parse_dataset(bytes: &[u8]) -> Result<(ExplanationDataset, Vec<Warning>), DatasetFileError> {
    let doc: DatasetDoc = serde_json::from_slice(bytes)?;
    let mut warnings = Vec::new();
    unknown("", &doc.extra, &mut warnings);
    unknown("abox.", &doc.abox.extra, &mut warnings);
    for (i, a) in doc.tbox.iter().enumerate() {
        unknown(&format!("tbox[{i}]."), &a.extra, &mut warnings);
    }
    for (i, a) in doc.abox.concept_assertions.iter().enumerate() {
        unknown(&format!("abox.concept_assertions[{i}]."), &a.extra, &mut warnings);
    }
    for (i, a) in doc.abox.role_assertions.iter().enumerate() {
        unknown(&format!("abox.role_assertions[{i}]."), &a.extra, &mut warnings);
    }

    let builder = DatasetBuilder {
        concepts: doc.concepts,
        roles: doc.roles,
        classes: doc.classes,
        tbox: doc
            .tbox
            .into_iter()
            .map(|a| Axiom {
                sub: a.sub,
                sup: a.sup,
                kind: match a.kind {
                    KindDoc::Concept => AxiomKind::Concept,
                    KindDoc::Role => AxiomKind::Role,
                },
            })
            .collect(),
        concept_assertions: doc
            .abox
            .concept_assertions
            .into_iter()
            .map(|a| ConceptAssertion { concept: a.concept, individual: a.individual })
            .collect(),
        role_assertions: doc
            .abox
            .role_assertions
            .into_iter()
            .map(|a| RoleAssertion { role: a.role, subject: a.subject, object: a.object })
            .collect(),
        exemplars: doc.exemplars,
        predictions: doc.predictions,
    };
    let (ds, more) = builder.build()?;
    warnings.extend(more);
    Ok((ds, warnings))
}

pub fn read_dataset(path: &Path) -> Result<(ExplanationDataset, Vec<Warning>, Vec<u8>), DatasetFileError> {
    let bytes = std::fs::read(path)
        .map_err(|source| DatasetFileError::Io { path: path.display().to_string(), source })?;
    let (ds, warnings) = parse_dataset(&bytes)?;
    Ok((ds, warnings, bytes))
}

/// Serializes a dataset; `parse_dataset` of the output yields an equal
/// dataset.
pub fn dataset_to_json(ds: &ExplanationDataset) -> String {
    let doc = DatasetDoc {
        concepts: ds.vocabulary.concept_names.iter().filter(|c| c.as_str() != EXEMPLAR).cloned().collect(),
        roles: ds.vocabulary.role_names.iter().cloned().collect(),
        classes: Some(ds.classes.iter().cloned().collect()),
        tbox: ds
            .kb
            .tbox
            .iter()
            .map(|a| AxiomDoc {
                sub: a.sub.clone(),
                sup: a.sup.clone(),
                kind: match a.kind {
                    AxiomKind::Concept => KindDoc::Concept,
                    AxiomKind::Role => KindDoc::Role,
                },
                extra: BTreeMap::new(),
            })
            .collect(),
        abox: AboxDoc {
            concept_assertions: ds
                .kb
                .concept_assertions
                .iter()
                .map(|a| ConceptAssertionDoc {
                    concept: a.concept.clone(),
                    individual: a.individual.clone(),
                    extra: BTreeMap::new(),
                })
                .collect(),
            role_assertions: ds
                .kb
                .role_assertions
                .iter()
                .map(|a| RoleAssertionDoc {
                    role: a.role.clone(),
                    subject: a.subject.clone(),
                    object: a.object.clone(),
                    extra: BTreeMap::new(),
                })
                .collect(),
            extra: BTreeMap::new(),
        },
        exemplars: ds.exemplars.clone(),
        predictions: ds.predictions.clone(),
        extra: BTreeMap::new(),
    };
    serde_json::to_string_pretty(&doc).expect("dataset serializes")
}
