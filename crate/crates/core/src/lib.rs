//! Counterfactual explanations for black-box classifiers expressed as
//! semantic edits over a description-logic knowledge base.
//!
//! The crate is `no_std` (with `alloc`). The `std` feature, on by default,
//! only enables a thread-safe memo for TBox distances; behavior is identical
//! without it.
//!
//! Pipeline: an [`ExplanationDataset`] is encoded as a [`TBoxGraph`] and an
//! [`ABoxGraph`]; each exemplar's connected component is rolled up into a
//! [`ConceptSetDescription`]; pairwise [`EditPath`]s between descriptions are
//! computed with a two-level minimum-weight matching under a TBox-derived
//! [`CostModel`] and stored in a [`DistanceCache`]; queries then pick the
//! nearest exemplar of a target class and aggregate edits into importance
//! reports.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cost;
pub mod edit;
pub mod explain;
pub mod ged;
pub mod kb;
pub mod matching;
pub mod rollup;
pub mod store;

pub use cost::{Atom, CostError, CostModel, Overrides};
pub use edit::{
    apply_edit_path, description_edit_distance, label_edit_distance, EditError, EditOp, EditPath,
    LabelPair, Site,
};
pub use explain::{
    collapse_to_abox_edits, counterfactual, global_importance, importance_from_paths, AboxEdit,
    ExplainError, Explanation, ImportanceReport, ImportanceRow, SourceSelector,
};
pub use ged::{exact_ged, GedBudget, GedError, GedResult, GraphEditKind, GraphEditOp, Interrupt};
pub use kb::graph::{exemplar_component, ABoxComponent, ABoxGraph, GraphError, TBoxGraph};
pub use kb::validate::{validate_dataset, Severity, ValidationOptions, ValidationReport, Violation};
pub use kb::{
    Axiom, AxiomKind, ConceptAssertion, DatasetBuilder, DatasetError, ExplanationDataset,
    KnowledgeBase, RoleAssertion, Vocabulary, Warning, EXEMPLAR, TOP,
};
pub use matching::{min_weight_full_match, CostMatrix, MatchError, Matching};
pub use rollup::{roll_up, ConceptSetDescription, Label, RollupOptions};
pub use store::{
    nearest_by_class, preprocess, Backend, DistanceCache, Nearest, PairResult, Prepared,
    PreprocessConfig, QueryStatus, StoreError, CACHE_VERSION,
};
