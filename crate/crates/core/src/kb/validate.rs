//! Side-condition checks on explanation datasets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{AxiomKind, ExplanationDataset, NameKind, EXEMPLAR, TOP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    VocabularyOverlap,
    ReservedIdentifier,
    EmptyIdentifier,
    UndeclaredIdentifier,
    ExemplarInTbox,
    ExemplarFlagMismatch,
    ClassInKb,
    ClassAsRole,
    ExemplarNotIndividual,
    DuplicateExemplar,
    MissingPrediction,
    UnknownPredictionKey,
    UnknownClass,
}

impl ViolationCode {
    pub fn description(self) -> &'static str {
        match self {
            ViolationCode::VocabularyOverlap => "vocabulary sets are not disjoint",
            ViolationCode::ReservedIdentifier => "reserved identifier TOP declared",
            ViolationCode::EmptyIdentifier => "empty identifier",
            ViolationCode::UndeclaredIdentifier => "identifier not declared with matching kind",
            ViolationCode::ExemplarInTbox => "Exemplar occurs in TBox",
            ViolationCode::ExemplarFlagMismatch => "Exemplar asserted for a non-exemplar",
            ViolationCode::ClassInKb => "class occurs in KB",
            ViolationCode::ClassAsRole => "class occurs in KB as a role",
            ViolationCode::ExemplarNotIndividual => "exemplar is not a declared individual",
            ViolationCode::DuplicateExemplar => "exemplar listed twice",
            ViolationCode::MissingPrediction => "exemplar has no prediction",
            ViolationCode::UnknownPredictionKey => "prediction for a non-exemplar",
            ViolationCode::UnknownClass => "prediction is not a declared class",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} at {}: {}", self.severity, self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    fn push(&mut self, code: ViolationCode, severity: Severity, location: String, message: String) {
        self.violations.push(Violation { code, severity, location, message });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Severity when a class label is also used as a role name in the KB.
    pub class_as_role: Severity,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { class_as_role: Severity::Error }
    }
}

pub fn validate_dataset(ds: &ExplanationDataset, opts: &ValidationOptions) -> ValidationReport {
    use ViolationCode::*;
    let mut report = ValidationReport::default();
    let vocab = &ds.vocabulary;
    let err = Severity::Error;

    let sets: [(&str, &BTreeSet<String>); 3] = [
        ("concepts", &vocab.concept_names),
        ("roles", &vocab.role_names),
        ("individuals", &vocab.individual_names),
    ];
    for (i, (name_a, a)) in sets.iter().enumerate() {
        for (name_b, b) in &sets[i + 1..] {
            for shared in a.intersection(b) {
                report.push(
                    VocabularyOverlap,
                    err,
                    format!("vocabulary.{name_a}/{name_b}"),
                    format!("`{shared}` declared as both"),
                );
            }
        }
        if a.contains(TOP) {
            report.push(ReservedIdentifier, err, format!("vocabulary.{name_a}"), TOP.to_string());
        }
        if a.contains("") {
            report.push(EmptyIdentifier, err, format!("vocabulary.{name_a}"), String::new());
        }
    }

    let declared = |name: &str, kind: NameKind| match kind {
        NameKind::Concept => vocab.is_concept(name),
        NameKind::Role => vocab.is_role(name),
        NameKind::Individual => vocab.is_individual(name),
    };
    let require = |report: &mut ValidationReport, name: &str, kind: NameKind, loc: String| {
        if !declared(name, kind) {
            report.push(UndeclaredIdentifier, err, loc, format!("`{name}` is not a declared {kind}"));
        }
    };

    let exemplars: BTreeSet<&str> = ds.exemplars.iter().map(String::as_str).collect();
    for (i, ax) in ds.kb.tbox.iter().enumerate() {
        let loc = format!("tbox[{i}]");
        let kind = match ax.kind {
            AxiomKind::Concept => NameKind::Concept,
            AxiomKind::Role => NameKind::Role,
        };
        for name in [&ax.sub, &ax.sup] {
            require(&mut report, name, kind, loc.clone());
            if name == EXEMPLAR {
                report.push(ExemplarInTbox, err, loc.clone(), format!("{} ⊑ {}", ax.sub, ax.sup));
            } else if exemplars.contains(name.as_str()) {
                report.push(ExemplarInTbox, err, loc.clone(), format!("exemplar `{name}` in axiom"));
            }
        }
    }
    for (i, ca) in ds.kb.concept_assertions.iter().enumerate() {
        let loc = format!("abox.concept_assertions[{i}]");
        require(&mut report, &ca.concept, NameKind::Concept, loc.clone());
        require(&mut report, &ca.individual, NameKind::Individual, loc.clone());
        if ca.concept == EXEMPLAR && !exemplars.contains(ca.individual.as_str()) {
            report.push(
                ExemplarFlagMismatch,
                err,
                loc,
                format!("`{}` is not listed as an exemplar", ca.individual),
            );
        }
    }
    for (i, ra) in ds.kb.role_assertions.iter().enumerate() {
        let loc = format!("abox.role_assertions[{i}]");
        require(&mut report, &ra.role, NameKind::Role, loc.clone());
        require(&mut report, &ra.subject, NameKind::Individual, loc.clone());
        require(&mut report, &ra.object, NameKind::Individual, loc);
    }

    let classes = &ds.classes;
    let class_hit = |report: &mut ValidationReport, name: &str, as_role: bool, loc: String| {
        if classes.contains(name) {
            if as_role {
                report.push(ClassAsRole, opts.class_as_role, loc, format!("`{name}`"));
            } else {
                report.push(ClassInKb, err, loc, format!("`{name}`"));
            }
        }
    };
    for (i, ax) in ds.kb.tbox.iter().enumerate() {
        let as_role = ax.kind == AxiomKind::Role;
        class_hit(&mut report, &ax.sub, as_role, format!("tbox[{i}]"));
        class_hit(&mut report, &ax.sup, as_role, format!("tbox[{i}]"));
    }
    for (i, ca) in ds.kb.concept_assertions.iter().enumerate() {
        let loc = format!("abox.concept_assertions[{i}]");
        class_hit(&mut report, &ca.concept, false, loc.clone());
        class_hit(&mut report, &ca.individual, false, loc);
    }
    for (i, ra) in ds.kb.role_assertions.iter().enumerate() {
        let loc = format!("abox.role_assertions[{i}]");
        class_hit(&mut report, &ra.role, true, loc.clone());
        class_hit(&mut report, &ra.subject, false, loc.clone());
        class_hit(&mut report, &ra.object, false, loc);
    }

    let mut seen = BTreeSet::new();
    for (i, e) in ds.exemplars.iter().enumerate() {
        let loc = format!("exemplars[{i}]");
        if !vocab.is_individual(e) {
            report.push(ExemplarNotIndividual, err, loc.clone(), format!("`{e}`"));
        }
        if !seen.insert(e.as_str()) {
            report.push(DuplicateExemplar, err, loc, format!("`{e}`"));
        }
    }
    if ds.predictions.is_empty() && !ds.exemplars.is_empty() {
        report.push(MissingPrediction, err, "predictions".into(), "no prediction table".into());
    }
    for (table, rows) in &ds.predictions {
        for e in &ds.exemplars {
            if !rows.contains_key(e) {
                report.push(
                    MissingPrediction,
                    err,
                    format!("predictions.{table}"),
                    format!("`{e}` has no prediction"),
                );
            }
        }
        for (e, class) in rows {
            if !exemplars.contains(e.as_str()) {
                report.push(UnknownPredictionKey, err, format!("predictions.{table}.{e}"), e.clone());
            }
            if !classes.contains(class) {
                report.push(UnknownClass, err, format!("predictions.{table}.{e}"), class.clone());
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::fixtures::animals_dataset;
    use crate::kb::{Axiom, ConceptAssertion, RoleAssertion};

    #[test]
    fn animals_dataset_is_valid() {
        let report = validate_dataset(&animals_dataset(), &ValidationOptions::default());
        assert!(report.is_empty(), "{:?}", report);
    }

    #[test]
    fn exemplar_in_tbox() {
        let mut ds = animals_dataset();
        ds.kb.tbox.push(Axiom::concept("Exemplar", "Animal"));
        let report = validate_dataset(&ds, &ValidationOptions::default());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].code, ViolationCode::ExemplarInTbox);
        assert_eq!(report.violations[0].code.to_string(), "Exemplar occurs in TBox");
    }

    #[test]
    fn class_used_as_concept() {
        let mut ds = animals_dataset();
        ds.vocabulary.concept_names.insert("WildAnimal".into());
        ds.kb.concept_assertions.push(ConceptAssertion {
            concept: "WildAnimal".into(),
            individual: "a".into(),
        });
        let report = validate_dataset(&ds, &ValidationOptions::default());
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].code.to_string(), "class occurs in KB");
    }

    #[test]
    fn class_as_role_severity_is_configurable() {
        let mut ds = animals_dataset();
        ds.vocabulary.role_names.insert("WildAnimal".into());
        ds.kb.role_assertions.push(RoleAssertion {
            role: "WildAnimal".into(),
            subject: "a".into(),
            object: "b".into(),
        });
        let strict = validate_dataset(&ds, &ValidationOptions::default());
        assert!(strict.has_errors());
        let lenient =
            validate_dataset(&ds, &ValidationOptions { class_as_role: Severity::Warning });
        assert_eq!(lenient.violations.len(), 1);
        assert!(!lenient.has_errors());
    }

    #[test]
    fn overlapping_vocabulary_and_missing_predictions() {
        let mut ds = animals_dataset();
        ds.vocabulary.role_names.insert("Animal".into());
        ds.predictions.get_mut("default").unwrap().remove("e2");
        let codes: Vec<_> = validate_dataset(&ds, &ValidationOptions::default())
            .violations
            .iter()
            .map(|v| v.code)
            .collect();
        assert!(codes.contains(&ViolationCode::VocabularyOverlap));
        assert!(codes.contains(&ViolationCode::MissingPrediction));
    }

    #[test]
    fn exemplar_flag_on_non_exemplar() {
        let mut ds = animals_dataset();
        ds.kb
            .concept_assertions
            .push(ConceptAssertion { concept: EXEMPLAR.into(), individual: "a".into() });
        let report = validate_dataset(&ds, &ValidationOptions::default());
        assert_eq!(report.violations[0].code, ViolationCode::ExemplarFlagMismatch);
    }
}
