//! Human, JSON and CSV renderings of query results.

use std::fmt::Write as _;

use serde_json::{json, Value};

use semcf_core::{
    ConceptSetDescription, EditOp, EditPath, Explanation, ImportanceReport, SourceSelector,
};

fn cost_json(c: f64) -> Value {
    if c.is_finite() {
        json!(c)
    } else {
        json!("inf")
    }
}

pub fn op_json(op: &EditOp) -> Value {
    let mut v = json!({ "from": op.from.token(), "to": op.to.token(), "cost": cost_json(op.cost) });
    if let Some(site) = &op.site {
        v["site"] = json!({ "source": site.source, "target": site.target });
    }
    v
}

pub fn path_json(p: &EditPath) -> Value {
    json!({
        "source": p.source,
        "target": p.target,
        "total_cost": cost_json(p.total_cost),
        "ops": p.ops.iter().map(op_json).collect::<Vec<_>>(),
    })
}

pub fn path_lines(p: &EditPath) -> String {
    let mut out = String::new();
    for op in &p.ops {
        let site = match &op.site {
            Some(s) => format!(
                "  [{} → {}]",
                s.source.as_deref().unwrap_or("+"),
                s.target.as_deref().unwrap_or("-")
            ),
            None => String::new(),
        };
        let _ = writeln!(out, "  {} → {}  cost {}{site}", op.from, op.to, op.cost);
    }
    out
}

pub fn description_json(d: &ConceptSetDescription) -> Value {
    json!({
        "exemplar": d.exemplar,
        "labels": d.labels.iter().map(|l| json!({
            "node": l.node,
            "atoms": l.atoms.iter().map(|a| a.token()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn explanations_table(source: &str, target: &str, xs: &[Explanation]) -> String {
    let mut out = format!("{source} → {target}\n");
    if xs.is_empty() {
        let _ = writeln!(out, "no exemplar of class {target} at finite distance");
        return out;
    }
    for (rank, x) in xs.iter().enumerate() {
        let _ = writeln!(out, "{}. {} (cost {})", rank + 1, x.counterfactual, x.cost);
        match &x.collapsed {
            Some(edits) => {
                for e in edits {
                    let _ = writeln!(out, "   {e}");
                }
            }
            None => out.push_str(&path_lines(&x.edits)),
        }
    }
    out
}

pub fn explanations_json(source: &str, target: &str, xs: &[Explanation]) -> Value {
    json!({
        "source": source,
        "target_class": target,
        "status": if xs.is_empty() { "no_finite_candidates" } else { "found" },
        "explanations": xs.iter().map(|x| {
            let mut v = json!({
                "counterfactual": x.counterfactual,
                "cost": cost_json(x.cost),
                "edits": x.edits.ops.iter().map(op_json).collect::<Vec<_>>(),
            });
            if let Some(c) = &x.collapsed {
                v["abox_edits"] = json!(c.iter().map(|e| e.to_string()).collect::<Vec<_>>());
            }
            v
        }).collect::<Vec<_>>(),
    })
}

fn selector_json(s: &SourceSelector) -> Value {
    match s {
        SourceSelector::Class(c) => json!({ "class": c }),
        SourceSelector::Exemplars(es) => json!({ "exemplars": es }),
    }
}

pub fn importance_table(r: &ImportanceReport) -> String {
    let mut out = format!(
        "{} → {}: {} explanations{}\n",
        r.source_selector,
        r.target_class,
        r.n_explanations,
        if r.skipped.is_empty() { String::new() } else { format!(", {} skipped", r.skipped.len()) }
    );
    let width = r.rows.iter().map(|row| row.atom.to_string().chars().count()).max().unwrap_or(4).max(4);
    let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}  {:>7}", "atom", "importance", "introduced", "removed");
    for row in &r.rows {
        let atom = row.atom.to_string();
        let pad = width - atom.chars().count();
        let _ = writeln!(
            out,
            "{atom}{:pad$}  {:>+10.3}  {:>10}  {:>7}",
            "", row.importance, row.introduced, row.removed
        );
    }
    out
}

pub fn importance_json(r: &ImportanceReport) -> Value {
    json!({
        "source_selector": selector_json(&r.source_selector),
        "target_class": r.target_class,
        "n_explanations": r.n_explanations,
        "skipped": r.skipped,
        "rows": r.rows.iter().map(|row| json!({
            "atom": row.atom.token(),
            "importance": row.importance,
            "introduced": row.introduced,
            "removed": row.removed,
        })).collect::<Vec<_>>(),
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn importance_csv(r: &ImportanceReport) -> String {
    let mut out = String::from("atom,importance,introduced,removed\n");
    for row in &r.rows {
        let _ = writeln!(out, "{},{},{},{}", csv_field(&row.atom.token()), row.importance, row.introduced, row.removed);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use semcf_core::{Atom, ImportanceRow};

    fn report() -> ImportanceReport {
        ImportanceReport {
            source_selector: SourceSelector::Class("Negative".into()),
            target_class: "Positive".into(),
            rows: vec![
                ImportanceRow { atom: Atom::concept("Symptom"), importance: -1.298, introduced: 0, removed: 74 },
                ImportanceRow { atom: Atom::exists("has", "Cough"), importance: 0.5, introduced: 30, removed: 1 },
            ],
            n_explanations: 57,
            skipped: vec![],
        }
    }

    #[test]
    fn table_rows_are_atom_then_signed_value() {
        let t = importance_table(&report());
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[2].starts_with("Symptom"));
        assert!(lines[2].contains("-1.298"));
        assert!(lines[3].starts_with("∃has.Cough"));
        assert!(lines[3].contains("+0.500"));
    }

    #[test]
    fn csv_header_and_quoting() {
        let c = importance_csv(&report());
        let mut lines = c.lines();
        assert_eq!(lines.next(), Some("atom,importance,introduced,removed"));
        assert_eq!(lines.next(), Some("Symptom,-1.298,0,74"));
        assert_eq!(lines.next(), Some("exists:has:Cough,0.5,30,1"));
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }

    #[test]
    fn json_shape() {
        let j = importance_json(&report());
        assert_eq!(j["n_explanations"], 57);
        assert_eq!(j["rows"][0]["atom"], "Symptom");
        assert_eq!(j["source_selector"]["class"], "Negative");
    }
}
