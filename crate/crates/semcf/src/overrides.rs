//! Cost-override files: a JSON array of `{"from", "to", "cost"}` entries.

use serde::Deserialize;

use semcf_core::{Atom, CostError, Overrides, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum OverridesFileError {
    #[error("malformed override JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("override #{index}: {source}")]
    Entry { index: usize, source: CostError },
    #[error("override #{index}: cost must be a nonnegative number or \"inf\"")]
    BadCost { index: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CostDoc {
    Number(f64),
    Text(String),
}

#[derive(Deserialize)]
struct EntryDoc {
    from: String,
    to: String,
    cost: CostDoc,
}

pub fn parse_overrides(bytes: &[u8], vocabulary: &Vocabulary) -> Result<Overrides, OverridesFileError> {
    let entries: Vec<EntryDoc> = serde_json::from_slice(bytes).map_err(|e| OverridesFileError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut out = Overrides::new();
    for (index, e) in entries.into_iter().enumerate() {
        let cost = match e.cost {
            CostDoc::Number(c) => c,
            CostDoc::Text(t) if t == "inf" => f64::INFINITY,
            CostDoc::Text(_) => return Err(OverridesFileError::BadCost { index }),
        };
        let entry = |source| OverridesFileError::Entry { index, source };
        let from = Atom::from_token(&e.from, vocabulary).map_err(entry)?;
        let to = Atom::from_token(&e.to, vocabulary).map_err(entry)?;
        out.insert(from, to, cost).map_err(entry)?;
    }
    Ok(out)
}
