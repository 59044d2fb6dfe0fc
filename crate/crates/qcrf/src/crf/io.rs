//! Text formats for datasets and feature tables.
//!
//! Dataset file: one token per line as `observation<TAB>label`, blank
//! line between sequences. Feature-table file: header `K n Q`, then one
//! line per (k, i) pair — k outer, i inner — holding Q signs in {-1, 1}
//! separated by spaces. Floating-point output always uses 17 significant
//! digits so values round-trip exactly.

use super::types::{FeatureTable, LabelAlphabet, Sequence};
use crate::error::{QcrfError, Result};

/// Format a float with 17 significant digits (round-trips f64 exactly).
pub fn format_f64_17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parse a dataset file into token/label sequences plus the alphabet
/// gathered from the labels in order of first appearance.
pub fn read_dataset_tokens(text: &str) -> Result<(Vec<Sequence>, LabelAlphabet)> {
    let mut label_tokens: Vec<String> = Vec::new();
    let mut raw: Vec<Vec<(String, String)>> = Vec::new();
    let mut current: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                raw.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let obs = parts.next().unwrap_or_default();
        let label = parts.next().ok_or_else(|| {
            QcrfError::Parse(format!(
                "line {}: expected observation<TAB>label, got {line:?}",
                lineno + 1
            ))
        })?;
        if !label_tokens.iter().any(|t| t == label) {
            label_tokens.push(label.to_string());
        }
        current.push((obs.to_string(), label.to_string()));
    }
    if !current.is_empty() {
        raw.push(current);
    }
    if raw.is_empty() {
        return Err(QcrfError::Parse("dataset file holds no sequences".into()));
    }
    let alphabet = LabelAlphabet::new(label_tokens)?;
    let mut sequences = Vec::with_capacity(raw.len());
    for pairs in raw {
        let labels = pairs
            .iter()
            .map(|(_, l)| alphabet.index_of(l).expect("label was registered"))
            .collect();
        sequences.push(Sequence::new(
            pairs.into_iter().map(|(o, _)| o),
            Some(labels),
            &alphabet,
        )?);
    }
    Ok((sequences, alphabet))
}

/// Parse a feature-table file (`K n Q` header, then K·n sign rows).
pub fn read_feature_table(text: &str) -> Result<FeatureTable> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| QcrfError::Parse("empty feature table file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|e| QcrfError::Parse(format!("bad header field {t:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    let [k, n, q] = dims[..] else {
        return Err(QcrfError::Parse(format!(
            "header must be \"K n Q\", got {header:?}"
        )));
    };
    let mut signs = Vec::with_capacity(k * n * q);
    for row in 0..k * n {
        let line = lines.next().ok_or_else(|| {
            QcrfError::Parse(format!("expected {} sign rows, found {row}", k * n))
        })?;
        for token in line.split_whitespace() {
            let value: i8 = token
                .parse()
                .map_err(|e| QcrfError::Parse(format!("bad sign {token:?}: {e}")))?;
            signs.push(value);
        }
        if signs.len() != (row + 1) * q {
            return Err(QcrfError::Parse(format!(
                "row {} must hold exactly {q} signs",
                row + 1
            )));
        }
    }
    if lines.next().is_some() {
        return Err(QcrfError::Parse("trailing rows after sign matrix".into()));
    }
    FeatureTable::from_signs(n, k, q, signs)
}

/// Serialize a feature table in the `K n Q` text format.
pub fn write_feature_table(table: &FeatureTable) -> String {
    let mut out = format!(
        "{} {} {}\n",
        table.feature_count(),
        table.positions(),
        table.label_count()
    );
    for k in 0..table.feature_count() {
        for i in 0..table.positions() {
            let row: Vec<String> = (0..table.label_count())
                .map(|j| table.sign(k, i, j).to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}
