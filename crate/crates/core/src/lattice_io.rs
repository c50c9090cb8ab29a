//! Line-delimited JSON lattice files and JSON transition files.
//!
//! A lattice file holds one sentence per line:
//!
//! ```text
//! {"labels": ["O", "B-X", ...], "scores": [[0.1, 2.0, ...], ...]}
//! ```
//!
//! `labels` must be identical on every line. Optional `tokens` and `gold`
//! arrays carry surface tokens and gold labels of the same length as
//! `scores`. A transition file is a single object with `labels` and a
//! `(T+2)×(T+2)` `scores` array whose last two rows/columns are `GO` and
//! `EOS`; `null` or `"-inf"` stands for −∞.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::EmissionLattice;
use crate::mask::TransitionMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub labels: Vec<String>,
    pub scores: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<Vec<String>>,
}

impl LatticeRecord {
    pub fn lattice(&self) -> Result<EmissionLattice<f64>> {
        EmissionLattice::from_rows(self.scores.clone())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Token strings, or their indices when the record has none.
    pub fn token_strings(&self) -> Vec<String> {
        match &self.tokens {
            Some(t) => t.clone(),
            None => (0..self.len()).map(|i| i.to_string()).collect(),
        }
    }

    fn check(&self, labels: &[String]) -> std::result::Result<(), String> {
        if self.labels != labels {
            return Err("labels differ from the first record".into());
        }
        if self.scores.is_empty() {
            return Err("empty scores".into());
        }
        let t = labels.len();
        if let Some((i, row)) = self.scores.iter().enumerate().find(|(_, r)| r.len() != t) {
            return Err(format!(
                "score row {i} has {} entries, expected {t}",
                row.len()
            ));
        }
        let n = self.scores.len();
        if self.tokens.as_ref().is_some_and(|v| v.len() != n) {
            return Err(format!("tokens length differs from {n} score rows"));
        }
        if self.gold.as_ref().is_some_and(|v| v.len() != n) {
            return Err(format!("gold length differs from {n} score rows"));
        }
        Ok(())
    }
}

/// Reads every record, checking shapes and label agreement. Blank lines
/// are skipped; record numbers in errors are 1-based line numbers.
pub fn read_lattices<R: BufRead>(reader: R) -> Result<Vec<LatticeRecord>> {
    let mut records: Vec<LatticeRecord> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LatticeRecord = serde_json::from_str(&line).map_err(|e| Error::Record {
            record: i + 1,
            message: e.to_string(),
        })?;
        let labels = records.first().map_or(&record.labels, |r| &r.labels);
        record.check(labels).map_err(|message| Error::Record {
            record: i + 1,
            message,
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_lattices<W: Write>(records: &[LatticeRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionsFile {
    pub labels: Vec<String>,
    pub matrix: TransitionMatrix<f64>,
}

fn cell(v: &Value) -> Option<f64> {
    match v {
        Value::Null => Some(f64::NEG_INFINITY),
        Value::Number(n) => n.as_f64(),
        Value::String(s) if matches!(s.as_str(), "-inf" | "-Infinity") => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

pub fn read_transitions<R: std::io::Read>(reader: R) -> Result<TransitionsFile> {
    let bad = |message: String| Error::Record { record: 1, message };
    let value: Value = serde_json::from_reader(reader).map_err(|e| bad(e.to_string()))?;
    let labels: Vec<String> =
        serde_json::from_value(value.get("labels").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(format!("labels: {e}")))?;
    let rows = value
        .get("scores")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing scores array".into()))?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| bad(format!("scores row {i} is not an array")))?
                .iter()
                .map(|v| cell(v).ok_or_else(|| bad(format!("scores row {i}: bad entry {v}"))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = TransitionMatrix::from_rows(rows)?;
    if matrix.num_tags() != labels.len() {
        return Err(bad(format!(
            "{} labels need a {}x{} matrix",
            labels.len(),
            labels.len() + 2,
            labels.len() + 2
        )));
    }
    Ok(TransitionsFile { labels, matrix })
}

pub fn write_transitions<W: Write>(file: &TransitionsFile, out: W) -> Result<()> {
    let rows: Vec<Vec<Value>> = file
        .matrix
        .rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    if x == f64::NEG_INFINITY {
                        Value::Null
                    } else {
                        Value::from(x)
                    }
                })
                .collect()
        })
        .collect();
    let v = serde_json::json!({ "labels": file.labels, "scores": rows });
    serde_json::to_writer(out, &v).map_err(std::io::Error::from)?;
    Ok(())
}
