//! Reading binary sample data from disk.

use std::fs;
use std::path::Path;

use super::CliError;
use crate::intervals::SampleSummary;

/// Reads newline-delimited `0`/`1` tokens.
///
/// Blank lines are ignored. The first non-blank line is treated as a CSV
/// header and skipped when it does not parse as a number.
pub fn ingest_file(path: &Path) -> Result<SampleSummary, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    ingest_str(&text).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn ingest_str(text: &str) -> Result<SampleSummary, CliError> {
    let mut n = 0u64;
    let mut successes = 0u64;
    let mut seen_first = false;
    for (idx, raw) in text.lines().enumerate() {
        let token = raw.trim().trim_matches('"').trim();
        if token.is_empty() {
            continue;
        }
        if !seen_first {
            seen_first = true;
            if token.parse::<f64>().is_err() {
                continue;
            }
        }
        match token {
            "0" => n += 1,
            "1" => {
                n += 1;
                successes += 1;
            }
            other => {
                return Err(CliError::Data(format!(
                    "line {}: expected 0 or 1, found '{other}'",
                    idx + 1
                )))
            }
        }
    }
    if n == 0 {
        return Err(CliError::Data("no data points found".into()));
    }
    SampleSummary::from_counts(n, successes).map_err(|e| CliError::Data(e.to_string()))
}
