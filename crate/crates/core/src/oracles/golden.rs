//! Pinned reference values in a `key = value` text file.
//!
//! A missing key is appended on first use; afterwards the stored value is
//! authoritative. Lines starting with `#` are comments.

use std::fs::OpenOptions;
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GoldenError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("golden value {key}: stored {stored}, computed {computed}")]
    Mismatch { key: String, stored: String, computed: String },
}

fn lookup(text: &str, key: &str) -> Option<String> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim().to_string())
}

/// Returns the stored value for `key`, recording `computed` if absent.
fn stored_or_record(path: &Path, key: &str, computed: &str) -> Result<String, GoldenError> {
    let io = |source| GoldenError::Io { path: path.display().to_string(), source };
    let mut f = OpenOptions::new().read(true).append(true).create(true).open(path).map_err(io)?;
    f.lock().map_err(io)?;
    let mut text = String::new();
    f.seek(SeekFrom::Start(0)).map_err(io)?;
    f.read_to_string(&mut text).map_err(io)?;
    if let Some(v) = lookup(&text, key) {
        return Ok(v);
    }
    let sep = if text.is_empty() || text.ends_with('\n') { "" } else { "\n" };
    writeln!(f, "{sep}{key} = {computed}").map_err(io)?;
    Ok(computed.to_string())
}

pub fn check_or_record(path: &Path, key: &str, computed: &str) -> Result<(), GoldenError> {
    let stored = stored_or_record(path, key, computed)?;
    if stored == computed {
        Ok(())
    } else {
        Err(GoldenError::Mismatch { key: key.into(), stored, computed: computed.into() })
    }
}

/// Numeric variant, equal within `rel_tol` relative error.
pub fn check_or_record_f64(path: &Path, key: &str, computed: f64, rel_tol: f64) -> Result<(), GoldenError> {
    let text = format!("{computed:.17e}");
    let stored = stored_or_record(path, key, &text)?;
    let ok = stored
        .parse::<f64>()
        .is_ok_and(|s| (s - computed).abs() <= rel_tol * s.abs().max(computed.abs()) || s == computed);
    if ok {
        Ok(())
    } else {
        Err(GoldenError::Mismatch { key: key.into(), stored, computed: text })
    }
}
