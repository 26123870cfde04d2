//! CSV and document emission. Numbers are written with 9 significant
//! digits in scientific notation so files are byte-stable across runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

pub fn fmt_num(x: f64) -> String {
    // collapse -0 so sign noise never changes a file
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.8e}")
}

/// Builds a CSV document from a header and rows of already formatted fields.
pub fn csv_document<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    let bytes = w.into_inner().expect("in-memory csv");
    String::from_utf8(bytes).expect("csv fields are utf-8")
}

pub fn toml_document<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| CliError::Serialize(e.to_string()))
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
