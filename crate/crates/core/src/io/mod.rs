//! JSON file formats for games, potentials and schemes; plain-text traces;
//! analysis reports.

mod files;
mod json;
pub mod report;

use std::fmt::Write as _;
use std::path::Path;

pub use json::to_json;
pub use files::{parse_model, write_model, FileKind, Model, ModelFile, TableEntry, FORMAT_VERSION};

use crate::dynamics::PlayTrace;
use crate::error::{Error, Result};

pub fn read_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// One play outcome per line, actions separated by single spaces.
pub fn format_trace(trace: &PlayTrace) -> String {
    let mut out = String::new();
    for z in trace.outcomes() {
        let line: Vec<String> = z.iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" ")).expect("writing to a string");
    }
    out
}

/// Inverse of [`format_trace`]; blank lines are ignored.
pub fn parse_trace(text: &str) -> Result<Vec<Vec<usize>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("trace line {}: {e}", k + 1)))
                })
                .collect()
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}
