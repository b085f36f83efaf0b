use std::fs;
use std::path::Path;

use acr_core::network::PowerLawSystem;
use acr_core::parser::{parse_system, InputError};
use serde::Serialize;

/// A failure tied to one input file, in the shape emitted in JSON reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FileError {
    Io {
        message: String,
    },
    Parse {
        line: usize,
        column: usize,
        message: String,
        snippet: String,
    },
    Model {
        message: String,
    },
    Internal {
        message: String,
    },
}

impl FileError {
    pub fn is_internal(&self) -> bool {
        matches!(self, FileError::Internal { .. })
    }

    /// One human-readable block, prefixed by the path.
    pub fn render(&self, path: &Path) -> String {
        let path = path.display();
        match self {
            FileError::Io { message } => format!("{path}: cannot read: {message}"),
            FileError::Parse {
                line,
                column,
                message,
                snippet,
            } => format!(
                "{path}:{line}:{column}: parse error: {message}\n  {snippet}\n  {}^",
                " ".repeat(column.saturating_sub(1))
            ),
            FileError::Model { message } => format!("{path}: invalid model: {message}"),
            FileError::Internal { message } => format!("{path}: internal error: {message}"),
        }
    }
}

impl From<InputError> for FileError {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Parse(p) => p.into(),
            InputError::Model(m) => FileError::Model {
                message: m.to_string(),
            },
        }
    }
}

impl From<acr_core::parser::ParseError> for FileError {
    fn from(p: acr_core::parser::ParseError) -> Self {
        FileError::Parse {
            line: p.line,
            column: p.column,
            message: p.message,
            snippet: p.snippet,
        }
    }
}

pub fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|e| FileError::Io {
        message: e.to_string(),
    })
}

pub fn load_system(path: &Path) -> Result<PowerLawSystem, FileError> {
    Ok(parse_system(&read(path)?)?)
}

pub fn species_index(sys: &PowerLawSystem, name: &str) -> Result<usize, String> {
    sys.species()
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| format!("unknown species {name:?}"))
}
