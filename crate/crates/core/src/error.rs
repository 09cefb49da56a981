use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("not an absolute IRI: {0:?}")]
    NotAbsolute(String),
    #[error("IRI contains an invalid character: {0:?}")]
    InvalidCharacter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: document is not valid UTF-8 (byte offset {offset})")]
    NotUtf8 { line: u64, offset: usize },
    #[error("line {line}, column {column}: syntax error at `{token}`: {message}")]
    Syntax {
        line: u64,
        column: u64,
        token: String,
        message: String,
    },
    #[error("line {line}, column {column}: relative IRI {iri} and no base IRI given")]
    RelativeIri { line: u64, column: u64, iri: String },
    #[error("line {line}, column {column}: unsupported construct: {construct}")]
    Unsupported {
        line: u64,
        column: u64,
        construct: String,
    },
    #[error("invalid base IRI: {0}")]
    InvalidBase(String),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_id}: {error}")]
    Parse { source_id: String, error: ParseError },
    #[error("cannot locate a document for <{0}>")]
    NotFound(String),
    #[error("{path}:{line}: {message}")]
    Catalog {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Toml(String),
    #[error("vocabulary key `{key}`: {error}")]
    Iri { key: String, error: IriError },
    #[error("unknown vocabulary key `{0}`")]
    UnknownKey(String),
    #[error("vocabulary roles `{0}` and `{1}` share the IRI <{2}> without an alias")]
    DuplicateRole(String, String, String),
    #[error("{path}:{line}: {message}")]
    Exceptions {
        path: String,
        line: usize,
        message: String,
    },
    #[error("issue vocabulary is not configured: missing `{0}`")]
    MissingIssueVocabulary(&'static str),
}
