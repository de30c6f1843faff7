// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Every variant maps to a stable machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input outside domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("node `{node}` has {parents} parents; at most 2 are supported")]
    UnsupportedArity { node: String, parents: usize },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("line {line}: {message}")]
    Parse {
        line: usize,
        code: ParseCode,
        node: Option<String>,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Distinct failure classes for the text formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseCode {
    Syntax,
    UnknownParent,
    DuplicateNode,
    BadProbability,
    Arity,
    MissingEntry,
    Cycle,
    UnknownNode,
}

impl ParseCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseCode::Syntax => "E_SYNTAX",
            ParseCode::UnknownParent => "E_UNKNOWN_PARENT",
            ParseCode::DuplicateNode => "E_DUPLICATE_NODE",
            ParseCode::BadProbability => "E_BAD_PROBABILITY",
            ParseCode::Arity => "E_ARITY",
            ParseCode::MissingEntry => "E_MISSING_ENTRY",
            ParseCode::Cycle => "E_CYCLE",
            ParseCode::UnknownNode => "E_UNKNOWN_NODE",
        }
    }
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "E_DOMAIN",
            Error::Input(_) => "E_INPUT",
            Error::UnsupportedArity { .. } => "E_ARITY",
            Error::Capacity(_) => "E_CAPACITY",
            Error::Validation(_) => "E_VALIDATION",
            Error::Parse { code, .. } => code.as_str(),
            Error::Io(_) => "E_IO",
        }
    }

    pub(crate) fn parse(
        line: usize,
        code: ParseCode,
        node: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            line,
            code,
            node: node.map(str::to_owned),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
