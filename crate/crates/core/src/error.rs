use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("invalid POS tag {0:?}")]
    InvalidPos(String),
    #[error("invalid phrase category {0:?}")]
    InvalidCat(String),
    #[error("NONE cannot label a tree node")]
    NoneAsLabel,
    #[error("invalid REL symbol {0:?}")]
    InvalidRel(String),
    #[error("invalid structural tag {0:?}, expected TAG/REL/CAT")]
    InvalidTriple(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("leaf {leaf} lies at depth {depth}, the codec supports at most {max}")]
    DepthExceeded { leaf: usize, depth: usize, max: usize },
    #[error("malformed tree: {0}")]
    Malformed(String),
}

/// Errors raised while reading or writing corpus files.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: undeclared {kind} {symbol:?}")]
    Undeclared {
        line: usize,
        kind: &'static str,
        symbol: String,
    },
    #[error("sentence at line {line}: {source}")]
    Tree {
        line: usize,
        #[source]
        source: TreeError,
    },
    #[error("{0}")]
    Invalid(String),
}

impl CorpusError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        CorpusError::Parse {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("pattern set is empty")]
    Empty,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported model version {found}, expected {expected}")]
    Version { found: String, expected: u32 },
    #[error("checksum mismatch (file truncated or modified)")]
    Checksum,
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("future {0} is not in the model's inventory")]
    UndefinedFuture(String),
    #[error("training data is empty")]
    EmptyTraining,
    #[error("unknown probability source {0:?}")]
    UnknownSource(String),
    #[error("model file is not a {expected} model")]
    WrongKind { expected: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

impl ModelError {
    pub fn format(line: usize, message: impl Into<String>) -> Self {
        ModelError::Format {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("cannot decode an empty POS sequence")]
    EmptyInput,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoldError {
    #[error("fold count must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("{folds} folds requested for {sentences} sentences")]
    TooManyFolds { folds: usize, sentences: usize },
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Fold(#[from] FoldError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("training tree {index}: {source}")]
    Tree {
        index: usize,
        #[source]
        source: TreeError,
    },
    #[error("test tree {index}: {source}")]
    Decode {
        index: usize,
        #[source]
        source: DecodeError,
    },
}
