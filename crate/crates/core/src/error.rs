use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed WAV file {path}: {reason}")]
    MalformedWav { path: String, reason: String },
    #[error("unsupported WAV format in {path}: {reason}")]
    UnsupportedFormat { path: String, reason: String },

    #[error("bad label {label:?} at manifest row {row} (expected real or fake)")]
    BadLabel { row: usize, label: String },
    #[error("manifest has no entries")]
    EmptyManifest,
    #[error("unreadable audio files: {}", display_paths(.paths))]
    FileError { paths: Vec<PathBuf> },
    #[error("every row was dropped while cleaning ({dropped} rows contained non-finite values)")]
    AllRowsDropped { dropped: usize },
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("training data contains a single class")]
    SingleClass,
    #[error("input contains non-finite values")]
    NonFiniteInput,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid label value {0} (labels must be 0 or 1)")]
    InvalidLabel(u8),
    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),

    #[error("unsupported model format_version {found} (this build reads {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("target_k {k} out of range 1..={max}")]
    BadK { k: usize, max: usize },
    #[error("feature index {index} out of range for {width} columns")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("corrupt selection file: {0}")]
    CorruptSelection(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("ROC analysis needs both classes in the labels")]
    OneClassOnly,
    #[error("corrupt report file: {0}")]
    CorruptReport(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
