use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector is not allowed under cosine dissimilarity{}", fmt_row(.row))]
    ZeroVector { row: Option<usize> },
    #[error("{what} is empty")]
    Empty { what: &'static str },
    #[error("{what}: need at least {needed} points, found {found}")]
    TooFewPoints {
        what: &'static str,
        needed: usize,
        found: usize,
    },
    #[error("metric mismatch: {left} vs {right}")]
    MetricMismatch {
        left: crate::Metric,
        right: crate::Metric,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("duplicate sample id {0:?}")]
    DuplicateSampleId(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("attribute {0:?} is not categorical")]
    NotCategorical(String),
    #[error("attribute {0:?} has no numeric encoding")]
    NotNumeric(String),
    #[error("attribute {attribute:?}{}: {found} identities, need at least 2", fmt_modality(.modality))]
    TooFewIdentities {
        attribute: String,
        modality: Option<String>,
        found: usize,
    },
    #[error("sample id {0:?} has no attribute row")]
    MissingSample(String),
    #[error("missing result for modality {0:?}")]
    MissingModality(String),
    #[error("{0} is constant; correlation is undefined")]
    ConstantInput(&'static str),
    #[error("row {row} appears in more than one curve of attribute {attribute:?}")]
    ConflictingField { attribute: String, row: usize },
    #[error("curve with fewer than 2 points")]
    CurveTooShort,
    #[error("undefined at this scale: no valid (center, neighbor) pair")]
    UndefinedAtScale,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("synth: {0}")]
    Synth(String),
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged {
        epoch: usize,
        history: Box<crate::toy::TrainHistory>,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_row(row: &Option<usize>) -> String {
    match row {
        Some(r) => format!(" (row {r})"),
        None => String::new(),
    }
}

fn fmt_modality(m: &Option<String>) -> String {
    match m {
        Some(m) => format!(", modality {m:?}"),
        None => String::new(),
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_string(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

/// Parse and validation failures of the on-disk formats, located by byte
/// offset (binary files) or line number (text files).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic at byte {offset}")]
    BadMagic { offset: u64 },
    #[error("unsupported version {version} at byte {offset}")]
    UnsupportedVersion { offset: u64, version: u16 },
    #[error("unknown metric tag {tag} at byte {offset}")]
    BadMetricTag { offset: u64, tag: u8 },
    #[error("reserved byte is {value} at byte {offset}, expected 0")]
    NonzeroReserved { offset: u64, value: u8 },
    #[error("zero dimension at byte {offset}")]
    ZeroDimension { offset: u64 },
    #[error("truncated: need {needed} bytes at byte {offset}, {available} available")]
    Truncated {
        offset: u64,
        needed: u64,
        available: u64,
    },
    #[error("{count} trailing bytes at byte {offset}")]
    TrailingBytes { offset: u64, count: u64 },
    #[error("invalid UTF-8 at byte {offset}")]
    InvalidUtf8 { offset: u64 },
    #[error("non-finite coordinate at byte {offset}")]
    NonFinite { offset: u64 },
    #[error("duplicate sample id {id:?} at byte {offset}")]
    DuplicateSampleIdAt { offset: u64, id: String },
    #[error("row {row} is the zero vector under cosine dissimilarity (byte {offset})")]
    ZeroRowUnderCosine { offset: u64, row: usize },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("missing column {column:?}")]
    MissingColumn { column: String },
    #[error("line {line}, column {column:?}: missing value")]
    MissingValue { line: u64, column: String },
    #[error("line {line}, column {column:?}: {value:?} is not a declared modality")]
    UnknownModality {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}, column {column:?}: {value:?} is not a number")]
    BadNumber {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: duplicate sample id {id:?}")]
    DuplicateSampleIdLine { line: u64, id: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("line {line}: invalid JSON: {message}")]
    Json { line: u64, message: String },
    #[error("line {line}: duplicate index {index} in curve")]
    DuplicateCurveIndex { line: u64, index: u32 },
    #[error("line {line}: index {index} out of range for {rows} rows")]
    DanglingIndex { line: u64, index: u32, rows: usize },
    #[error("line {line}: params are not strictly increasing")]
    NonIncreasingParams { line: u64 },
    #[error("line {line}: {indices} indices but {params} params")]
    ParamCountMismatch {
        line: u64,
        indices: usize,
        params: usize,
    },
    #[error("line {line}: curve has fewer than 2 points")]
    ShortCurve { line: u64 },
    #[error("line {line}: curve length {found} differs from {expected} for attribute {attribute:?}")]
    CurveLength {
        line: u64,
        attribute: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: row {row} belongs to identity {actual:?}, curve declares {declared:?}")]
    CurveIdentity {
        line: u64,
        row: u32,
        declared: String,
        actual: String,
    },
}
