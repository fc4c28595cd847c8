//! Library side of the `bpb` command-line tool: space files, commands,
//! verification suites, curve export and result records.

pub mod commands;
pub mod plot;
pub mod record;
pub mod specfile;
pub mod verify;

use std::fmt;

use bpb_core::BpbError;

pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_VACUOUS: i32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed space file, shorthand or parameter.
    Parse(String),
    Unsupported(String),
    Io(String),
    /// Numerical failure inside the library.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_PARSE,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
            CliError::Internal(_) => EXIT_FAILED_CHECK,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Unsupported(m) => write!(f, "unsupported space: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<BpbError> for CliError {
    fn from(e: BpbError) -> Self {
        match e {
            BpbError::UnsupportedSpace(m) => CliError::Unsupported(m),
            BpbError::Lp(m) => CliError::Internal(m),
            other => CliError::Parse(other.to_string()),
        }
    }
}

/// What a command produced: text for stdout, an exit code, and the
/// artifact (record, CSV, SVG or space file) that `--out` writes.
#[derive(Debug, Clone)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
    pub artifact: Option<String>,
}

pub(crate) fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|c| format!("{c:.9}")).collect();
    format!("[{}]", items.join(", "))
}
