//! Exit codes, error reporting and artifact output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use schur_dilation::Error;
use serde::Serialize;

/// Version tag of the JSON written to stderr on failure.
pub const ERROR_SCHEMA: &str = "schurdil-error/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Validation = 1,
    NonConvergence = 2,
    Io = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub kind: String,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    schema: &'a str,
    exit_code: i32,
    kind: &'a str,
    message: &'a str,
}

impl CliError {
    pub fn validation(kind: &str, message: impl Into<String>) -> Self {
        CliError { code: ExitCode::Validation, kind: kind.into(), message: message.into() }
    }

    pub fn non_convergence(message: impl Into<String>) -> Self {
        CliError { code: ExitCode::NonConvergence, kind: "non_convergence".into(), message: message.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError { code: ExitCode::Io, kind: "io".into(), message: format!("{}: {err}", path.display()) }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorJson {
            schema: ERROR_SCHEMA,
            exit_code: self.code as i32,
            kind: &self.kind,
            message: &self.message,
        })
        .expect("error JSON")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::ShapeMismatch(_) | Error::NotSquare { .. } => "shape_mismatch",
            Error::DimensionOverflow(_) | Error::DimensionCap { .. } => "dimension_cap",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::InvalidMatrix(_) => "invalid_matrix",
            Error::InvalidAlgebra(_) => "invalid_algebra",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotMember { .. } => "not_member",
            Error::WindowExceeded { .. } => "window_exceeded",
            Error::Screen(f) => f.tag(),
            Error::SizeGuard(_) => "size_guard",
            Error::SingularCayley { .. } => "singular_cayley",
            Error::Invalid(_) => "invalid_input",
        };
        CliError::validation(kind, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation("invalid_json", format!("{}: {e}", path.display())))
}

pub fn read_value(path: &Path) -> CliResult<serde_json::Value> {
    read_json(path)
}

/// Where artifacts go: a file or stdout.
pub struct Sink {
    pub path: Option<PathBuf>,
    pub quiet: bool,
}

impl Sink {
    pub fn emit<T: Serialize>(&self, value: &T) -> CliResult<()> {
        let mut text =
            serde_json::to_string_pretty(value).map_err(|e| CliError::validation("serialization", e.to_string()))?;
        text.push('\n');
        match &self.path {
            Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                lock.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
            }
        }
    }

    /// Human-readable progress on stderr.
    pub fn note(&self, line: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", line.as_ref());
        }
    }
}
