use std::fmt;
use std::path::Path;

use serde_json::{json, Value};

/// A failed command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files: exit code 2.
    Usage(String),
    /// Errors from the library; numerical and physicality failures exit with 3.
    Core(qpt_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Usage(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => e.kind(),
        }
    }

    /// The single-line JSON object written to stderr.
    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "code": self.exit_code(),
            "kind": self.kind(),
            "message": self.to_string(),
        });
        if let CliError::Core(qpt_core::Error::SolverFailure { iteration, trace }) = self {
            body["iteration"] = json!(iteration);
            body["trace"] = trace
                .iter()
                .map(|r| {
                    json!({
                        "iteration": r.iteration,
                        "loglik": r.log_likelihood,
                        "tp_residual": r.tp_residual,
                        "psd_margin": r.psd_margin,
                        "closure_residual": r.closure_residual,
                    })
                })
                .collect();
        }
        json!({ "error": body })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qpt_core::Error> for CliError {
    fn from(e: qpt_core::Error) -> Self {
        CliError::Core(e)
    }
}
