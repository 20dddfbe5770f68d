use serde_json::json;

/// Failures surfaced to the command line, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Numerical(_) | CliError::Output(_) => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Output(_) => "output",
        };
        let mut v = json!({"error": kind, "message": self.to_string(), "exit_code": self.exit_code()});
        if let CliError::Config { path, .. } = self {
            v["path"] = json!(path);
        }
        v
    }
}

impl From<hsc_core::Error> for CliError {
    fn from(e: hsc_core::Error) -> Self {
        use hsc_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidHistory(_) | E::InvalidInput(_) | E::CalibrationImpossible { .. } => {
                CliError::config("", e.to_string())
            }
            E::Export(m) => CliError::Output(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
