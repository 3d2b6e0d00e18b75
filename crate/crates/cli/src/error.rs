use thiserror::Error;

/// CLI failures, each mapped to a distinct exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0} compare check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Numerical(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::ChecksFailed(_) => "check",
            CliError::Config(_) => "config",
            CliError::Parse(_) => "parse",
            CliError::Guard(_) => "guard",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }

    pub fn io(what: &str, path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Config(format!("cannot {what} {}: {e}", path.display()))
    }
}

impl From<persinv::Error> for CliError {
    fn from(e: persinv::Error) -> Self {
        use persinv::Error as E;
        let message = e.to_string();
        match e {
            E::Parse { .. } | E::InvalidCloud(_) | E::NoMatchingAtoms { .. } => {
                CliError::Parse(message)
            }
            E::SimplexBudget { .. } | E::VertexGuard { .. } => CliError::Guard(message),
            E::Eigensolver { .. } => CliError::Numerical(message),
            E::InvalidArgument(_) | E::NotIncluded(_) | E::IncompleteTable(_) => {
                CliError::Config(message)
            }
        }
    }
}
