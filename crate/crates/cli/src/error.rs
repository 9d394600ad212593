use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] royden::Error),

    #[error("cannot read {0}: {1}")]
    Io(String, String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(..) => 1,
        }
    }

    pub fn record(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Usage(_) => "Usage",
            CliError::Domain(e) => e.kind(),
            CliError::Io(..) => "Io",
        };
        json!({ "error": { "kind": kind, "message": self.to_string() } })
    }
}
