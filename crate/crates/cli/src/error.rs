use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, flags or problem hypotheses.
    #[error("{0}")]
    Validation(String),

    /// The solver stopped without meeting its convergence criterion.
    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<frachs::Error> for CliError {
    fn from(e: frachs::Error) -> Self {
        use frachs::Error as E;
        match e {
            E::PathCollapse { .. } => CliError::NotConverged(e.to_string()),
            E::Io(_) | E::Format(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
