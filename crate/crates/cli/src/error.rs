use thiserror::Error;

/// Errors grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Empty(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Empty(_) => 3,
            CliError::Io(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<robpareto::Error> for CliError {
    fn from(e: robpareto::Error) -> Self {
        use robpareto::Error as E;
        let msg = e.to_string();
        match e {
            E::EmptyCandidates | E::EmptyFeasibleSet => CliError::Empty(msg),
            E::Lp(_) | E::Invariant(_) => CliError::Internal(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
