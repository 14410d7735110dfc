use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] chemospec::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} sweep point(s) failed; see the error column")]
    SweepFailures(usize),
}

impl CliError {
    /// 2 for rejected input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use chemospec::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParameter { .. } | E::Config(_) | E::Domain(_)) => 2,
            _ => 1,
        }
    }
}
