use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown experiment `{0}`; see `pi-ocrs run --help` for the registered names")]
    UnknownExperiment(String),
    #[error("unknown distribution constructor `{0}`; see `pi-ocrs dump-dist --help`")]
    UnknownConstructor(String),
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("experiment `{experiment}` does not take `{key}`")]
    UnusedKey { experiment: String, key: String },
    #[error("config line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },
    #[error("fixture {path}: {source}")]
    Fixture { path: String, source: pi_ocrs::Error },
    #[error(transparent)]
    Core(#[from] pi_ocrs::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
