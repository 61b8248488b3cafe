use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of domain: {0}")]
    IndexDomain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{path}: row {row}, column `{column}`: {message}")]
    Ingest {
        path: String,
        row: usize,
        column: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("unknown {0}")]
    Lookup(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}
