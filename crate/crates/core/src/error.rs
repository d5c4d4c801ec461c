use thiserror::Error;

/// Errors raised by data ingestion, estimation and the test procedures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: column `{column}` not found")]
    MissingColumn { column: String },

    #[error("schema error: column `{column}` is used for more than one role")]
    DuplicateColumn { column: String },

    #[error(
        "parse error at row {row}, column `{column}`: cannot read `{value}` as a finite number"
    )]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error("validation error: sub-cluster `{subcluster}` appears under clusters `{first}` and `{second}`")]
    Nesting {
        subcluster: String,
        first: String,
        second: String,
    },

    #[error("validation error: {0}")]
    Invalid(String),

    #[error("singular design: {0}")]
    Singular(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
