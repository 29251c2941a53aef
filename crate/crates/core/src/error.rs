use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// The composite Bob matrix is not full column rank, so the channel
    /// cannot be identified by an unbiased estimator.
    #[error("channel not identifiable: composite matrix has singular value ratio {ratio:.3e}")]
    NotIdentifiable { ratio: f64 },

    #[error("model error: {0}")]
    Model(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate precoder: all channel estimates are zero")]
    DegeneratePrecoder,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
