use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos} in {input:?}: {message}")]
    Syntax {
        pos: usize,
        message: String,
        input: String,
    },
    #[error("symbol {0:?} still contains family parameters")]
    Unbound(String),
    #[error("unknown family parameter {0:?}")]
    UnknownParameter(String),
    #[error("invalid family: {0}")]
    Family(String),
    #[error("position {0} cannot be augmented: {1}")]
    NotAugmentable(usize, String),
    #[error("position {0} does not hold a (2,2)-reversible subtangle")]
    NotReversible(usize),
    #[error("invalid diagram: {0}")]
    Diagram(String),
    #[error("invalid triangulation: {0}")]
    Triangulation(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("malformed csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
