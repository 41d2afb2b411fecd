use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("field: {0}")]
    Field(String),
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("invalid Ore data: {0}")]
    Ore(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("degree {degree} is outside the window (max {max})")]
    Bounds { degree: usize, max: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("fixture: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
