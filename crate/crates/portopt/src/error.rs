use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lp error: {0}")]
    Lp(String),
    #[error("milp error: {0}")]
    Milp(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("instance validation failed:\n{0}")]
    InvalidInstance(String),
    #[error("parse error in {file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver error: {0}")]
    Solver(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
