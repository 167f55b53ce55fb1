use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("legality error: {0}")]
    Legality(String),
    #[error("search error: {0}")]
    Search(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("margin {given} too small, construction needs {required}")]
    Growth { given: i64, required: i64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
