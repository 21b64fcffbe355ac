use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not a unit: {0}")]
    NonUnit(String),
    #[error("insufficient precision for {what}: need {required}, have {available}")]
    Precision {
        what: String,
        required: i64,
        available: i64,
    },
    #[error("window exhausted: {0}")]
    Window(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    pub fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub fn consistency(msg: impl fmt::Display) -> Self {
        Error::Consistency(msg.to_string())
    }

    pub fn precision(what: impl fmt::Display, required: i64, available: i64) -> Self {
        Error::Precision {
            what: what.to_string(),
            required,
            available,
        }
    }

    /// True for errors caused by running out of precision or window room,
    /// which the harness reports as indeterminate rather than failed.
    pub fn is_precision_starvation(&self) -> bool {
        matches!(self, Error::Precision { .. } | Error::Window(_))
    }
}
