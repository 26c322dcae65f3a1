use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (files, measures, flags).
    #[error("input error: {0}")]
    Input(String),
    /// A guard on exponential enumeration was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// Detailed balance fails on a specific edge.
    #[error("reversibility error on edge {edge}: {detail}")]
    Reversibility { edge: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Error {
        Error::Input(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Error {
        Error::Resource(msg.into())
    }
}
