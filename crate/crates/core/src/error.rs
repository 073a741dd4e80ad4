use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    Usage(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A function was evaluated outside its domain (e.g. `0^r` with `r < 0`).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A closed-form precondition failed; `missing` names an element the
    /// closure would have to contain.
    #[error("set is not {property}: missing element {missing}")]
    NotClosed {
        property: &'static str,
        missing: String,
    },

    #[error("not a partial order: {0}")]
    OrderAxiom(String),

    #[error("not a meet semilattice: ({0}, {1}) has no unique meet")]
    NoMeet(String, String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
