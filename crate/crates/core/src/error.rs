use std::fmt;

use thiserror::Error;

/// Group axiom checked by [`crate::group::GroupTable::from_table`], in checking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupAxiom {
    Latin,
    Identity,
    Inverse,
    Associativity,
}

impl fmt::Display for GroupAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GroupAxiom::Latin => "latin",
            GroupAxiom::Identity => "identity",
            GroupAxiom::Inverse => "inverse",
            GroupAxiom::Associativity => "associativity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },

    #[error("not a group: {axiom} axiom violated ({detail})")]
    NotAGroup { axiom: GroupAxiom, detail: String },

    #[error("invalid dynamical system: {invariant} ({detail})")]
    SystemViolation { invariant: String, detail: String },

    #[error("coefficient at g={g} is not in the algebra (residual {residual:e})")]
    NotInAlgebra { g: usize, residual: f64 },

    #[error("dilation space of dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("malformed instance: {message}")]
    Parse { message: String },

    #[error("at {path}: {source}")]
    At {
        path: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Attach (or prefix) the JSON path at which this error was found.
    pub fn at(self, path: &str) -> Self {
        match self {
            Error::At { path: inner, source } => Error::At {
                path: format!("{path}.{inner}"),
                source,
            },
            other => Error::At {
                path: path.to_string(),
                source: Box::new(other),
            },
        }
    }

    /// JSON path of the error, empty if none was attached.
    pub fn path(&self) -> &str {
        match self {
            Error::At { path, .. } => path,
            _ => "",
        }
    }

    /// The underlying error with any path annotations removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::At { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
