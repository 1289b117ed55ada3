use thiserror::Error;

/// Errors raised by mesh construction, operator application and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid operator word `{word}`: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("non-manifold mesh: {} offending edge(s): {}", edges.len(), format_edges(edges))]
    NonManifold { edges: Vec<(usize, usize)> },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("ringnet too small: {0}; increase rho (a c.k-net determines the c.2k-net of the next level)")]
    RingnetTooSmall(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("operator `{0}` is not a base case of the difference-scheme derivation (A, R, V, AR)")]
    NotABaseCase(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn format_edges(edges: &[(usize, usize)]) -> String {
    edges
        .iter()
        .take(16)
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
