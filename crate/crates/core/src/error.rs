use thiserror::Error;

/// Errors raised by the operator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "series truncation failed: reached k cap {k_cap} with remaining weight mass {remaining_mass:e}"
    )]
    TruncationFailure { k_cap: u64, remaining_mass: f64 },

    #[error("function returned non-finite value {value} at quadrature node {node}")]
    NonFiniteFunction { node: f64, value: f64 },

    #[error("function returned non-finite value {value} at quadrature node ({u}, {v})")]
    NonFiniteBivariate { u: f64, v: f64, value: f64 },

    #[error("weight s(k={k}, x={x}) is not finite")]
    NonFiniteWeight { k: u64, x: f64 },

    #[error("degenerate grid: {nodes} node(s), need at least 2")]
    DegenerateGrid { nodes: usize },

    #[error(
        "Lipschitz hint violated between {u} and {x}: |f(u)-f(x)| = {observed:e} > {allowed:e}"
    )]
    LipschitzHintViolated {
        u: f64,
        x: f64,
        observed: f64,
        allowed: f64,
    },

    #[error(
        "mixed Lipschitz hint violated between ({u}, {v}) and ({x}, {y}): |f(u,v)-f(x,y)| = {observed:e} > {allowed:e}"
    )]
    BivariateLipschitzHintViolated {
        u: f64,
        v: f64,
        x: f64,
        y: f64,
        observed: f64,
        allowed: f64,
    },

    #[error("function `{0}` carries no Lipschitz hint")]
    MissingLipschitzHint(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationFailure { .. }
                | Error::NonFiniteFunction { .. }
                | Error::NonFiniteBivariate { .. }
                | Error::NonFiniteWeight { .. }
        )
    }
}
