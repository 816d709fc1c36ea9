use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fractional order {0} must lie strictly inside (0, 1)")]
    InvalidOrder(f64),

    #[error("integration order {0} must be positive and finite")]
    InvalidIntegrationOrder(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite sample at node {node} (component {component})")]
    NonFinite { node: usize, component: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("derivative needs at least 4 subintervals, got {0}")]
    StencilTooSmall(usize),

    #[error(
        "data value {value:e} at the {endpoint} endpoint is not ~0: the fractional derivative \
         has a (t-a)^-alpha singularity there that the grid cannot represent"
    )]
    SingularBoundary { endpoint: &'static str, value: f64 },

    #[error("closed form is singular on the grid: {0}")]
    SingularClosedForm(String),

    #[error("non-finite Lagrangian integrand at node {node} (t = {t})")]
    NonFiniteIntegrand { node: usize, t: f64 },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("empty sampling box: {0}")]
    EmptyBox(String),

    #[error("hypothesis specification out of range: {0}")]
    InvalidHypothesis(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("rejected property parameters: {0}")]
    RejectedProperty(String),
}
