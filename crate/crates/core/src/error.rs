use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} lies outside the interval [-1, 1]")]
    Domain { x: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample set is empty")]
    EmptySample,

    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    #[error("quadrature rule has {nodes} nodes, at least {required} required")]
    InsufficientQuadrature { nodes: usize, required: usize },

    #[error("Newton iteration for the {m}-point Gauss-Legendre rule did not converge")]
    NonConvergence { m: usize },

    #[error("Cholesky factorization failed for n = {n}, lambda = {lambda:e}: matrix is not numerically positive definite")]
    Factorization { n: usize, lambda: f64 },

    #[error("solve residual {residual:e} exceeds 1e-8 * |Y| = {limit:e}")]
    Residual { residual: f64, limit: f64 },

    #[error("matrix is not symmetric (entry ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize },

    #[error("formula not applicable: {0}")]
    NotApplicable(String),

    #[error("missing bound input `{0}`")]
    MissingField(&'static str),

    #[error("every lambda in the GCV grid failed to factorize")]
    AllGridPointsFailed,

    #[error("replication {index}: {source}")]
    Replication {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("invalid lambda grid: {0}")]
    LambdaGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
