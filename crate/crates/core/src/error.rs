use thiserror::Error;

/// Errors produced by the kernel, assembly, solver and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpgError {
    #[error("point x = {x} lies outside [-1, 1]")]
    Domain { x: f64 },

    #[error("mode index {index} outside 0..={max}")]
    Index { index: usize, max: usize },

    #[error("Newton iteration for Gauss node {node} of order {order} did not converge")]
    QuadratureConvergence { order: usize, node: usize },

    #[error("non-finite value {value} at quadrature node x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("singular step matrix (N = {n}, dt = {dt}, alpha = {alpha}, beta = {beta})")]
    SingularStep { n: usize, dt: f64, alpha: f64, beta: f64 },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("QR iteration did not converge after {iterations} iterations")]
    EigenConvergence { iterations: usize },

    #[error("coefficient profile evaluated at t = {t}, outside its domain [{lo}, {hi}]")]
    ProfileDomain { t: f64, lo: f64, hi: f64 },

    #[error("hypothesis violated at step {k}: {detail}")]
    Hypothesis { k: usize, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite solution at step {k}")]
    NonFiniteSolution { k: usize },

    #[error("degenerate least-squares fit: {0}")]
    DegenerateFit(&'static str),

    #[error("bound containment failed: {0}")]
    Containment(String),
}

impl LpgError {
    /// Short stable code used as a machine-parsable prefix by front ends.
    pub fn code(&self) -> &'static str {
        match self {
            LpgError::Domain { .. } => "E_DOMAIN",
            LpgError::Index { .. } => "E_INDEX",
            LpgError::QuadratureConvergence { .. } => "E_QUADRATURE",
            LpgError::NonFinite { .. } => "E_NONFINITE",
            LpgError::SingularStep { .. } | LpgError::Singular(_) => "E_SINGULAR",
            LpgError::EigenConvergence { .. } => "E_EIGEN",
            LpgError::ProfileDomain { .. } => "E_PROFILE",
            LpgError::Hypothesis { .. } => "E_HYPOTHESIS",
            LpgError::Config(_) => "E_CONFIG",
            LpgError::NonFiniteSolution { .. } => "E_NONFINITE",
            LpgError::DegenerateFit(_) => "E_FIT",
            LpgError::Containment(_) => "E_CONTAINMENT",
        }
    }
}

pub type Result<T> = std::result::Result<T, LpgError>;
