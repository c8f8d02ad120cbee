use thiserror::Error;

/// Errors raised by the solver, the equilibrium tools and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not admissible: rho = {rho}, p = {p}")]
    NotAdmissible { rho: f64, p: f64 },

    #[error("no equilibrium density exists for phi = {phi} (residual at sonic point {residual})")]
    NoEquilibrium { phi: f64, residual: f64 },

    #[error("iteration did not converge after {iterations} steps (last residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("time step failed: {0}")]
    StepFailure(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
