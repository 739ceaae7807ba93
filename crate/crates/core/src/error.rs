use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("coefficients violate Hermitian symmetry at index {index} (mismatch {mismatch:.3e})")]
    NotHermitian { index: usize, mismatch: f64 },

    #[error("weight overflow: sigma*|xi_max| = {product:.3} exceeds cap {cap}")]
    Overflow { product: f64, cap: f64 },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("power must be an odd integer >= 1, got {0}")]
    EvenPower(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undefined ratio: {0}")]
    Undefined(String),

    #[error("too few usable modes for radius fit: {found} (need {needed})")]
    TooFewModes { found: usize, needed: usize },

    #[error("Picard iteration did not converge in {iterations} iterations (last contraction ratio {ratio:.3e})")]
    NoConvergence { iterations: usize, ratio: f64 },

    #[error("energy drift {drift:.3e} at t = {time:.4} exceeds bound {bound:.3e}")]
    Unstable { time: f64, drift: f64, bound: f64 },
}
