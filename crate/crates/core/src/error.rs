use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("unsupported dimension {0} (expected 2..=6)")]
    UnsupportedDimension(usize),

    #[error("malformed body: {0}")]
    MalformedBody(String),

    #[error("singular affine map (|det L| = {0:e})")]
    SingularMap(f64),

    #[error("point not strictly interior: {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Monte Carlo accuracy not reached: {value} ± {std_error} (requested {requested})")]
    Accuracy {
        value: f64,
        std_error: f64,
        requested: f64,
    },

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
        last: Vec<f64>,
    },

    #[error("empty Santaló region: t = {t} is below the minimal volume product {minimum}")]
    EmptyRegion { t: f64, minimum: f64 },

    #[error("body is not smooth: {0}")]
    NotSmooth(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl GeomError {
    /// True for errors caused by malformed input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            GeomError::UnsupportedDimension(_)
                | GeomError::MalformedBody(_)
                | GeomError::SingularMap(_)
        )
    }
}
