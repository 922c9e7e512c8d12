use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A hypothesis on (n, alpha, s, gamma) does not hold.
    #[error("hypothesis `{hypothesis}` violated: {detail}")]
    InvalidParams {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Rescaling or translating would push mass out of the box.
    #[error("support overflow: only {representable:.6} of the squared mass stays representable")]
    SupportOverflow { representable: f64 },

    #[error("zero denominator: Hardy-Sobolev term is {0:e}")]
    ZeroDenominator(f64),

    #[error("fields live on incompatible grids")]
    IncompatibleGrid,

    #[error("degenerate initial field: {0}")]
    DegenerateInit(String),

    /// Mountain-pass geometry failed: the path maximum is below the ring level.
    #[error("path collapse: path maximum {max_energy:e} below ring level {rho:e}")]
    PathCollapse { max_energy: f64, rho: f64 },

    #[error("malformed field container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
