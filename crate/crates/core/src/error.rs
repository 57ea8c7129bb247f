use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tolerance {tol:e} unachievable: best certified bound {achieved:e} within budget")]
    TolUnachievable { tol: f64, achieved: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("construction failure at depth {depth}: reaches {pair:?} overlap")]
    ConstructionFailure { depth: u32, pair: (usize, usize) },

    #[error("direction mismatch: wanted direction {index} is {deviation:e} rad from every available direction (spacing {spacing:e})")]
    DirectionMismatch { index: usize, deviation: f64, spacing: f64 },

    #[error("point is not on the boundary: |F| = {0:e}")]
    NotOnBoundary(f64),

    #[error("degenerate gradient: |grad F| = {0:e}")]
    DegenerateGradient(f64),

    #[error("slice is not locally a curve: in-slice gradient {0:e}")]
    NotACurve(f64),

    #[error("zero curvature along the slice: {0}")]
    ZeroCurvature(String),

    #[error("zero vector")]
    ZeroVector,

    #[error("unbounded value: x lies on a critical line (t-interval endpoint at 0)")]
    Unbounded,

    #[error("covering check failed: rectangle {0} leaves the covering square")]
    CoveringFailure(usize),

    #[error("{family} family not disjoint: pair {pair:?}")]
    NotDisjoint { family: &'static str, pair: (usize, usize) },

    #[error("strip intersection is empty")]
    EmptyStripIntersection,

    #[error("frequency grid truncation: tail mass {0:e} exceeds budget")]
    Truncation(f64),

    #[error("homogeneity violated: reciprocals sum to {0}")]
    Homogeneity(String),

    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),

    #[error("unsupported figure kind {kind} for {input}")]
    UnsupportedFigure { kind: &'static str, input: &'static str },

    #[error("config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
