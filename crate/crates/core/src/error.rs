use thiserror::Error;

/// Errors produced by polytope construction, metric evaluation and the flattening atlas.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex set has affine rank {rank}, expected {dim}")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("declared halfspaces do not match the hull of the vertices")]
    HalfspaceMismatch,
    #[error("point is not strictly interior (min facet slack {slack:e})")]
    PointNotInterior { slack: f64 },
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("points are not ordered a, p, q, b along their line")]
    BadOrdering,
    #[error("projective image lies at infinity")]
    PointAtInfinity,
    #[error("projective map is singular")]
    SingularMap,
    #[error("not a point of the open simplex: {0}")]
    NotSimplexPoint(String),
    #[error("coordinates do not sum to zero (sum {0:e})")]
    NotInW(f64),
    #[error("log-coordinates too large to invert (spread {0:e})")]
    Overflow(f64),
    #[error("flag {0} yields affinely dependent barycenters")]
    DegenerateCell(usize),
    #[error("chart for cell {0} is numerically singular")]
    SingularChart(usize),
    #[error("no cell contains the point")]
    LocationFailure,
    #[error("no cell cone contains the point")]
    ConeLocationFailure,
    #[error("rejection sampling exhausted (acceptance rate {0:e})")]
    SamplingExhausted(f64),
    #[error("nested triple violates the lemma hypotheses: {0}")]
    HypothesisViolated(String),
    #[error("invalid polytope description: {0}")]
    Format(String),
}

impl Error {
    /// Numeric failures map to CLI exit code 2, everything else is a validation error.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::DegenerateCell(_)
                | Error::SingularChart(_)
                | Error::LocationFailure
                | Error::ConeLocationFailure
                | Error::SamplingExhausted(_)
                | Error::PointAtInfinity
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
