use thiserror::Error;

/// Errors produced anywhere in the construction and verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate triangle: the three points are collinear")]
    DegenerateTriangle,
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,
    #[error("circle radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("need at least 3 sites, got {0}")]
    TooFewSites(usize),
    #[error("duplicate sites {first} and {second}")]
    DuplicateSites { first: usize, second: usize },
    #[error("all sites are collinear")]
    AllCollinear,
    #[error("triangulation too sharp: sharpest angle {alpha:e} rad is below the {threshold:e} rad floor")]
    TooSharp { alpha: f64, threshold: f64 },
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("invalid convex polygon: {0}")]
    InvalidPolygon(String),

    #[error("parameter `{name}` = {value} is out of range ({expected})")]
    Parameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("chord does not cross the portal edge")]
    NoCrossing,

    #[error("graph is disconnected: site {site} is unreachable from site {from}")]
    Disconnected { from: usize, site: usize },
    #[error("tour oracle supports 3..=15 points, got {0}")]
    TourSize(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid spanner document: {0}")]
    Document(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// `1` is reserved for verification failures, `2` for bad input and
    /// `3` for out-of-range parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. } | Error::TourSize(_) => 3,
            Error::Disconnected { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn param(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Parameter {
            name,
            value,
            expected,
        }
    }
}
