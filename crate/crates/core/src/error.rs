use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    NegativeWeight { u: usize, v: usize, weight: f64 },

    #[error("self loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} has non-positive or non-finite measure {value}")]
    NonPositiveMeasure { vertex: usize, value: f64 },

    #[error("vertex {vertex} has negative or non-finite killing term {value}")]
    NegativeKilling { vertex: usize, value: f64 },

    #[error("edge ({u}, {v}) given twice with weights {first} and {second}")]
    DuplicateEdgeConflict {
        u: usize,
        v: usize,
        first: f64,
        second: f64,
    },

    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),

    #[error("invalid vertex label {0:?}")]
    InvalidLabel(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("vertex count {count} exceeds the cap {cap}")]
    SizeOverflow { count: u128, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("function has {got} values but the section has {expected} vertices")]
    SectionMismatch { expected: usize, got: usize },

    #[error("vertices must be distinct")]
    SameVertex,

    #[error("vertices {0} and {1} lie in different components")]
    DisconnectedPair(usize, usize),

    #[error("vertex {0} is on the Dirichlet mask but an interior vertex is required")]
    NotInterior(usize),

    #[error("section has no interior vertices")]
    EmptyInterior,

    #[error("no boundary value supplied for masked vertex {0}")]
    MissingBoundaryValue(usize),

    #[error("interior component containing vertex {0} touches no mask and has no killing term")]
    UngroundedComponent(usize),

    #[error("function is not harmonic: interior residual {residual:e} at vertex {vertex}")]
    NotHarmonic { vertex: usize, residual: f64 },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("operator is singular on the solve subspace")]
    SingularOperator,

    #[error("dimension {dim} exceeds the dense eigensolver cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("random walk oracle requires c = 0, vertex {0} has killing")]
    KillingUnsupported(usize),

    #[error("random walk oracle requires a non-empty Dirichlet mask")]
    UnmaskedSection,

    #[error("nesting violated between levels: {0}")]
    NestingViolation(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeWeight { .. } => "NegativeWeight",
            Error::SelfLoop(_) => "SelfLoop",
            Error::NonPositiveMeasure { .. } => "NonPositiveMeasure",
            Error::NegativeKilling { .. } => "NegativeKilling",
            Error::DuplicateEdgeConflict { .. } => "DuplicateEdgeConflict",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::InvalidLabel(_) => "InvalidLabel",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::SizeOverflow { .. } => "SizeOverflow",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Syntax { .. } => "SyntaxError",
            Error::SectionMismatch { .. } => "SectionMismatch",
            Error::SameVertex => "SameVertex",
            Error::DisconnectedPair(..) => "DisconnectedPair",
            Error::NotInterior(_) => "NotInterior",
            Error::EmptyInterior => "EmptyInterior",
            Error::MissingBoundaryValue(_) => "MissingBoundaryValue",
            Error::UngroundedComponent(_) => "UngroundedComponent",
            Error::NotHarmonic { .. } => "NotHarmonic",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularOperator => "SingularOperator",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::NegativeTime(_) => "NegativeTime",
            Error::KillingUnsupported(_) => "KillingUnsupported",
            Error::UnmaskedSection => "UnmaskedSection",
            Error::NestingViolation(_) => "NestingViolation",
        }
    }
}
