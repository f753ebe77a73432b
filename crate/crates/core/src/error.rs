use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("halfspace normal has zero norm")]
    ZeroNormal,

    #[error("basis is not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("constraint count {found} exceeds the enumeration cap of {cap}")]
    CapExceeded { cap: usize, found: usize },

    #[error("point is not in the set (violation {violation:.3e})")]
    PointNotInSet { violation: f64 },

    #[error(
        "subspace is not contained in the common kernel of the normals (deviation {deviation:.3e})"
    )]
    KNotInKernel { deviation: f64 },

    #[error("subspace must be linear (base at the origin)")]
    NotLinear,

    #[error("relaxation parameter {0} outside [0, 2]")]
    LambdaOutOfRange(f64),

    #[error("epsilon at index {index} is {value}, outside [0, 1)")]
    EpsOutOfRange { index: usize, value: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid selection policy: {0}")]
    InvalidPolicy(String),

    #[error("empty collection")]
    EmptyCollection,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("face projection identity violated (gap {gap:.3e})")]
    FaceIdentityViolated { gap: f64 },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
