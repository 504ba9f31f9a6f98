use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("vectors are not orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension must be odd, got {0}")]
    EvenDimension(usize),

    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { min: usize, got: usize },

    #[error("dimension must be at most {max}, got {got}")]
    DimensionTooLarge { max: usize, got: usize },

    #[error("fiducial must not be a position or momentum state")]
    InvalidFiducial,

    #[error("fiducial vector has length {got}, expected {expected}")]
    FiducialLength { expected: usize, got: usize },

    #[error("coherent state indices coincide: {0:?}")]
    CoincidentIndices((usize, usize)),

    #[error("coherent states are parallel (|overlap| = 1), join is degenerate")]
    ParallelStates,

    #[error("SU(2) setting is not normalized: |a|^2 + |b|^2 = {0}")]
    UnnormalizedSetting(f64),

    #[error("meet of the subspaces is not the zero subspace (dimension {0})")]
    MeetNotZero(usize),

    #[error("empty subspace family")]
    EmptyFamily,

    #[error("frame size must be in 1..={max}, got {got}")]
    FrameSize { max: usize, got: usize },

    #[error("subset {subset:#b} lies outside a frame of size {size}")]
    SubsetOutOfFrame { subset: u32, size: usize },

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("total conflict: combined masses are fully contradictory")]
    TotalConflict,
}

pub type Result<T> = std::result::Result<T, Error>;
