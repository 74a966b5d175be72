use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (only 1 and 2 are implemented)")]
    UnsupportedDimension(usize),
    #[error("grid resolution {0} must be a power of two and at least 16")]
    BadResolution(usize),
    #[error("value count {got} does not match grid point count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("operation requires a {expected}-dimensional field, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectrum violates Hermitian symmetry by {violation:.3e} (tolerance {tolerance:.3e})")]
    MalformedSpectrum { violation: f64, tolerance: f64 },
    #[error("time parameter must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("time parameter must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("frequency scale of the zero field is undefined")]
    ZeroField,
    #[error("constant c must lie in (0,1), got {0}")]
    BadConstant(f64),
    #[error("nodal set of an identically zero field is degenerate")]
    DegenerateNodal,
    #[error("radius {eps} is below grid resolution; need N >= {required_n}")]
    ResolutionTooCoarse { eps: f64, required_n: usize },
    #[error("bound is undefined for lambda <= 1, got {0}")]
    BoundUndefined(f64),
    #[error("norms must be positive, got l1={l1}, linf={linf}")]
    NonPositiveNorm { l1: f64, linf: f64 },
    #[error("eigenvalue list contains a degenerate entry (lambda = 0)")]
    DegenerateEigenvalue,
    #[error("coefficient/eigenvalue lists are empty or of unequal length")]
    BadCoefficientLists,
    #[error("heat decay requires lambda > 0")]
    NoDecay,
    #[error("cube side {delta} must be a multiple of the grid spacing that divides 1")]
    PartitionMisaligned { delta: f64 },
    #[error("grid masks overlap; Davies-Gaffney check requires disjoint sets")]
    MaskOverlap,
    #[error("grid mask is empty")]
    EmptyMask,
    #[error("time {t} is below band-limit validity on this grid; need N >= {required_n}")]
    BandLimitViolation { t: f64, required_n: usize },
    #[error("epsilon range for the volume-expansion check is empty")]
    EmptyEpsilonRange,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
