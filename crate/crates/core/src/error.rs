use thiserror::Error;

/// Errors surfaced by the library layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("digit {digit} out of range for local dimension {d}")]
    DigitOutOfRange { digit: u8, d: usize },
    #[error("expected {expected} digits, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("dimension {dim} exceeds size cap {cap} (override with SYMSECTOR_SIZE_CAP)")]
    SizeCap { dim: u128, cap: u128 },
    #[error("invalid permutation of sites")]
    InvalidPermutation,
    #[error("antisymmetric sector does not exist for n={n} > d={d}")]
    SectorNonexistent { n: usize, d: usize },
    #[error("eigensolver failed to converge")]
    EigenFailure,
    #[error("Renyi order must be nonnegative, got {0}")]
    NegativeRenyiOrder(f64),
    #[error("rescaled entanglement is undefined at q = 1")]
    UndefinedRescaling,
    #[error("cannot sample from an empty basis")]
    EmptyBasis,
    #[error("formula is only valid for prime n, got {0}")]
    RequiresPrimeN(usize),
    #[error("empty sample set")]
    EmptySamples,
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("bin width must be positive")]
    NonPositiveBinWidth,
    #[error("not enough populated bins for the fit: need {need}, got {got}")]
    InsufficientBins { need: usize, got: usize },
    #[error("curves do not bracket an intersection over the search interval")]
    NoIntersection,
    #[error("bound regime violated: {0}")]
    RegimeViolation(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
