use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular linear-fractional map (ad - bc vanishes)")]
    SingularMap,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the identity map fixes every point")]
    IdentityMap,
    #[error("map is not an automorphism of the disk")]
    NotAutomorphism,
    #[error("map is not a self-map of the disk")]
    NotSelfMap,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("point is not within half a grid step of the unit circle grid")]
    OffGrid,
    #[error("point too close to curve: distance {distance:.3e}, guard requires {required:.3e}")]
    TooCloseToCurve { distance: f64, required: f64 },
    #[error("map has a pole within {distance:.3e} of the curve")]
    PoleOnCurve { distance: f64 },
    #[error("zero sample at index {0}")]
    ZeroSample(usize),
    #[error("symbol carries {available} Fourier coefficients per side, {needed} needed")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("pole at modulus {modulus:.6} is within the required margin of the unit circle")]
    PoleTooClose { modulus: f64 },
    #[error("operand deviates from Hermitian by {deviation:.3e}")]
    NonHermitian { deviation: f64 },
    #[error("matrix of size {0} exceeds the supported bound")]
    TooLarge(usize),
    #[error("orbit points are linearly dependent over the reals")]
    DependentOrbitPoints,
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
    #[error("irreducibility of the Toeplitz operator is not attested")]
    IrreducibilityNotAttested,
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
