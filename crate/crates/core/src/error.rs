use thiserror::Error;

/// Everything that can go wrong while validating or evaluating a model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system needs at least 2 levels, got {0}")]
    EmptySystem(usize),

    #[error("all level amplitudes are zero")]
    ZeroAmplitudes,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("bath mode {index} has non-positive frequency {omega}")]
    NonPositiveModeFrequency { index: usize, omega: f64 },

    #[error("discrete bath has no modes")]
    EmptyBath,

    #[error("ohmic bath needs gamma > 0 and cutoff > 0 (got gamma={gamma}, cutoff={cutoff})")]
    InvalidOhmic { gamma: f64, cutoff: f64 },

    #[error("fock occupations have length {got}, bath has {expected} modes")]
    FockLengthMismatch { expected: usize, got: usize },

    #[error("fock initial state requires a discrete bath")]
    FockRequiresDiscrete,

    #[error("negative temperature {0}")]
    NegativeTemperature(f64),

    #[error("invalid level pair ({n}, {m}) for a {levels}-level system")]
    InvalidPair { n: usize, m: usize, levels: usize },

    #[error("operation requires a vacuum or fock bath state, model is thermal")]
    ThermalStateNotFock,

    #[error("<G0^2> vanishes, the fluctuation relation is undefined")]
    ZeroPopulationVariance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds target {target:e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    #[error("truncation insufficient: tail mass {tail_mass:e} >= {limit:e}")]
    TruncationInsufficient { tail_mass: f64, limit: f64 },

    #[error("hilbert dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("brute-force oracle needs a discrete bath")]
    OracleNeedsDiscreteBath,

    #[error("norm drift {drift:e} exceeds unitarity tolerance {tol:e}")]
    UnitarityViolation { drift: f64, tol: f64 },

    #[error("thermal sum not converged within {m_max} quanta per mode")]
    ThermalNonConvergence { m_max: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
