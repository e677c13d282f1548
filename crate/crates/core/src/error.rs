use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("displacement {x} m is not smaller than the cavity length {length} m")]
    DisplacementOutOfRange { x: f64, length: f64 },

    #[error("radiation-pressure occupation diverges at zero detuning")]
    DegenerateDetuning,

    #[error(
        "mechanical instability: stability margin {margin} is not positive \
         (onset of mirror instability, ∇F/(mω_m²) must stay below 1)"
    )]
    Instability { margin: f64 },

    #[error("heating regime: photothermal force gradient {grad_f} N/m is not positive")]
    HeatingRegime { grad_f: f64 },

    #[error("frequency grid too coarse: {reason}")]
    GridTooCoarse { reason: String },

    #[error("negative occupancy {n} from spectral integration")]
    NegativeOccupancy { n: f64 },

    #[error("invalid simulation config: {reason}")]
    InvalidSimConfig { reason: String },

    #[error("instability detected at t = {time:e} s (x = {x:e} m, |x| exceeds {threshold:e} m)")]
    InstabilityDetected { time: f64, x: f64, threshold: f64 },

    #[error("non-finite state at t = {time} s")]
    NanDetected { time: f64 },

    #[error(
        "trajectory is not stationary: half-record occupations {first} and {second} \
         differ by more than 3σ ({sigma})"
    )]
    Nonstationary { first: f64, second: f64, sigma: f64 },

    #[error("not enough samples: {reason}")]
    InsufficientSamples { reason: String },

    #[error("too few Welch segments: {segments} (need at least {min})")]
    TooFewSegments { segments: usize, min: usize },

    #[error("detuning does not cool: 2Q_cΔ̃ − Δ̃² − 1/4 = {denominator} is not positive")]
    HeatingDetuning { denominator: f64 },

    #[error("no feasible point: every start violates the cooling-regime constraints")]
    NoFeasiblePoint,

    #[error("fit diverged after {iterations} iterations")]
    FitDiverged { iterations: usize },

    #[error("underdetermined fit: {free} free parameters for {rows} data rows")]
    Underdetermined { free: usize, rows: usize },

    #[error("invalid dataset (row {row}): {reason}")]
    InvalidDataset { row: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
