use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("value overflows f64 (log-magnitude {log_magnitude:.3})")]
    Overflow { log_magnitude: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quotient pole: {0}")]
    Pole(String),

    #[error("no sign change found on [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("pole-dense domain: {poles} poles on a {grid}-point grid")]
    PoleDense { poles: usize, grid: usize },

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error("not enough samples: need {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("window [{start}, {end}] outside sampled range [{min}, {max}]")]
    WindowOutOfRange { start: f64, end: f64, min: f64, max: f64 },

    #[error("band [{lo_uhz}, {hi_uhz}] uHz contains no frequency bins")]
    EmptyBand { lo_uhz: f64, hi_uhz: f64 },

    #[error("sample rate {rate_hz} Hz below 4x the highest mode frequency {max_hz} Hz")]
    Aliasing { rate_hz: f64, max_hz: f64 },

    #[error("spectrum is not mass-orthonormal (deviation {0:.3e})")]
    NonOrthonormal(f64),

    #[error("coupled system is not positive definite (eigenvalue {0:.6e})")]
    NotPositiveDefinite(f64),

    #[error("horizon {horizon} s shorter than one beat period; need at least {required} s")]
    HorizonTooShort { horizon: f64, required: f64 },

    #[error("{0} evaluation is not implemented")]
    Unsupported(&'static str),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Overflow { .. } => "overflow",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Pole(_) => "pole",
            Error::NoRoot { .. } => "no_root",
            Error::PoleDense { .. } => "pole_dense",
            Error::Unreachable(_) => "unreachable",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::WindowOutOfRange { .. } => "window_out_of_range",
            Error::EmptyBand { .. } => "empty_band",
            Error::Aliasing { .. } => "aliasing",
            Error::NonOrthonormal(_) => "non_orthonormal",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::HorizonTooShort { .. } => "horizon_too_short",
            Error::Unsupported(_) => "unsupported",
            Error::Config(_) => "config",
        }
    }

    /// Whether the failure is numerical (root finding, poles, reachability)
    /// as opposed to a malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::Pole(_)
                | Error::NoRoot { .. }
                | Error::PoleDense { .. }
                | Error::Unreachable(_)
                | Error::NonOrthonormal(_)
                | Error::NotPositiveDefinite(_)
        )
    }
}
