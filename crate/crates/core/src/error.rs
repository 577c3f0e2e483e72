use thiserror::Error;

pub type Result<T, E = FtsError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FtsError {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular local linear fit at t = {t}")]
    SingularFit { t: f64 },

    #[error("bandwidth {h} too small: window at t = {t} holds fewer than 2 weighted points")]
    BandwidthTooSmall { h: f64, t: f64 },

    #[error("empty kernel window at t = {t}")]
    EmptyWindow { t: f64 },

    #[error("Jackknife fit failed at bandwidth {h}: {source}")]
    JackknifeFit {
        h: f64,
        #[source]
        source: Box<FtsError>,
    },

    #[error("evaluation times are not equidistant (step {step} vs {expected} at index {index})")]
    NonEquidistant {
        index: usize,
        step: f64,
        expected: f64,
    },

    #[error("every candidate bandwidth failed cross-validation")]
    AllBandwidthsInvalid,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("input too short: {0}")]
    InputTooShort(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl FtsError {
    /// True for failures of the numerical fit itself, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            FtsError::SingularFit { .. }
                | FtsError::BandwidthTooSmall { .. }
                | FtsError::EmptyWindow { .. }
                | FtsError::JackknifeFit { .. }
                | FtsError::AllBandwidthsInvalid
        )
    }
}
