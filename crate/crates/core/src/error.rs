use thiserror::Error;

/// Errors produced by the path-loss models and the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no specular reflection point: distance {distance_m:.3} m is not inside the horizon ({horizon_m:.3} m)")]
    NoSpecularPoint { distance_m: f64, horizon_m: f64 },

    #[error("root finding failed to converge: {0}")]
    NumericalFailure(String),

    #[error("antenna height {height_m} m exceeds the {ceiling_m:.1} m validity ceiling of the Bullington method")]
    AntennaTooHigh { height_m: f64, ceiling_m: f64 },

    #[error("frequency {0} Hz is outside the 30 MHz - 50 GHz range of the P.2001 model")]
    FrequencyOutOfRange(f64),

    #[error("time percentage {0}% is not supported; only the median (50%) path is implemented")]
    UnsupportedTimePercentage(f64),

    #[error("log-distance fit is degenerate: all sample distances are equal")]
    DegenerateFit,

    #[error("length mismatch: {predicted} predictions vs {measured} measurements")]
    LengthMismatch { predicted: usize, measured: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("link budget fails even at {0} m")]
    NoCoverage(f64),

    #[error("link budget still holds at the {cap_m} m search cap")]
    Unbounded { cap_m: f64 },

    #[error("measurement log is empty")]
    EmptyLog,

    #[error("unexpected log header: {0}")]
    HeaderMismatch(String),

    #[error("record has no calibrated RSSI")]
    MissingCalibration,

    #[error("record was already calibrated")]
    AlreadyCalibrated,

    #[error("no valid samples remain after filtering")]
    NoValidSamples,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
