use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hopping amplitude xi must be finite and non-zero, got {0}")]
    InvalidHopping(f64),
    #[error("parameter `{name}` is not finite: {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("missing required parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("wavenumber k = {0} is outside [0, pi]")]
    WavenumberOutOfRange(f64),
    #[error("incident channel {channel} is closed at E = {energy}: band is [{lo}, {hi}]")]
    IncidentChannelClosed {
        channel: &'static str,
        energy: f64,
        lo: f64,
        hi: f64,
    },
    #[error("sector {0} is not a single-channel sector")]
    NotSingleChannel(&'static str),
    #[error("no transmission dip bracketed in [{lo}, {hi}]")]
    NoDip { lo: f64, hi: f64 },
    #[error("lattice system is singular (band-edge energy?)")]
    SingularSystem,
    #[error("lattice solve residual {0:e} exceeds tolerance")]
    IllConditioned(f64),
    #[error("zero group velocity at the band edge, incident flux vanishes")]
    ZeroGroupVelocity,
    #[error("invalid lattice window: {0}")]
    InvalidWindow(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
