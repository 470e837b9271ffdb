use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("matrix is singular (det = {det:e})")]
    Singular { det: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("QoS threshold unreachable: radicand {radicand:e} m^2 is not positive")]
    InfeasibleQos { radicand: f64 },

    #[error("empty feasible interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("UAV displacement {displacement} m exceeds limit {limit} m")]
    VelocityBound { displacement: f64, limit: f64 },

    #[error("stationary point not bracketed: g'({x_l}) = {d_lo:e}, g'({x_u}) = {d_hi:e}")]
    Bracket {
        x_l: f64,
        x_u: f64,
        d_lo: f64,
        d_hi: f64,
    },

    #[error("slot {slot}: {source}")]
    AtSlot {
        slot: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at_slot(self, slot: usize) -> Self {
        Error::AtSlot {
            slot,
            source: Box::new(self),
        }
    }

    /// Innermost error, unwrapping slot context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSlot { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
