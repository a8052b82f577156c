use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. nonpositive volume).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a pole of `co_λ`.
    #[error("pole: co_lambda is singular at t = {0}")]
    Pole(f64),

    #[error("configuration error: {0}")]
    Config(String),

    /// The discrete solution left the class of positive radial graphs.
    #[error("singularity at t = {t}: {reason}")]
    Singularity { t: f64, reason: String },

    /// A sphere evolving by mean curvature flow reached its extinction time.
    #[error("extinction: t = {t} is not before the extinction time {t_star}")]
    Extinction { t: f64, t_star: f64 },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Unsupported(_) | Error::Format(_) => 1,
            Error::Pole(_)
            | Error::Singularity { .. }
            | Error::Extinction { .. }
            | Error::Divergence(_) => 2,
            Error::Io(_) => 3,
        }
    }
}
