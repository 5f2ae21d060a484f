use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A Hessian block (or a matrix built from them) is numerically singular.
    #[error("degenerate {what}: condition number {cond:.3e}")]
    Degenerate { what: &'static str, cond: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("simulation diverged at t = {t} s (non-finite state)")]
    NonFinite { t: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("ill-posed saliency fit: {0}")]
    IllPosedFit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{}", format_config_error(.line, .message))]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_config_error(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("line {l}: {message}"),
        None => message.to_string(),
    }
}

impl Error {
    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidInput(_) | Error::Resolution(_))
    }
}
