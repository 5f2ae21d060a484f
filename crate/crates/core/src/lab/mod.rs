//! Batch experiments behind the `imlab` binary: configuration, the
//! characterization / observability / convergence studies, scenario runs,
//! CSV output and plot scripts.

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;
pub mod scenario;
pub mod tables;

pub use config::LabConfig;

use crate::error::{Error, Result};

/// Run `f` on a dedicated pool of `threads` workers (`None`: rayon's default).
/// Results do not depend on the pool size.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidInput("--parallel must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(pool.install(f))
}
