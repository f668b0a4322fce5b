use rayon::ThreadPoolBuilder;

use crate::error::{Error, Result};

/// Runs `job` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is `None`. Every parallel routine in this crate reduces in a
/// fixed order, so results do not depend on the worker count.
pub fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(Error::Workers("worker count must be positive".into())),
        Some(w) => {
            let pool = ThreadPoolBuilder::new().num_threads(w).build().map_err(|e| Error::Workers(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}
