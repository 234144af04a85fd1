//! File formats, configuration and subcommands of the `manifold` tool.
//!
//! All numerics live in `manifold-core`; this crate reads and writes files,
//! resolves settings (flag, then `--config` file, then default), runs
//! experiment grids in parallel and emits deterministic CSV.

pub mod cli;
pub mod commands;
pub mod config;
pub mod formats;
pub mod results;

use anyhow::{bail, Context, Result};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "MANIFOLD_THREADS";

/// Sizes the global rayon pool from `MANIFOLD_THREADS` (unset or 0 keeps the
/// default of one thread per CPU).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(n) => n,
        Err(_) => bail!("{THREADS_ENV} must be a non-negative integer, got `{raw}`"),
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}
