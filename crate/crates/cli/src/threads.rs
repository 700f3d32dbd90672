//! Worker-count selection from the `GEOPHASE_THREADS` environment variable.

use crate::error::CliError;

pub const THREADS_VAR: &str = "GEOPHASE_THREADS";

/// Parsed worker count; `None` means all available cores.
pub fn requested_threads(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::Config(format!("{THREADS_VAR}: expected a positive integer, got {v:?}"))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

/// Sizes the global worker pool. Without the `parallel` feature every
/// computation is sequential and the variable is only validated.
pub fn configure_from_env() -> Result<Option<usize>, CliError> {
    let requested = requested_threads(std::env::var(THREADS_VAR).ok().as_deref())?;
    #[cfg(feature = "parallel")]
    if let Some(n) = requested {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("{THREADS_VAR}: {e}")))?;
    }
    Ok(requested)
}
