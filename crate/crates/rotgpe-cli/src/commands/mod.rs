//! One module per subcommand. Each loads the run configuration, delegates the
//! numerics to `rotgpe-core`, writes its products and a manifest into the run
//! directory, and prints a one-line summary on stdout.

pub mod decay;
pub mod evolve;
pub mod minimize;
pub mod stability;
pub mod trial_sweep;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Write a text product, creating parent directories on the way.
fn write_text(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(CliError::io(parent))?;
        }
    }
    fs::write(path, contents).map_err(CliError::io(path))
}

/// Resolve a product path: an explicit flag wins, otherwise the default file
/// name lands in the run's output directory.
fn product_path(out_dir: &Path, explicit: Option<&PathBuf>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.clone(),
        None => out_dir.join(default_name),
    }
}
