//! Structure files and the subcommands of the `embtensor` binary.

pub mod commands;
pub mod format;
pub mod render;

use std::path::Path;

use commands::{run, CliError, CliReport, Command};
use format::parse;

/// Read, parse and run one command; `bound` and `seed` override the file's
/// settings.
pub fn execute(command: Command, path: &Path, bound: Option<usize>, seed: Option<u64>) -> Result<CliReport, CliError> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Input(format!("{shown}: not UTF-8")))?;
    let file = parse(&text).map_err(|source| CliError::Parse { path: shown, source })?;
    let mut settings = file.settings.clone();
    if let Some(b) = bound {
        if b == 0 {
            return Err(CliError::Input("--bound must be positive".into()));
        }
        settings.bound = b;
    }
    if let Some(s) = seed {
        settings.seed = s;
    }
    run(command, &file, &settings, &render::digest(&bytes))
}
