pub mod correlate;
pub mod fit;
pub mod report;
pub mod simulate;
pub mod spectrum;

use crate::config::Config;

/// Settings shared by every command.
pub struct Context {
    pub config: Config,
    pub seed: Option<u64>,
    /// Write tags as CSV instead of the binary format.
    pub csv: bool,
}

/// Prints and returns per-entry error lines.
pub(crate) fn entry_error(label: &str, msg: &str) -> String {
    let line = format!("error: entry {label}: {msg}");
    eprintln!("{line}");
    line
}
