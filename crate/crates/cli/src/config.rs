//! Defaults read from `config.toml` in the config directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "NONRES_CONFIG_DIR";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// kernel-check seed
    pub seed: Option<u64>,
    /// zero archive used when `--archive` is absent
    pub archive: Option<PathBuf>,
    /// scan step on the critical line
    pub scan_step: Option<f64>,
    /// default archive height for `zeros` and `audit --mode theorem12`
    pub height: Option<f64>,
    /// cap on the sieve size
    pub table_limit: Option<u64>,
}

impl FileConfig {
    /// Missing directory or file means built-in defaults.
    pub fn load(dir: Option<&Path>) -> Result<Self, CliError> {
        let Some(dir) = dir else { return Ok(Self::default()) };
        let path = dir.join(CONFIG_FILE);
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("--config-dir: cannot read {}: {e}", path.display())))?;
        let cfg: Self =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("--config-dir: {}: {e}", path.display())))?;
        // relative archive paths are taken from the config directory
        Ok(Self { archive: cfg.archive.map(|a| if a.is_relative() { dir.join(a) } else { a }), ..cfg })
    }
}
