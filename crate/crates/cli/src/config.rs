//! Optional TOML config file (`--config <path>`).
//!
//! ```toml
//! seed = 7
//! tolerance = 1e-10
//! format = "json"            # json | csv | text
//!
//! [criteria]
//! restarts = 64              # optimizer restarts for --optimize
//! cauchy4_choice = "op.toml" # file written by `criteria cauchy4-search`
//! cauchy_schwarz_choice = "cs.toml"  # keys a, alpha, b, beta as [re, im] lists
//!
//! [collective]
//! depth_restarts = 32
//! ```
//!
//! Command-line flags win over file values. Relative paths are resolved
//! against the config file's directory.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub format: Option<String>,
    #[serde(default)]
    pub criteria: CriteriaConfig,
    #[serde(default)]
    pub collective: CollectiveConfig,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    pub restarts: Option<usize>,
    pub cauchy4_choice: Option<PathBuf>,
    pub cauchy_schwarz_choice: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectiveConfig {
    pub depth_restarts: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.criteria.cauchy4_choice, &mut cfg.criteria.cauchy_schwarz_choice]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}
