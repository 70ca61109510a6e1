//! Optional TOML defaults. Any flag given on the command line wins.
//!
//! ```toml
//! source = "maxent"
//! iterations = 3
//! cutoff = 1
//! patterns = "patterns.txt"
//! prior_variance = 1.0
//! folds = 10
//! seed = 7
//! mode = "treebank"
//! beam = 64
//! ```

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub source: Option<String>,
    pub iterations: Option<usize>,
    pub cutoff: Option<usize>,
    pub patterns: Option<PathBuf>,
    pub prior_variance: Option<f64>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub beam: Option<usize>,
    pub tagset: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub open_vocab: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // relative paths in the file are taken from the file's directory
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.patterns, &mut cfg.tagset, &mut cfg.labels].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}
