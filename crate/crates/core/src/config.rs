//! Run configuration files.
//!
//! ```toml
//! [state]
//! family = "bennett"
//! params = { eps1 = 1.0, eps2 = 4.0, eps3 = 4.0 }
//!
//! [scramble]
//! d = 0.6
//! placement = "both"   # a | b | both
//! mode = "conj"        # conj | raw
//! hermitize_raw = true
//!
//! [time]
//! tmax = 10.0
//! samples = 512
//!
//! [param]
//! preset = "b"         # a | b | c (Jurkowski) or alpha
//! start = 0.5
//! stop = 5.0
//! step = 0.1
//! at_t = 0.0
//!
//! [output]
//! out = "bennett.csv"
//! svg = "bennett.svg"
//! title = "Bennett state, D = 0.6"
//! diagnostics = false
//! threads = 0          # 0 = all cores, 1 = serial
//! ```
//!
//! Every key is optional. Command-line flags override file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub scramble: ScrambleSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub param: ParamSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub family: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrambleSection {
    pub d: Option<f64>,
    pub placement: Option<String>,
    pub mode: Option<String>,
    pub hermitize_raw: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSection {
    pub preset: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub at_t: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub title: Option<String>,
    pub diagnostics: Option<bool>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }
}
