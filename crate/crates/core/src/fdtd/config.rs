//! TOML run files:
//!
//! ```toml
//! experiment = "surface-launch"
//! scheme = "trapezoidal"   # optional
//! workers = 4              # optional; otherwise SEWLINK_WORKERS or all cores
//!
//! [params]
//! cells_per_wavelength = 60.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::experiments::{registry, Report, RunOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    #[serde(default)]
    pub scheme: Option<String>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub params: toml::Table,
}

impl RunConfig {
    pub fn new(experiment: &str) -> Self {
        Self { experiment: experiment.to_string(), scheme: None, workers: None, params: toml::Table::new() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&crate::io::read_config(path)?)
    }

    /// Overrides one parameter from a `key=value` string; the value is parsed
    /// as a TOML value, falling back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::invalid("set", format!("expected key=value, got '{assignment}'")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::invalid("set", "empty key"));
        }
        let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
        self.params.insert(key.to_string(), value);
        Ok(())
    }

    pub fn options(&self) -> RunOptions {
        let mut o = RunOptions::default();
        if let Some(s) = &self.scheme {
            o.scheme = s.clone();
        }
        if let Some(w) = self.workers {
            o.workers = w.max(1);
        }
        o
    }

    pub fn run(&self) -> Result<Report> {
        registry().create(&self.experiment)?.run(&self.params, &self.options())
    }
}
