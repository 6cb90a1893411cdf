//! Run configuration shared by every `tcoh` subcommand.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cohomology::DEFAULT_DIVISOR_FLOOR;
use crate::diophantine::DEFAULT_RESONANCE_THRESHOLD;
use crate::error::{Error, Result};
use crate::parabolic::DEFAULT_QUADRATURE_TOLERANCE;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "COHOMO_SEED";

/// Names accepted in the `tolerances` table.
pub const TOLERANCE_NAMES: [&str; 3] = ["divisor_floor", "resonance_threshold", "quadrature"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_plot_data: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::domain(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in &self.tolerances {
            if !TOLERANCE_NAMES.contains(&name.as_str()) {
                return Err(Error::domain(format!(
                    "unknown tolerance {name:?}; known: {}",
                    TOLERANCE_NAMES.join(", ")
                )));
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(Error::domain(format!("tolerance {name} must be positive")));
            }
        }
        Ok(())
    }

    /// Seed precedence: command line, then `COHOMO_SEED`, then the config
    /// file, then [`DEFAULT_SEED`].
    pub fn resolve_seed(&self, flag: Option<u64>, env: Option<&str>) -> Result<u64> {
        if let Some(seed) = flag {
            return Ok(seed);
        }
        if let Some(text) = env {
            return text
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("{SEED_ENV}={text:?} is not a 64-bit unsigned integer")));
        }
        Ok(self.seed.unwrap_or(DEFAULT_SEED))
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        if let Some(&v) = self.tolerances.get(name) {
            return v;
        }
        match name {
            "divisor_floor" => DEFAULT_DIVISOR_FLOOR,
            "resonance_threshold" => DEFAULT_RESONANCE_THRESHOLD,
            "quadrature" => DEFAULT_QUADRATURE_TOLERANCE,
            _ => panic!("unknown tolerance {name}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        let c = RunConfig {
            seed: Some(7),
            ..Default::default()
        };
        assert_eq!(c.resolve_seed(Some(1), Some("2")).unwrap(), 1);
        assert_eq!(c.resolve_seed(None, Some("2")).unwrap(), 2);
        assert_eq!(c.resolve_seed(None, None).unwrap(), 7);
        assert_eq!(RunConfig::default().resolve_seed(None, None).unwrap(), DEFAULT_SEED);
        assert!(c.resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn tolerances() {
        let c: RunConfig = serde_json::from_str(r#"{"tolerances":{"divisor_floor":1e-8}}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.tolerance("divisor_floor"), 1e-8);
        assert_eq!(c.tolerance("quadrature"), DEFAULT_QUADRATURE_TOLERANCE);
        let bad: RunConfig = serde_json::from_str(r#"{"tolerances":{"nope":1.0}}"#).unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed":1}"#).is_err());
    }
}
