//! Tolerances and sampling defaults, read from a flat TOML file.

use serde::{Deserialize, Serialize};

use crate::boundary::{DEFAULT_BOUND, DEFAULT_NODE_CAP};
use crate::error::{Error, Result};
use crate::ifs::DEFAULT_BURN_IN;
use crate::nielsen::DEFAULT_DIM_TOLERANCE;
use crate::spectral::DEFAULT_POWER_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub hull_eps: f64,
    pub power_tol: f64,
    pub dim_tolerance: f64,
    pub bound: i64,
    pub node_cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub witness_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            hull_eps: 1e-9,
            power_tol: DEFAULT_POWER_TOL,
            dim_tolerance: DEFAULT_DIM_TOLERANCE,
            bound: DEFAULT_BOUND,
            node_cap: DEFAULT_NODE_CAP,
            samples: 10_000,
            seed: 1,
            burn_in: DEFAULT_BURN_IN,
            witness_tol: 1e-3,
        }
    }
}

impl Config {
    /// Overrides the defaults with the flat `key = value` assignments in `text`.
    pub fn parse(text: &str) -> Result<Config> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Syntax(e.message().to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("hull_eps", self.hull_eps),
            ("power_tol", self.power_tol),
            ("dim_tolerance", self.dim_tolerance),
            ("witness_tol", self.witness_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Syntax(format!("'{key}' must be positive")));
            }
        }
        if !(0..=64).contains(&self.bound) {
            return Err(Error::Syntax("'bound' must lie in 0..=64".into()));
        }
        Ok(())
    }
}
