//! Structured TOML configuration shared by `sweep`, `print-equations` and the
//! figure presets.
//!
//! ```toml
//! medium = "side"          # "direct" or "side"
//! n = 3
//! m = 4
//! omega_q = [0.95, 1.0, 1.06]   # scalars broadcast to every site
//! omega_r = 1.0
//! g = [0.04, 0.01, 0.04]
//! u = 1.05
//! jx = 0.01
//! gamma_l = 0.02
//! gamma_r = 0.02
//! omega_p_grid = { start = 0.9, stop = 1.1, points = 401 }
//! i_in_grid = [1.12e-6, 7.1e-4, 0.034, 0.68]
//! methods = ["THLE", "QCA", "MQCA"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A per-site parameter: one value broadcast to all sites, or one per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerSite {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerSite {
    /// Expands to exactly `n` values.
    pub fn expand(&self, key: &str, n: usize) -> Result<Vec<f64>> {
        match self {
            PerSite::Scalar(v) => Ok(vec![*v; n]),
            PerSite::List(vs) if vs.len() == n => Ok(vs.clone()),
            PerSite::List(vs) => Err(Error::config(
                key,
                format!("expected {n} per-site values, got {}", vs.len()),
            )),
        }
    }
}

/// A one-dimensional sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        log: bool,
    },
}

impl Grid {
    pub fn linspace(start: f64, stop: f64, points: usize) -> Self {
        Grid::Range {
            start,
            stop,
            points,
            log: false,
        }
    }

    pub fn logspace(start: f64, stop: f64, points: usize) -> Self {
        Grid::Range {
            start,
            stop,
            points,
            log: true,
        }
    }

    /// Materializes the grid and checks it is nonempty and strictly increasing.
    pub fn values(&self, key: &str) -> Result<Vec<f64>> {
        let vals = match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range {
                start,
                stop,
                points,
                log,
            } => {
                if points == 0 {
                    return Err(Error::config(key, "grid needs at least one point"));
                }
                if log && (start <= 0.0 || stop <= 0.0) {
                    return Err(Error::config(key, "log grid bounds must be positive"));
                }
                if points == 1 {
                    vec![start]
                } else {
                    let (a, b) = if log { (start.ln(), stop.ln()) } else { (start, stop) };
                    (0..points)
                        .map(|i| {
                            let x = a + (b - a) * i as f64 / (points - 1) as f64;
                            if log {
                                x.exp()
                            } else {
                                x
                            }
                        })
                        .collect()
                }
            }
        };
        if vals.is_empty() {
            return Err(Error::config(key, "grid is empty"));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(key, "grid values must be finite"));
        }
        if vals.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(key, "grid must be strictly increasing"));
        }
        Ok(vals)
    }
}

/// Flat key/value configuration. Every key is optional at the parsing stage;
/// [`crate::build_model`] and [`crate::sweep::SweepPlan::from_config`] report
/// the first missing or invalid key by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_q: Option<PerSite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_r: Option<PerSite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<PerSite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_p_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_in_grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
    /// `homogeneous` or `ends-only` placement of the complex interaction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
    /// `first` (site-1 parameters feed U_eff) or `per-site`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ueff_sites: Option<String>,
    /// Use the mean-field equations without the interaction corrections.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mf_uncorrected: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mf_relaxation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}
