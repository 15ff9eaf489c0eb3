//! Pipeline configuration: one struct, strict parsing, validated ranges.
//!
//! TOML is the primary format; JSON is accepted for files ending in
//! `.json`. Every field has a default, so an empty file is a valid config.
//! Unknown keys are rejected rather than silently ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse: {0}")]
    ParseToml(#[from] toml::de::Error),
    #[error("parse: {0}")]
    ParseJson(#[from] serde_json::Error),
    #[error("config key `{key}`: {message}")]
    Range { key: &'static str, message: String },
}

fn range_err(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range { key, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Backend suite name: `reference` or `remote:<host:port>`.
    pub backend: String,
    /// Entailment probability a persona must reach to survive distillation.
    pub tau: f64,
    /// Perplexity weight in the persona-edit rating (similarity gets 1-alpha).
    pub alpha: f64,
    /// Fluency weight in the sample keep-score.
    pub beta: f64,
    /// Persona-entailment weight in the keep-score; coherence gets 1-beta-gamma.
    pub gamma: f64,
    /// Fraction of eligible (content-tagged) tokens masked per token edit.
    pub mask_ratio: f64,
    /// Bounds of the removed-tail fraction for phrase edits.
    pub phrase_ratio: [f64; 2],
    /// Unique candidates requested from each editing strategy.
    pub k_candidates: usize,
    /// Edited personas kept per distilled sample after rating.
    pub n_p: usize,
    /// Back-translated history variants kept per sample.
    pub n_h: usize,
    /// Beam width for each translation direction.
    pub beam: usize,
    /// Size-matched filtering: keep about `size_ratio * |distilled|` samples.
    pub size_ratio: f64,
    /// Absolute keep-threshold; set to bypass size-matched filtering.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Perplexity normalization constant C in `min(raw, C)/C`.
    pub ppl_constant: f64,
    /// Safety cap on training epochs per curriculum phase.
    pub max_epochs: usize,
    pub patience_easy: usize,
    pub patience_hard: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            backend: "reference".to_string(),
            tau: 0.99,
            alpha: 0.4,
            beta: 0.2,
            gamma: 0.6,
            mask_ratio: 0.8,
            phrase_ratio: [0.3, 0.6],
            k_candidates: 10,
            n_p: 5,
            n_h: 1,
            beam: 5,
            size_ratio: 1.0,
            threshold: None,
            ppl_constant: 50.0,
            max_epochs: 200,
            patience_easy: 15,
            patience_hard: 15,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(range_err("tau", format!("must be in (0, 1], got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(range_err("alpha", format!("must be in [0, 1], got {}", self.alpha)));
        }
        if self.beta < 0.0 {
            return Err(range_err("beta", format!("must be >= 0, got {}", self.beta)));
        }
        if self.gamma < 0.0 {
            return Err(range_err("gamma", format!("must be >= 0, got {}", self.gamma)));
        }
        if self.beta + self.gamma > 1.0 {
            return Err(range_err(
                "beta",
                format!("beta + gamma must be <= 1, got {} + {}", self.beta, self.gamma),
            ));
        }
        if !(self.mask_ratio > 0.0 && self.mask_ratio <= 1.0) {
            return Err(range_err(
                "mask_ratio",
                format!("must be in (0, 1], got {}", self.mask_ratio),
            ));
        }
        let [lo, hi] = self.phrase_ratio;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(range_err(
                "phrase_ratio",
                format!("must satisfy 0 < lo <= hi < 1, got [{lo}, {hi}]"),
            ));
        }
        if self.k_candidates == 0 {
            return Err(range_err("k_candidates", "must be >= 1"));
        }
        if self.n_p == 0 {
            return Err(range_err("n_p", "must be >= 1"));
        }
        if self.beam == 0 {
            return Err(range_err("beam", "must be >= 1"));
        }
        if self.size_ratio <= 0.0 {
            return Err(range_err(
                "size_ratio",
                format!("must be > 0, got {}", self.size_ratio),
            ));
        }
        if self.ppl_constant <= 0.0 {
            return Err(range_err(
                "ppl_constant",
                format!("must be > 0, got {}", self.ppl_constant),
            ));
        }
        if self.max_epochs == 0 {
            return Err(range_err("max_epochs", "must be >= 1"));
        }
        if self.patience_easy == 0 || self.patience_hard == 0 {
            return Err(range_err("patience_easy", "patience values must be >= 1"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let config: Config = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    /// Effective config in TOML form; reloading it reproduces `self`.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        let config = Config::from_toml_str("").unwrap();
        assert_eq!(config, Config::default());
        assert_eq!(config.tau, 0.99);
        assert_eq!(config.alpha, 0.4);
        assert_eq!(config.beta, 0.2);
        assert_eq!(config.gamma, 0.6);
        assert_eq!(config.mask_ratio, 0.8);
        assert_eq!(config.phrase_ratio, [0.3, 0.6]);
        assert_eq!(config.k_candidates, 10);
        assert_eq!(config.n_p, 5);
        assert_eq!(config.n_h, 1);
        assert_eq!(config.beam, 5);
        assert_eq!(config.size_ratio, 1.0);
        assert_eq!(config.ppl_constant, 50.0);
        assert_eq!(config.max_epochs, 200);
    }

    #[test]
    fn out_of_range_alpha_names_the_key() {
        let err = Config::from_toml_str("alpha = 1.5").unwrap_err();
        assert!(matches!(err, ConfigError::Range { key: "alpha", .. }), "{err}");
    }

    #[test]
    fn simplex_violation_is_rejected() {
        let err = Config::from_toml_str("beta = 0.5\ngamma = 0.6").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("beta + gamma"), "{message}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml_str("buzz = 1").is_err());
        assert!(Config::from_json_str(r#"{"buzz": 1}"#).is_err());
    }

    #[test]
    fn toml_round_trip_is_identity() {
        let mut config = Config::default();
        assert_eq!(Config::from_toml_str(&config.to_toml_string()).unwrap(), config);
        config.threshold = Some(0.5);
        config.tau = 0.9;
        assert_eq!(Config::from_toml_str(&config.to_toml_string()).unwrap(), config);
    }

    #[test]
    fn json_is_accepted() {
        let config = Config::from_json_str(r#"{"tau": 0.5, "beam": 3}"#).unwrap();
        assert_eq!(config.tau, 0.5);
        assert_eq!(config.beam, 3);
        assert_eq!(config.alpha, 0.4);
    }

    #[test]
    fn boundary_values_validate() {
        assert!(Config::from_toml_str("tau = 1.0").is_ok());
        assert!(Config::from_toml_str("tau = 0.0").is_err());
        assert!(Config::from_toml_str("mask_ratio = 1.0").is_ok());
        assert!(Config::from_toml_str("mask_ratio = 0.0").is_err());
        assert!(Config::from_toml_str("phrase_ratio = [0.5, 0.5]").is_ok());
        assert!(Config::from_toml_str("phrase_ratio = [0.6, 0.3]").is_err());
        assert!(Config::from_toml_str("phrase_ratio = [0.0, 0.5]").is_err());
        assert!(Config::from_toml_str("phrase_ratio = [0.3, 1.0]").is_err());
        assert!(Config::from_toml_str("n_h = 0").is_ok());
        assert!(Config::from_toml_str("n_p = 0").is_err());
        assert!(Config::from_toml_str("beam = 0").is_err());
        assert!(Config::from_toml_str("size_ratio = 0.0").is_err());
        assert!(Config::from_toml_str("max_epochs = 0").is_err());
    }
}
