//! Run configuration. Every field has a default, so an empty file is a
//! valid configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attention::{AttentionConfig, ChunkMeasure, Weighting};
use crate::ltm::LearnCosts;
use crate::stm::{self, LinkGate, LinkPairing};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub stm_size: usize,
    pub attention_span: usize,
    pub step: usize,
    pub min_fetch: usize,
    pub chunk_probability: f64,
    pub t_create_seconds: u64,
    pub t_update_seconds: u64,
    pub seed: u64,
    pub link_gate: LinkGate,
    pub link_pairing: LinkPairing,
    pub weighting: Weighting,
    pub chunk_measure: ChunkMeasure,
    pub rote: bool,
    pub max_epochs: usize,
    /// Training aborts once the node count exceeds this many times the
    /// number of training tokens.
    pub node_ceiling_factor: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            stm_size: stm::DEFAULT_CAPACITY,
            attention_span: 20,
            step: 1,
            min_fetch: 2,
            chunk_probability: 1.0,
            t_create_seconds: 10,
            t_update_seconds: 2,
            seed: 0,
            link_gate: LinkGate::default(),
            link_pairing: LinkPairing::default(),
            weighting: Weighting::default(),
            chunk_measure: ChunkMeasure::default(),
            rote: true,
            max_epochs: 1000,
            node_ceiling_factor: 10,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        RunConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(stm::MIN_CAPACITY..=stm::MAX_CAPACITY).contains(&self.stm_size) {
            return bad(format!("stm_size {} outside [{}, {}]", self.stm_size, stm::MIN_CAPACITY, stm::MAX_CAPACITY));
        }
        if !(0.0..=1.0).contains(&self.chunk_probability) {
            return bad(format!("chunk_probability {} outside [0, 1]", self.chunk_probability));
        }
        if self.attention_span < 2 {
            return bad(format!("attention_span {} must be at least 2", self.attention_span));
        }
        if self.step == 0 {
            return bad("step must be at least 1".into());
        }
        if self.min_fetch < 2 || self.min_fetch > self.attention_span {
            return bad(format!("min_fetch {} outside [2, attention_span]", self.min_fetch));
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if self.node_ceiling_factor == 0 {
            return bad("node_ceiling_factor must be at least 1".into());
        }
        Ok(())
    }

    pub fn attention(&self) -> AttentionConfig {
        AttentionConfig {
            span: self.attention_span,
            step: self.step,
            min_fetch: self.min_fetch,
            weighting: self.weighting,
            measure: self.chunk_measure,
            rote: self.rote,
        }
    }

    pub fn costs(&self) -> LearnCosts {
        LearnCosts { create_seconds: self.t_create_seconds, update_seconds: self.t_update_seconds }
    }
}
