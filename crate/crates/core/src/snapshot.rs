//! Versioned model snapshots.
//!
//! A snapshot is pretty-printed JSON holding the run configuration, every
//! network's node table (ids, tests, images, flags, child order, naming-link
//! counts, timestamps and clock), the STM queues, active ablations and the
//! tokenizer the model was trained with. Serialisation is deterministic, so
//! identical models give identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::RunConfig;
use crate::corpus::Tokenizer;
use crate::ltm::DiscriminationNet;
use crate::model::{Ablations, Model};
use crate::pattern::Modality;
use crate::stm::StmQueue;

pub const SNAPSHOT_FORMAT: &str = "chunkcat-model";
pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a model snapshot (format {0:?})")]
    Format(String),
    #[error("snapshot schema version {found} is not supported (this build reads version {expected})")]
    Version { found: u64, expected: u32 },
    #[error("malformed snapshot: {0}")]
    Json(#[from] serde_json::Error),
    #[error("corrupt snapshot: {0}")]
    Corrupt(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// How stimuli given to a restored model should be tokenized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSpec {
    pub tokenizer: Tokenizer,
    pub lowercase: bool,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input: Option<InputSpec>,
    config: RunConfig,
    ablations: Ablations,
    nets: Vec<DiscriminationNet>,
    stms: Vec<StmQueue>,
}

pub fn to_json(model: &Model, input: Option<InputSpec>) -> String {
    let doc = Document {
        format: SNAPSHOT_FORMAT.to_string(),
        schema_version: SNAPSHOT_SCHEMA_VERSION,
        input,
        config: model.config().clone(),
        ablations: model.ablations(),
        nets: model.nets().values().cloned().collect(),
        stms: model.stms().values().cloned().collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("snapshot serialises");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<(Model, Option<InputSpec>), SnapshotError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let format = value.get("format").and_then(|v| v.as_str()).unwrap_or_default();
    if format != SNAPSHOT_FORMAT {
        return Err(SnapshotError::Format(format.to_string()));
    }
    let version = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if version != u64::from(SNAPSHOT_SCHEMA_VERSION) {
        return Err(SnapshotError::Version { found: version, expected: SNAPSHOT_SCHEMA_VERSION });
    }
    let doc: Document = serde_json::from_value(value)?;
    doc.config.validate().map_err(|e| SnapshotError::Corrupt(e.to_string()))?;
    let mut nets = BTreeMap::new();
    for net in doc.nets {
        net.validate().map_err(|e| SnapshotError::Corrupt(format!("{} net: {e}", net.modality())))?;
        if nets.insert(net.modality(), net).is_some() {
            return Err(SnapshotError::Corrupt("duplicate network".into()));
        }
    }
    let mut stms = BTreeMap::new();
    for q in doc.stms {
        stms.insert(q.modality(), q);
    }
    for m in Modality::ALL {
        if !nets.contains_key(&m) || !stms.contains_key(&m) {
            return Err(SnapshotError::Corrupt(format!("missing {m} network or STM")));
        }
    }
    Ok((Model::from_parts(doc.config, nets, stms, doc.ablations), doc.input))
}

pub fn save(model: &Model, input: Option<InputSpec>, path: &Path) -> Result<String, SnapshotError> {
    let json = to_json(model, input);
    std::fs::write(path, &json).map_err(|source| SnapshotError::Io { path: path.display().to_string(), source })?;
    Ok(digest(json.as_bytes()))
}

pub fn load(path: &Path) -> Result<(Model, Option<InputSpec>), SnapshotError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| SnapshotError::Io { path: path.display().to_string(), source })?;
    from_json(&text)
}

/// Hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
