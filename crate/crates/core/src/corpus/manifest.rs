//! Dataset manifests.
//!
//! ```toml
//! schema_version = 1
//! name = "xor"
//! tokenizer = "logic_bits"       # words | chars | logic_bits | music_frames | chess_rows
//! split_unit = "lines"           # whole | lines | n_words:N | n_measures:N | n_rows:N
//! test_split = "lines"           # optional, defaults to split_unit
//! lowercase = false              # optional
//!
//! [[categories]]
//! label = "T"
//! training_files = ["train_t.txt"]
//! test_files = ["test_t.txt"]
//! ```
//!
//! File paths are relative to the manifest's directory.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{split_samples, CorpusError, Sample, SplitUnit, Tokenizer};
use crate::exec::Execution;
use crate::pattern::{Modality, Pattern, Primitive};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Category {
    pub label: String,
    #[serde(default)]
    pub training_files: Vec<PathBuf>,
    #[serde(default)]
    pub test_files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub name: String,
    pub tokenizer: Tokenizer,
    pub split_unit: SplitUnit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_split: Option<SplitUnit>,
    #[serde(default)]
    pub lowercase: bool,
    pub categories: Vec<Category>,
    /// Directory that relative file paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CorpusError> {
        let mut m: DatasetManifest = toml::from_str(text).map_err(|e| CorpusError::Manifest(e.to_string()))?;
        m.base_dir = base_dir.to_path_buf();
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        DatasetManifest::from_toml(&text, base)
    }

    pub fn test_split(&self) -> SplitUnit {
        self.test_split.unwrap_or(self.split_unit)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.categories.iter().map(|c| c.label.as_str()).collect()
    }

    pub fn resolve(&self, file: &Path) -> PathBuf {
        self.base_dir.join(file)
    }

    /// Schema, label and split checks plus existence of every referenced file.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: String| Err(CorpusError::Manifest(m));
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {MANIFEST_SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.categories.is_empty() {
            return bad("no categories".into());
        }
        let mut seen = BTreeSet::new();
        for c in &self.categories {
            if Primitive::new(&c.label).is_err() {
                return bad(format!("label {:?} must be one non-empty token", c.label));
            }
            if !seen.insert(c.label.as_str()) {
                return bad(format!("duplicate label {:?}", c.label));
            }
        }
        for unit in [self.split_unit, self.test_split()] {
            let ok = match unit {
                SplitUnit::Whole | SplitUnit::Lines => true,
                SplitUnit::Words(_) => {
                    matches!(self.tokenizer, Tokenizer::Words | Tokenizer::Chars | Tokenizer::LogicBits)
                }
                SplitUnit::Measures(_) => self.tokenizer == Tokenizer::MusicFrames,
                SplitUnit::Rows(_) => self.tokenizer == Tokenizer::ChessRows,
            };
            if !ok {
                return bad(format!("split unit {unit} does not apply to the {:?} tokenizer", self.tokenizer));
            }
        }
        for c in &self.categories {
            for f in c.training_files.iter().chain(&c.test_files) {
                let p = self.resolve(f);
                if !p.is_file() {
                    return bad(format!("category {:?}: file {} does not exist", c.label, p.display()));
                }
            }
        }
        Ok(())
    }

    fn read_bodies(&self, file: &Path, unit: SplitUnit) -> Result<Vec<Vec<Primitive>>, CorpusError> {
        let path = self.resolve(file);
        let text = std::fs::read_to_string(&path)
            .map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
        let stream = self
            .tokenizer
            .tokenize(&text, self.lowercase)
            .map_err(|e| CorpusError::InFile { path: path.display().to_string(), source: Box::new(e) })?;
        Ok(split_samples(&stream, unit))
    }

    /// Reads, tokenizes and splits every file. Files are processed with
    /// `exec` and merged back in manifest order.
    pub fn load_dataset(&self, exec: Execution) -> Result<Dataset, CorpusError> {
        self.validate()?;
        let mut jobs = Vec::new();
        for (ci, c) in self.categories.iter().enumerate() {
            for f in &c.training_files {
                jobs.push((ci, f.clone(), false));
            }
            for f in &c.test_files {
                jobs.push((ci, f.clone(), true));
            }
        }
        let bodies = exec.try_map(&jobs, |(_, f, test)| {
            self.read_bodies(f, if *test { self.test_split() } else { self.split_unit })
        })?;
        let mut train = Vec::new();
        let mut test = Vec::new();
        for ((ci, file, is_test), bodies) in jobs.into_iter().zip(bodies) {
            let label = Primitive::new(&self.categories[ci].label).expect("validated");
            for (i, body) in bodies.into_iter().enumerate() {
                if is_test {
                    test.push(TestItem {
                        id: format!("{}#{}", file.display(), i + 1),
                        label: label.as_str().to_string(),
                        stimulus: Pattern::new(Modality::Visual, body),
                    });
                } else {
                    train.push(Sample::from_tokens(body, label.clone()));
                }
            }
        }
        Ok(Dataset { manifest: self.clone(), train, test })
    }
}

/// A held-out stimulus with its expected label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestItem {
    pub id: String,
    pub label: String,
    pub stimulus: Pattern,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub train: Vec<Sample>,
    pub test: Vec<TestItem>,
}

impl Dataset {
    pub fn training_tokens(&self) -> usize {
        self.train.iter().map(|s| s.visual.len() + s.label.len()).sum()
    }
}
