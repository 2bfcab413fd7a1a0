//! Incremental chunking concept learner.
//!
//! Patterns are learned into per-modality discrimination networks, labelled
//! through naming links formed in short-term memory, and classified by
//! windowed chunk activation. The [`harness`] trains and evaluates suites and
//! [`metrics`] scores model predictions against human ones.

pub mod attention;
pub mod config;
pub mod corpus;
pub mod exec;
pub mod harness;
pub mod ltm;
pub mod metrics;
pub mod model;
pub mod pattern;
pub mod snapshot;
pub mod stm;
pub mod synth;

pub use attention::{AttentionConfig, Classification};
pub use config::RunConfig;
pub use corpus::{Dataset, DatasetManifest, Sample};
pub use exec::Execution;
pub use ltm::{DiscriminationNet, LearnEvent, LearnKind, NodeId};
pub use model::Model;
pub use pattern::{Modality, Pattern, Primitive};
pub use stm::StmQueue;
