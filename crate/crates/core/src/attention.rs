//! Attention window, chunk activation and confidence.
//!
//! A stimulus is scanned by windows of at most `span` primitives starting at
//! offsets `0, step, 2*step, ...`. Each window is fetched whole and then
//! shrunk from the left down to `min_fetch` primitives. Every fetch is sorted
//! through the network; within a window only the largest retrieved chunk that
//! carries naming links votes, with a weight equal to its size split across
//! its labels in proportion to the link counts.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltm::{DiscriminationNet, NodeId};
use crate::pattern::{self, Pattern, Primitive};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AttentionError {
    #[error("cannot attend to an empty stimulus")]
    EmptyStimulus,
    #[error("no chunk in the stimulus is linked to a label")]
    NoActivation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// `size * count / total_links`
    #[default]
    Proportional,
    /// `size * count`
    Multiplicative,
}

/// How big a retrieved chunk is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChunkMeasure {
    /// Primitives on the test path to the node.
    Contents,
    /// Primitives in the node's image.
    #[default]
    Image,
}

impl ChunkMeasure {
    pub fn size(self, net: &DiscriminationNet, node: NodeId) -> usize {
        match self {
            ChunkMeasure::Contents => net.chunk_size(node),
            ChunkMeasure::Image => net.node(node).map_or(0, |n| n.image.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttentionConfig {
    pub span: usize,
    pub step: usize,
    pub min_fetch: usize,
    pub weighting: Weighting,
    pub measure: ChunkMeasure,
    /// Answer stimuli stored verbatim from their own chunk.
    pub rote: bool,
}

impl Default for AttentionConfig {
    fn default() -> Self {
        AttentionConfig {
            span: 20,
            step: 1,
            min_fetch: 2,
            weighting: Weighting::Proportional,
            measure: ChunkMeasure::Image,
            rote: true,
        }
    }
}

/// Fetch ranges grouped by window, longest fetch first within each window.
///
/// Scanning stops after the first window that reaches the end of the
/// stimulus. A window shorter than `min_fetch` is fetched whole.
pub fn window_spans(len: usize, cfg: &AttentionConfig) -> Vec<Vec<Range<usize>>> {
    let step = cfg.step.max(1);
    let span = cfg.span.max(1);
    let mut windows = Vec::new();
    let mut start = 0;
    while start < len {
        let end = (start + span).min(len);
        let shortest = cfg.min_fetch.min(end - start).max(1);
        windows.push((start..=end - shortest).map(|s| s..end).collect());
        if end == len {
            break;
        }
        start += step;
    }
    windows
}

pub fn window_fetches(stimulus: &Pattern, cfg: &AttentionConfig) -> Result<Vec<Pattern>, AttentionError> {
    if stimulus.is_empty() {
        return Err(AttentionError::EmptyStimulus);
    }
    Ok(window_spans(stimulus.len(), cfg)
        .into_iter()
        .flatten()
        .map(|r| Pattern::new(stimulus.modality(), stimulus.items()[r].to_vec()))
        .collect())
}

/// Per-label activations for one stimulus, keyed by label node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActivationTally {
    activations: BTreeMap<NodeId, f64>,
}

impl ActivationTally {
    pub fn new() -> Self {
        ActivationTally::default()
    }

    /// A tally that already lists `labels` at zero activation.
    pub fn with_labels(labels: impl IntoIterator<Item = NodeId>) -> Self {
        ActivationTally { activations: labels.into_iter().map(|l| (l, 0.0)).collect() }
    }

    pub fn get(&self, label: NodeId) -> f64 {
        self.activations.get(&label).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.activations.iter().map(|(k, v)| (*k, *v))
    }

    pub fn total(&self) -> f64 {
        self.activations.values().sum()
    }

    pub fn add(&mut self, label: NodeId, amount: f64) {
        *self.activations.entry(label).or_insert(0.0) += amount;
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.activations.values_mut() {
            *v *= factor;
        }
    }

    /// Adds the contribution of one chunk: its size split across its labels.
    pub fn add_chunk(&mut self, net: &DiscriminationNet, node: NodeId, cfg: &AttentionConfig) {
        let Some(n) = net.node(node) else { return };
        let total = n.total_links();
        if node.is_root() || total == 0 {
            return;
        }
        let size = cfg.measure.size(net, node) as f64;
        for (&label, &count) in &n.naming_links {
            let w = match cfg.weighting {
                Weighting::Proportional => count as f64 / total as f64,
                Weighting::Multiplicative => count as f64,
            };
            self.add(label, size * w);
        }
    }

    /// Recognises one fetch and adds its chunk's contribution.
    pub fn accumulate(&mut self, net: &DiscriminationNet, fetch: &[Primitive], cfg: &AttentionConfig) {
        let node = net.recognise_items(fetch);
        self.add_chunk(net, node, cfg);
    }

    /// Recognises every fetch of one window and adds the contribution of the
    /// largest linked chunk; the earliest fetch wins ties.
    pub fn accumulate_window<'a>(
        &mut self,
        net: &DiscriminationNet,
        fetches: impl IntoIterator<Item = &'a [Primitive]>,
        cfg: &AttentionConfig,
    ) -> Option<NodeId> {
        let mut best: Option<(NodeId, usize)> = None;
        for fetch in fetches {
            let node = net.recognise_items(fetch);
            let linked = net.node(node).is_some_and(|n| !n.naming_links.is_empty());
            if node.is_root() || !linked {
                continue;
            }
            let size = cfg.measure.size(net, node);
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((node, size));
            }
        }
        let (node, _) = best?;
        self.add_chunk(net, node, cfg);
        Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub node: NodeId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub label: Label,
    pub activation: f64,
    pub confidence: f64,
}

/// Labels ranked by confidence, or empty when nothing was activated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub ranked: Vec<Scored>,
}

impl Classification {
    pub fn no_activation() -> Self {
        Classification { ranked: Vec::new() }
    }

    pub fn is_no_activation(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn top(&self) -> Option<&Scored> {
        self.ranked.first()
    }

    /// The two best labels with positive confidence.
    pub fn top2(&self) -> Vec<&Scored> {
        self.ranked.iter().filter(|s| s.confidence > 0.0).take(2).collect()
    }

    pub fn confidence_of(&self, name: &str) -> f64 {
        self.ranked.iter().find(|s| s.label.name == name).map_or(0.0, |s| s.confidence)
    }

    /// Whether the first two entries share a confidence.
    pub fn has_top_tie(&self) -> bool {
        matches!(self.ranked.as_slice(), [a, b, ..] if a.confidence > 0.0 && a.confidence == b.confidence)
    }
}

/// Human-readable label for a verbal node.
pub fn label_name(verbal: &DiscriminationNet, node: NodeId) -> String {
    pattern::join(&verbal.contents(node))
}

/// Normalises a tally into a ranking. Descending confidence; equal
/// confidences keep label-node order, which is creation order.
pub fn confidence(tally: &ActivationTally, verbal: &DiscriminationNet) -> Classification {
    let total = tally.total();
    if total <= 0.0 {
        return Classification::no_activation();
    }
    let mut ranked: Vec<Scored> = tally
        .iter()
        .map(|(node, a)| Scored {
            label: Label { node, name: label_name(verbal, node) },
            activation: a,
            confidence: a / total,
        })
        .collect();
    ranked.sort_by(|x, y| y.confidence.total_cmp(&x.confidence).then(x.label.node.cmp(&y.label.node)));
    Classification { ranked }
}

/// Every label node that some visual chunk links to, in id order.
pub fn known_labels(visual: &DiscriminationNet) -> Vec<NodeId> {
    let mut labels: Vec<NodeId> = visual.nodes().flat_map(|n| n.naming_links.keys().copied()).collect();
    labels.sort();
    labels.dedup();
    labels
}

pub fn tally(
    visual: &DiscriminationNet,
    stimulus: &Pattern,
    cfg: &AttentionConfig,
) -> Result<ActivationTally, AttentionError> {
    if stimulus.is_empty() {
        return Err(AttentionError::EmptyStimulus);
    }
    let items = stimulus.items();
    let mut t = ActivationTally::with_labels(known_labels(visual));
    if cfg.rote {
        if let Some((chunk, label)) = rote(visual, stimulus) {
            t.add(label, cfg.measure.size(visual, chunk).max(1) as f64);
            return Ok(t);
        }
    }
    for window in window_spans(items.len(), cfg) {
        t.accumulate_window(visual, window.into_iter().map(|r| &items[r]), cfg);
    }
    Ok(t)
}

/// A stimulus held verbatim as the image of the chunk it sorts to is
/// answered by rote from that chunk's strongest naming link. Returns the
/// chunk and the label; `None` when the stimulus is not stored, the chunk
/// has no links, or its strongest links tie.
pub fn rote(visual: &DiscriminationNet, stimulus: &Pattern) -> Option<(NodeId, NodeId)> {
    let chunk = visual.recognise(stimulus);
    let node = visual.node(chunk)?;
    if chunk.is_root() || node.image != stimulus.items() {
        return None;
    }
    let best = node.naming_links.values().copied().max()?;
    let mut top = node.naming_links.iter().filter(|(_, c)| **c == best);
    let (&label, _) = top.next()?;
    top.next().is_none().then_some((chunk, label))
}

/// Labels `stimulus` by rote recall or windowed chunk activation. Read-only.
pub fn categorise(
    visual: &DiscriminationNet,
    verbal: &DiscriminationNet,
    stimulus: &Pattern,
    cfg: &AttentionConfig,
) -> Result<Classification, AttentionError> {
    Ok(confidence(&tally(visual, stimulus, cfg)?, verbal))
}

/// The image of the chunk `stimulus` sorts to.
pub fn retrieve(net: &DiscriminationNet, stimulus: &Pattern) -> Pattern {
    net.retrieve(stimulus)
}
