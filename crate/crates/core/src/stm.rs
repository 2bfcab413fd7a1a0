//! Short-term memory: a bounded FIFO of node references per modality.
//!
//! When chunks from two modalities sit in their queues at the same time a
//! naming link is formed between them. By default only the two queue heads
//! are paired; [`LinkPairing::Positional`] pairs every slot index the two
//! queues share.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::ltm::{DiscriminationNet, Node, NodeId};
use crate::pattern::{self, Modality};

pub const MIN_CAPACITY: usize = 2;
pub const MAX_CAPACITY: usize = 9;
pub const DEFAULT_CAPACITY: usize = 5;

/// One queue entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub node: NodeId,
    /// The node's image equalled the pattern that put it here.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StmQueue {
    modality: Modality,
    capacity: usize,
    /// Most recent first.
    slots: VecDeque<Slot>,
}

impl StmQueue {
    /// Capacity is clamped into `[MIN_CAPACITY, MAX_CAPACITY]`; callers that
    /// need to reject bad values validate before this point.
    pub fn new(modality: Modality, capacity: usize) -> Self {
        let capacity = capacity.clamp(MIN_CAPACITY, MAX_CAPACITY);
        StmQueue { modality, capacity, slots: VecDeque::with_capacity(capacity + 1) }
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn head(&self) -> Option<NodeId> {
        self.slots.front().map(|s| s.node)
    }

    pub fn head_slot(&self) -> Option<Slot> {
        self.slots.front().copied()
    }

    pub fn slots(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.slots.iter().map(|s| s.node)
    }

    pub fn entries(&self) -> impl Iterator<Item = Slot> + '_ {
        self.slots.iter().copied()
    }

    /// Puts `node` at the head and returns the evicted oldest entry, if any.
    /// Root pushes are dropped.
    pub fn push(&mut self, node: NodeId) -> Option<NodeId> {
        self.push_slot(Slot { node, exact: false })
    }

    /// [`push`](Self::push) recording whether the node's image equalled the
    /// eliciting pattern.
    pub fn push_exact(&mut self, node: NodeId, exact: bool) -> Option<NodeId> {
        self.push_slot(Slot { node, exact })
    }

    fn push_slot(&mut self, slot: Slot) -> Option<NodeId> {
        if slot.node.is_root() {
            return None;
        }
        self.slots.push_front(slot);
        if self.slots.len() > self.capacity {
            self.slots.pop_back().map(|s| s.node)
        } else {
            None
        }
    }

    pub fn clear(&mut self) {
        self.slots.clear();
    }

    /// One line per slot: `position id contents`.
    pub fn dump(&self, net: &DiscriminationNet) -> String {
        let mut out = format!("stm {} ({}/{})\n", self.modality, self.len(), self.capacity);
        for (i, s) in self.slots.iter().enumerate() {
            let mark = if s.exact { " *" } else { "" };
            out.push_str(&format!("  {i} {} [{}]{mark}\n", s.node, pattern::join(&net.contents(s.node))));
        }
        out
    }
}

/// When a chunk counts as "fully learned" for naming-link purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkGate {
    /// Image equal to the pattern that elicited the chunk.
    Exact,
    /// Image marked complete.
    Complete,
    /// Image complete or at least non-empty.
    #[default]
    CompleteOrNonEmpty,
}

impl LinkGate {
    pub fn admits(self, node: &Node, exact: bool) -> bool {
        if node.is_root() {
            return false;
        }
        match self {
            LinkGate::Exact => exact,
            LinkGate::Complete => node.image_complete,
            LinkGate::CompleteOrNonEmpty => node.image_complete || !node.image.is_empty(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkPairing {
    #[default]
    Head,
    Positional,
}

fn admitted(net: &DiscriminationNet, slot: Slot, gate: LinkGate) -> bool {
    net.node(slot.node).is_some_and(|n| gate.admits(n, slot.exact))
}

/// The (visual, verbal) head pair when both heads pass the gate.
pub fn co_occupancy(
    visual_q: &StmQueue,
    visual_net: &DiscriminationNet,
    verbal_q: &StmQueue,
    verbal_net: &DiscriminationNet,
    gate: LinkGate,
) -> Option<(NodeId, NodeId)> {
    let v = visual_q.head_slot()?;
    let l = verbal_q.head_slot()?;
    (admitted(visual_net, v, gate) && admitted(verbal_net, l, gate)).then_some((v.node, l.node))
}

/// Every slot index held by both queues whose two entries pass the gate.
pub fn co_occupancy_positional(
    visual_q: &StmQueue,
    visual_net: &DiscriminationNet,
    verbal_q: &StmQueue,
    verbal_net: &DiscriminationNet,
    gate: LinkGate,
) -> Vec<(NodeId, NodeId)> {
    visual_q
        .entries()
        .zip(verbal_q.entries())
        .filter(|&(v, l)| admitted(visual_net, v, gate) && admitted(verbal_net, l, gate))
        .map(|(v, l)| (v.node, l.node))
        .collect()
}
