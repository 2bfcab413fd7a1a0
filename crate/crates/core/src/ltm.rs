//! Long-term memory: one discrimination network per modality.
//!
//! Nodes are stored in an arena indexed by [`NodeId`]; the root is always id 0.
//! A node's *contents* is the concatenation of the test links on its
//! root-to-node path (the extrinsic description of the chunk) and its *image*
//! is what the node can output (the intrinsic description).
//!
//! Learning follows the classic four stages: sort the pattern to a node,
//! compare the node's image with the pattern, familiarise when they match and
//! discriminate otherwise. Each [`DiscriminationNet::learn`] call makes at most
//! one structural change.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{self, Modality, Pattern, Primitive};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtmError {
    #[error("cannot learn an empty pattern")]
    EmptyPattern,
    #[error("pattern modality {got} does not match network modality {expected}")]
    WrongModality { expected: Modality, got: Modality },
    #[error("node {0} does not exist")]
    MissingNode(NodeId),
    #[error("the root node cannot carry naming links")]
    RootLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn is_root(self) -> bool {
        self == NodeId::ROOT
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub test: Vec<Primitive>,
    pub image: Vec<Primitive>,
    /// Set once the image equals a full presented pattern; a complete image
    /// only matches that exact pattern.
    pub image_complete: bool,
    pub children: Vec<NodeId>,
    /// Lateral links to label nodes in another modality, with co-occurrence counts.
    pub naming_links: BTreeMap<NodeId, u32>,
    pub created_at: u64,
    pub updated_at: u64,
}

impl Node {
    fn new(id: NodeId, parent: Option<NodeId>, test: Vec<Primitive>, now: u64) -> Self {
        Node {
            id,
            parent,
            test,
            image: Vec::new(),
            image_complete: false,
            children: Vec::new(),
            naming_links: BTreeMap::new(),
            created_at: now,
            updated_at: now,
        }
    }

    pub fn is_root(&self) -> bool {
        self.id.is_root()
    }

    /// Whether the image can be extended towards `p` (the "match" test of the
    /// second learning stage). A complete image only matches itself.
    pub fn image_matches(&self, p: &[Primitive]) -> bool {
        pattern::is_prefix(&self.image, p) && (!self.image_complete || self.image.len() == p.len())
    }

    pub fn total_links(&self) -> u32 {
        self.naming_links.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnKind {
    CreatedNode,
    Familiarised,
    NoChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnEvent {
    pub kind: LearnKind,
    pub node: NodeId,
    pub simulated_cost_seconds: u64,
}

impl LearnEvent {
    pub fn is_structural(&self) -> bool {
        self.kind != LearnKind::NoChange
    }
}

/// Simulated time charged per learning event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnCosts {
    pub create_seconds: u64,
    pub update_seconds: u64,
}

impl Default for LearnCosts {
    fn default() -> Self {
        LearnCosts { create_seconds: 10, update_seconds: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminationNet {
    modality: Modality,
    costs: LearnCosts,
    clock: u64,
    nodes: Vec<Node>,
}

impl DiscriminationNet {
    pub fn new(modality: Modality) -> Self {
        DiscriminationNet::with_costs(modality, LearnCosts::default())
    }

    pub fn with_costs(modality: Modality, costs: LearnCosts) -> Self {
        DiscriminationNet { modality, costs, clock: 0, nodes: vec![Node::new(NodeId::ROOT, None, Vec::new(), 0)] }
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn costs(&self) -> LearnCosts {
        self.costs
    }

    /// Simulated seconds spent learning so far.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    fn get(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    fn get_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.index()]
    }

    /// Concatenated test links from the root down to `id`.
    pub fn contents(&self, id: NodeId) -> Vec<Primitive> {
        let mut path = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            path.push(n);
            cur = self.get(n).parent;
        }
        path.iter().rev().flat_map(|n| self.get(*n).test.iter().cloned()).collect()
    }

    /// Number of primitives in the node's contents; 0 for the root.
    pub fn chunk_size(&self, id: NodeId) -> usize {
        let mut size = 0;
        let mut cur = Some(id);
        while let Some(n) = cur {
            let node = self.get(n);
            size += node.test.len();
            cur = node.parent;
        }
        size
    }

    /// Sorts `p` through the network and returns the deepest node reached.
    /// Children are tried in insertion order; the first whose test link is a
    /// prefix of the remaining input wins.
    pub fn recognise(&self, p: &Pattern) -> NodeId {
        self.recognise_items(p.items())
    }

    pub(crate) fn recognise_items(&self, items: &[Primitive]) -> NodeId {
        self.sort(items).0
    }

    /// Like `recognise`, also returning how much of the input the path consumed.
    fn sort(&self, items: &[Primitive]) -> (NodeId, usize) {
        let mut cur = NodeId::ROOT;
        let mut consumed = 0;
        'descend: loop {
            let rest = &items[consumed..];
            for &child in &self.get(cur).children {
                let test = &self.get(child).test;
                if !test.is_empty() && pattern::is_prefix(test, rest) {
                    consumed += test.len();
                    cur = child;
                    continue 'descend;
                }
            }
            return (cur, consumed);
        }
    }

    /// Image of the node retrieved for `p` (empty when nothing is recognised).
    pub fn retrieve(&self, p: &Pattern) -> Pattern {
        let id = self.recognise(p);
        Pattern::new(self.modality, self.get(id).image.clone())
    }

    fn check_modality(&self, p: &Pattern) -> Result<(), LtmError> {
        if p.modality() != self.modality {
            return Err(LtmError::WrongModality { expected: self.modality, got: p.modality() });
        }
        Ok(())
    }

    /// One learning step for `p`.
    pub fn learn(&mut self, p: &Pattern) -> Result<LearnEvent, LtmError> {
        self.check_modality(p)?;
        if p.is_empty() {
            return Err(LtmError::EmptyPattern);
        }
        let node = self.recognise(p);
        let event = if self.get(node).image_matches(p.items()) {
            self.familiarise_items(node, p.items())
        } else {
            self.discriminate_items(node, p.items())
        };
        Ok(event)
    }

    /// What `learn(p)` would do, without doing it.
    pub fn probe(&self, p: &Pattern) -> Result<LearnKind, LtmError> {
        self.check_modality(p)?;
        if p.is_empty() {
            return Err(LtmError::EmptyPattern);
        }
        let node = self.recognise(p);
        Ok(if self.get(node).image_matches(p.items()) {
            self.familiarise_kind(node, p.items())
        } else {
            self.discriminate_kind(node, p.items())
        })
    }

    fn familiarise_kind(&self, node: NodeId, p: &[Primitive]) -> LearnKind {
        let n = self.get(node);
        let diff = pattern::strip_common_prefix(p, &n.image);
        if diff.is_empty() {
            if !node.is_root() && n.image.len() == p.len() && !n.image_complete {
                return LearnKind::Familiarised;
            }
            return LearnKind::NoChange;
        }
        if self.recognise_items(diff).is_root() {
            LearnKind::CreatedNode
        } else {
            LearnKind::Familiarised
        }
    }

    fn discriminate_kind(&self, node: NodeId, p: &[Primitive]) -> LearnKind {
        let contents = self.contents(node);
        let rest = pattern::strip_common_prefix(p, &contents);
        if rest.is_empty() {
            return LearnKind::NoChange;
        }
        let retrieved = self.recognise_items(rest);
        if retrieved.is_root() {
            LearnKind::CreatedNode
        } else if self.get(retrieved).image.is_empty() {
            self.familiarise_kind(retrieved, rest)
        } else {
            LearnKind::CreatedNode
        }
    }

    /// Adds information to the image of `node`, which was retrieved for `p`.
    pub fn familiarise(&mut self, node: NodeId, p: &Pattern) -> Result<LearnEvent, LtmError> {
        self.check_modality(p)?;
        self.node(node).ok_or(LtmError::MissingNode(node))?;
        Ok(self.familiarise_items(node, p.items()))
    }

    /// Adds a node below `node`, which was retrieved for `p`.
    pub fn discriminate(&mut self, node: NodeId, p: &Pattern) -> Result<LearnEvent, LtmError> {
        self.check_modality(p)?;
        self.node(node).ok_or(LtmError::MissingNode(node))?;
        Ok(self.discriminate_items(node, p.items()))
    }

    fn familiarise_items(&mut self, node: NodeId, p: &[Primitive]) -> LearnEvent {
        let image = &self.get(node).image;
        let diff = pattern::strip_common_prefix(p, image).to_vec();
        if diff.is_empty() {
            if !node.is_root() && image.len() == p.len() && !self.get(node).image_complete {
                self.get_mut(node).image_complete = true;
                return self.updated(node);
            }
            return self.no_change(node);
        }
        let retrieved = self.recognise_items(&diff);
        if retrieved.is_root() {
            return self.learn_primitive(diff[0].clone());
        }
        let retrieved_image_len = self.get(retrieved).image.len();
        let target = if retrieved_image_len == 0 || retrieved_image_len > diff.len() { node } else { retrieved };
        let n = self.get_mut(target);
        n.image.push(diff[0].clone());
        if target == node && n.image.as_slice() == p {
            n.image_complete = true;
        }
        self.updated(target)
    }

    fn discriminate_items(&mut self, node: NodeId, p: &[Primitive]) -> LearnEvent {
        let contents = self.contents(node);
        let rest = pattern::strip_common_prefix(p, &contents);
        if rest.is_empty() {
            return self.no_change(node);
        }
        let retrieved = self.recognise_items(rest);
        if retrieved.is_root() {
            return self.learn_primitive(rest[0].clone());
        }
        if self.get(retrieved).image.is_empty() {
            return self.familiarise_items(retrieved, rest);
        }
        let retrieved_image = &self.get(retrieved).image;
        let test =
            if pattern::is_prefix(retrieved_image, rest) { retrieved_image.clone() } else { vec![rest[0].clone()] };
        let mut image = contents.clone();
        image.extend(test.iter().cloned());
        let complete = image.as_slice() == p;
        let child = self.add_child(node, test);
        let c = self.get_mut(child);
        c.image = image;
        c.image_complete = complete;
        self.created(child)
    }

    fn learn_primitive(&mut self, token: Primitive) -> LearnEvent {
        let child = self.add_child(NodeId::ROOT, vec![token]);
        self.created(child)
    }

    fn add_child(&mut self, parent: NodeId, test: Vec<Primitive>) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node::new(id, Some(parent), test, self.clock));
        self.get_mut(parent).children.push(id);
        id
    }

    fn created(&mut self, node: NodeId) -> LearnEvent {
        self.clock += self.costs.create_seconds;
        let clock = self.clock;
        let n = self.get_mut(node);
        n.created_at = clock;
        n.updated_at = clock;
        LearnEvent { kind: LearnKind::CreatedNode, node, simulated_cost_seconds: self.costs.create_seconds }
    }

    fn updated(&mut self, node: NodeId) -> LearnEvent {
        self.clock += self.costs.update_seconds;
        self.get_mut(node).updated_at = self.clock;
        LearnEvent { kind: LearnKind::Familiarised, node, simulated_cost_seconds: self.costs.update_seconds }
    }

    fn no_change(&self, node: NodeId) -> LearnEvent {
        LearnEvent { kind: LearnKind::NoChange, node, simulated_cost_seconds: 0 }
    }

    /// Increments the naming link from `node` (in this net) to `label`
    /// (a node in another modality's net).
    pub fn add_naming_link(&mut self, node: NodeId, label: NodeId) -> Result<u32, LtmError> {
        if node.is_root() || label.is_root() {
            return Err(LtmError::RootLink);
        }
        let n = self.nodes.get_mut(node.index()).ok_or(LtmError::MissingNode(node))?;
        let count = n.naming_links.entry(label).or_insert(0);
        *count += 1;
        Ok(*count)
    }

    pub fn naming_link_total(&self) -> u64 {
        self.nodes.iter().map(|n| n.total_links() as u64).sum()
    }

    /// Number of distinct (node, label) naming links.
    pub fn naming_link_pairs(&self) -> usize {
        self.nodes.iter().map(|n| n.naming_links.len()).sum()
    }

    /// Total primitives stored across all images.
    pub fn image_mass(&self) -> usize {
        self.nodes.iter().map(|n| n.image.len()).sum()
    }

    /// Structural sanity: ids match positions, parent/child links agree, the
    /// tree is reachable from the root and no two siblings share a test link.
    pub fn validate(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id.index() != i {
                return Err(format!("node at {i} has id {}", n.id));
            }
            match n.parent {
                None if i != 0 => return Err(format!("{} has no parent", n.id)),
                Some(_) if i == 0 => return Err("root has a parent".into()),
                Some(p) => {
                    let parent = self.node(p).ok_or_else(|| format!("{} parent missing", n.id))?;
                    if !parent.children.contains(&n.id) {
                        return Err(format!("{} not listed under its parent", n.id));
                    }
                    if n.test.is_empty() {
                        return Err(format!("{} has an empty test link", n.id));
                    }
                }
                None => {}
            }
            for (a, &x) in n.children.iter().enumerate() {
                let child = self.node(x).ok_or_else(|| format!("child {x} missing"))?;
                if child.parent != Some(n.id) {
                    return Err(format!("{x} listed under wrong parent"));
                }
                for &y in &n.children[a + 1..] {
                    if self.get(y).test == child.test {
                        return Err(format!("siblings {x} and {y} share a test link"));
                    }
                }
            }
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![NodeId::ROOT];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                return Err(format!("{id} reached twice"));
            }
            stack.extend(self.get(id).children.iter().copied());
        }
        if seen.iter().any(|s| !s) {
            return Err("unreachable nodes".into());
        }
        Ok(())
    }

    /// Test-only constructor for hand-built trees.
    #[doc(hidden)]
    pub fn insert_node(&mut self, parent: NodeId, test: &[&str], image: &[&str], complete: bool) -> NodeId {
        let prim = |xs: &[&str]| xs.iter().map(|t| Primitive::new(t).expect("valid token")).collect::<Vec<_>>();
        let id = self.add_child(parent, prim(test));
        let n = self.get_mut(id);
        n.image = prim(image);
        n.image_complete = complete;
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vis(s: &str) -> Pattern {
        Pattern::from_tokens(Modality::Visual, s.chars().map(|c| c.to_string())).unwrap()
    }

    fn toks(n: &Node, image: bool) -> String {
        let xs = if image { &n.image } else { &n.test };
        xs.iter().map(Primitive::as_str).collect()
    }

    /// root -> A (image ABC) -> B (image AB); root -> B (image B)
    fn two_branch_net() -> (DiscriminationNet, NodeId) {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A", "B", "C"], false);
        net.insert_node(NodeId::ROOT, &["B"], &["B"], true);
        let ab = net.insert_node(a, &["B"], &["A", "B"], true);
        (net, ab)
    }

    #[test]
    fn recognise_two_branch_net() {
        let (net, ab) = two_branch_net();
        assert_eq!(net.recognise(&vis("D")), NodeId::ROOT);
        assert_eq!(net.recognise(&vis("AB")), ab);
        assert_eq!(net.recognise(&vis("ABC")), ab);
        assert_eq!(net.retrieve(&vis("ABC")), vis("AB"));
        assert_eq!(net.retrieve(&vis("D")), vis(""));
        assert_eq!(net.recognise(&vis("")), NodeId::ROOT);
    }

    #[test]
    fn learn_new_primitive() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        net.insert_node(NodeId::ROOT, &["A"], &["A"], true);
        let ev = net.learn(&vis("B")).unwrap();
        assert_eq!(ev.kind, LearnKind::CreatedNode);
        assert_eq!(ev.simulated_cost_seconds, 10);
        let b = net.node(ev.node).unwrap();
        assert_eq!(b.parent, Some(NodeId::ROOT));
        assert_eq!(toks(b, false), "B");
        assert!(b.image.is_empty());
        assert_eq!(net.root().children.len(), 2);
    }

    #[test]
    fn learn_pair_in_one_shot() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A"], true);
        net.insert_node(NodeId::ROOT, &["B"], &["B"], true);
        let ev = net.learn(&vis("AB")).unwrap();
        assert_eq!(ev.kind, LearnKind::CreatedNode);
        let n = net.node(ev.node).unwrap();
        assert_eq!(n.parent, Some(a));
        assert_eq!(toks(n, false), "B");
        assert_eq!(toks(n, true), "AB");
        assert_eq!(net.node_count(), 4);
        assert_eq!(net.recognise(&vis("AB")), ev.node);
    }

    #[test]
    fn fill_empty_image() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &[], false);
        let ev = net.learn(&vis("AX")).unwrap();
        assert_eq!(ev, LearnEvent { kind: LearnKind::Familiarised, node: a, simulated_cost_seconds: 2 });
        assert_eq!(toks(net.node(a).unwrap(), true), "A");
        assert_eq!(net.node_count(), 2);
    }

    #[test]
    fn extend_image() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A"], false);
        net.insert_node(NodeId::ROOT, &["B"], &[], false);
        let ev = net.learn(&vis("AB")).unwrap();
        assert_eq!(ev.kind, LearnKind::Familiarised);
        assert_eq!(ev.node, a);
        let n = net.node(a).unwrap();
        assert_eq!(toks(n, true), "AB");
        assert!(n.image_complete);
    }

    #[test]
    fn familiarise_zero_difference_is_no_change() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A", "B"], true);
        let ev = net.familiarise(a, &vis("AB")).unwrap();
        assert_eq!(ev.kind, LearnKind::NoChange);
        assert_eq!(ev.simulated_cost_seconds, 0);
    }

    #[test]
    fn familiarise_unknown_primitive_creates_it() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A"], false);
        let ev = net.learn(&vis("AQ")).unwrap();
        assert_eq!(ev.kind, LearnKind::CreatedNode);
        let q = net.node(ev.node).unwrap();
        assert_eq!(q.parent, Some(NodeId::ROOT));
        assert_eq!(toks(q, false), "Q");
        // the A image is untouched until Q is known
        assert_eq!(toks(net.node(a).unwrap(), true), "A");
        net.learn(&vis("AQ")).unwrap();
        assert_eq!(toks(net.node(a).unwrap(), true), "AQ");
    }

    #[test]
    fn familiarise_outcome_four_extends_retrieved_image() {
        // d = [B, C]; B's node has image [B] (not longer than d) so B's image grows.
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &["A"], false);
        let b = net.insert_node(NodeId::ROOT, &["B"], &["B"], false);
        net.insert_node(NodeId::ROOT, &["C"], &[], false);
        let ev = net.learn(&vis("ABC")).unwrap();
        assert_eq!(ev.node, b);
        assert_eq!(toks(net.node(b).unwrap(), true), "BB");
        assert_eq!(toks(net.node(a).unwrap(), true), "A");
    }

    #[test]
    fn discriminate_from_empty_net() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        net.learn(&vis("A")).unwrap();
        net.learn(&vis("B")).unwrap();
        let tests: Vec<_> = net.root().children.iter().map(|c| toks(net.node(*c).unwrap(), false)).collect();
        assert_eq!(tests, ["A", "B"]);
    }

    #[test]
    fn discriminate_at_root_learns_primitive() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        net.insert_node(NodeId::ROOT, &["Z"], &["Z"], true);
        let ev = net.discriminate(NodeId::ROOT, &vis("Q")).unwrap();
        assert_eq!(ev.kind, LearnKind::CreatedNode);
        assert_eq!(toks(net.node(ev.node).unwrap(), false), "Q");
    }

    #[test]
    fn learn_rejects_empty_and_wrong_modality() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        assert_eq!(net.learn(&vis("")), Err(LtmError::EmptyPattern));
        let verbal = Pattern::from_tokens(Modality::Verbal, ["A"]).unwrap();
        assert!(matches!(net.learn(&verbal), Err(LtmError::WrongModality { .. })));
    }

    #[test]
    fn repeated_learning_converges_to_full_image() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let p = vis("Liverpool");
        let mut calls = 0;
        while net.learn(&p).unwrap().is_structural() {
            calls += 1;
            assert!(calls < 100);
        }
        let node = net.node(net.recognise(&p)).unwrap();
        assert_eq!(toks(node, true), "Liverpool");
        assert!(node.image_complete);
        net.validate().unwrap();
    }

    #[test]
    fn naming_links_accumulate() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["1"], &["1", "0"], true);
        assert_eq!(net.add_naming_link(a, NodeId(3)).unwrap(), 1);
        assert_eq!(net.add_naming_link(a, NodeId(3)).unwrap(), 2);
        assert_eq!(net.add_naming_link(a, NodeId(3)).unwrap(), 3);
        assert_eq!(net.naming_link_pairs(), 1);
        assert_eq!(net.add_naming_link(NodeId::ROOT, NodeId(3)), Err(LtmError::RootLink));
        assert_eq!(net.add_naming_link(NodeId(42), NodeId(3)), Err(LtmError::MissingNode(NodeId(42))));
    }

    #[test]
    fn probe_predicts_learn() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let words = ["ABCA", "ABD", "BCA", "ABCA", "CAB", "A", "ABD"];
        for _ in 0..12 {
            for w in words {
                let p = vis(w);
                let before = net.node_count();
                let predicted = net.probe(&p).unwrap();
                let ev = net.learn(&p).unwrap();
                assert_eq!(predicted, ev.kind, "{w}");
                assert!(net.node_count() >= before);
            }
        }
    }

    #[test]
    fn chunk_size_counts_path() {
        let mut net = DiscriminationNet::new(Modality::Visual);
        let a = net.insert_node(NodeId::ROOT, &["A"], &[], false);
        let ab = net.insert_node(a, &["B"], &[], false);
        assert_eq!(net.chunk_size(NodeId::ROOT), 0);
        assert_eq!(net.chunk_size(ab), 2);
        assert_eq!(net.contents(ab), vis("AB").into_items());
    }
}
