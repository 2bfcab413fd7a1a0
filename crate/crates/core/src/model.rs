//! A complete agent: one network and one STM per modality, plus the
//! behaviour commands learn, categorise and retrieve.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attention::{self, AttentionError, Classification};
use crate::config::RunConfig;
use crate::corpus::Sample;
use crate::ltm::{DiscriminationNet, LearnEvent, LearnKind, LtmError, NodeId};
use crate::pattern::{Modality, Pattern};
use crate::stm::{self, LinkPairing, StmQueue};

/// Features that can be switched off for later training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Ablations {
    pub stm: bool,
    pub naming_links: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Stm,
    NamingLinks,
}

impl std::str::FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stm" => Ok(Feature::Stm),
            "naming_links" | "naming-links" => Ok(Feature::NamingLinks),
            other => Err(format!("unknown feature {other:?} (expected stm or naming_links)")),
        }
    }
}

/// Outcome of presenting one labelled sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleEvents {
    pub visual: LearnEvent,
    pub verbal: LearnEvent,
    pub links: usize,
}

/// The chunk gate draws from its own stream so that presentation order
/// does not depend on the gate.
fn gate_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

#[derive(Debug, Clone)]
pub struct Model {
    config: RunConfig,
    nets: BTreeMap<Modality, DiscriminationNet>,
    stms: BTreeMap<Modality, StmQueue>,
    ablations: Ablations,
    rng: ChaCha8Rng,
}

impl Model {
    pub fn new(config: RunConfig) -> Self {
        let nets = Modality::ALL.iter().map(|&m| (m, DiscriminationNet::with_costs(m, config.costs()))).collect();
        let stms = Modality::ALL.iter().map(|&m| (m, StmQueue::new(m, config.stm_size))).collect();
        let rng = gate_rng(config.seed);
        Model { config, nets, stms, ablations: Ablations::default(), rng }
    }

    pub(crate) fn from_parts(
        config: RunConfig,
        nets: BTreeMap<Modality, DiscriminationNet>,
        stms: BTreeMap<Modality, StmQueue>,
        ablations: Ablations,
    ) -> Self {
        let rng = gate_rng(config.seed);
        Model { config, nets, stms, ablations, rng }
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn ablations(&self) -> Ablations {
        self.ablations
    }

    pub fn net(&self, m: Modality) -> &DiscriminationNet {
        &self.nets[&m]
    }

    pub fn nets(&self) -> &BTreeMap<Modality, DiscriminationNet> {
        &self.nets
    }

    pub fn visual(&self) -> &DiscriminationNet {
        self.net(Modality::Visual)
    }

    pub fn verbal(&self) -> &DiscriminationNet {
        self.net(Modality::Verbal)
    }

    pub fn stm(&self, m: Modality) -> &StmQueue {
        &self.stms[&m]
    }

    pub fn stms(&self) -> &BTreeMap<Modality, StmQueue> {
        &self.stms
    }

    /// Simulated seconds summed over all networks.
    pub fn simulated_time_seconds(&self) -> u64 {
        self.nets.values().map(DiscriminationNet::clock).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nets.values().map(DiscriminationNet::node_count).sum()
    }

    /// Switches a feature off for all subsequent training. Recognition and
    /// categorisation are unaffected.
    pub fn ablate(&mut self, feature: Feature) {
        match feature {
            Feature::Stm => self.ablations.stm = true,
            Feature::NamingLinks => self.ablations.naming_links = true,
        }
    }

    /// One learning step in the pattern's modality. With a chunk probability
    /// below 1 a structural change only happens when a Bernoulli draw allows
    /// it; a blocked change is reported as `deferred`.
    pub fn learn(&mut self, p: &Pattern) -> Result<(LearnEvent, bool), LtmError> {
        let prob = self.config.chunk_probability;
        let net = self.nets.get_mut(&p.modality()).expect("every modality has a net");
        if prob < 1.0 {
            let kind = net.probe(p)?;
            if kind != LearnKind::NoChange && !self.rng.random_bool(prob) {
                let node = net.recognise(p);
                return Ok((LearnEvent { kind: LearnKind::NoChange, node, simulated_cost_seconds: 0 }, true));
            }
        }
        Ok((net.learn(p)?, false))
    }

    /// Learns the visual body and the label, feeds both recognised chunks into
    /// STM and forms naming links between co-occupying chunks.
    pub fn train_sample(&mut self, sample: &Sample) -> Result<(SampleEvents, usize), LtmError> {
        let (visual, d1) = self.learn(&sample.visual)?;
        let (verbal, d2) = self.learn(&sample.label)?;
        let deferred = d1 as usize + d2 as usize;
        let mut links = 0;
        if !self.ablations.stm {
            for p in [&sample.visual, &sample.label] {
                let net = self.net(p.modality());
                let node = net.recognise(p);
                let exact = net.node(node).is_some_and(|n| n.image == p.items());
                self.stms.get_mut(&p.modality()).unwrap().push_exact(node, exact);
            }
            if !self.ablations.naming_links {
                links = self.link_co_occupants()?;
            }
        }
        Ok((SampleEvents { visual, verbal, links }, deferred))
    }

    fn link_co_occupants(&mut self) -> Result<usize, LtmError> {
        let gate = self.config.link_gate;
        let (vq, lq) = (&self.stms[&Modality::Visual], &self.stms[&Modality::Verbal]);
        let (vn, ln) = (self.net(Modality::Visual), self.net(Modality::Verbal));
        let pairs = match self.config.link_pairing {
            LinkPairing::Head => stm::co_occupancy(vq, vn, lq, ln, gate).into_iter().collect(),
            LinkPairing::Positional => stm::co_occupancy_positional(vq, vn, lq, ln, gate),
        };
        let visual = self.nets.get_mut(&Modality::Visual).unwrap();
        for &(v, l) in &pairs {
            visual.add_naming_link(v, l)?;
        }
        Ok(pairs.len())
    }

    pub fn clear_stm(&mut self) {
        for q in self.stms.values_mut() {
            q.clear();
        }
    }

    pub fn categorise(&self, stimulus: &Pattern) -> Result<Classification, AttentionError> {
        attention::categorise(self.visual(), self.verbal(), stimulus, &self.config.attention())
    }

    pub fn retrieve(&self, stimulus: &Pattern) -> Pattern {
        self.net(stimulus.modality()).retrieve(stimulus)
    }

    pub fn recognise(&self, stimulus: &Pattern) -> NodeId {
        self.net(stimulus.modality()).recognise(stimulus)
    }

    /// Label nodes known to the visual network, in creation order, with names.
    pub fn labels(&self) -> Vec<(NodeId, String)> {
        attention::known_labels(self.visual())
            .into_iter()
            .map(|id| (id, attention::label_name(self.verbal(), id)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &str, l: &str) -> Sample {
        Sample::new(
            Pattern::parse_line(Modality::Visual, v).unwrap(),
            Pattern::parse_line(Modality::Verbal, l).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn naming_links_form_after_images_fill() {
        let mut m = Model::new(RunConfig::default());
        let s = sample("1 0", "T");
        let (ev, _) = m.train_sample(&s).unwrap();
        assert_eq!(ev.visual.kind, LearnKind::CreatedNode);
        assert_eq!(ev.links, 0);
        for _ in 0..6 {
            m.train_sample(&s).unwrap();
        }
        assert!(m.visual().naming_link_total() > 0);
        let c = m.categorise(&Pattern::parse_line(Modality::Visual, "1 0").unwrap()).unwrap();
        assert_eq!(c.top().unwrap().label.name, "T");
    }

    #[test]
    fn ablated_links_freeze_table() {
        for feature in [Feature::Stm, Feature::NamingLinks] {
            let mut m = Model::new(RunConfig::default());
            for _ in 0..5 {
                m.train_sample(&sample("1 0", "T")).unwrap();
            }
            let before = m.visual().naming_link_total();
            let probe = Pattern::parse_line(Modality::Visual, "1 0").unwrap();
            let recognised = m.recognise(&probe);
            m.ablate(feature);
            for _ in 0..10 {
                m.train_sample(&sample("0 1", "F")).unwrap();
                m.train_sample(&sample("1 0", "T")).unwrap();
            }
            assert_eq!(m.visual().naming_link_total(), before);
            assert_eq!(m.recognise(&probe), recognised);
            assert_eq!(m.categorise(&probe).unwrap().top().unwrap().label.name, "T");
        }
    }

    #[test]
    fn zero_chunk_probability_blocks_learning() {
        let cfg = RunConfig { chunk_probability: 0.0, ..RunConfig::default() };
        let mut m = Model::new(cfg);
        let (ev, deferred) = m.train_sample(&sample("a b", "X")).unwrap();
        assert_eq!(ev.visual.kind, LearnKind::NoChange);
        assert_eq!(deferred, 2);
        assert_eq!(m.node_count(), 3);
    }

    #[test]
    fn feature_names() {
        assert_eq!("stm".parse::<Feature>(), Ok(Feature::Stm));
        assert_eq!("naming_links".parse::<Feature>(), Ok(Feature::NamingLinks));
        assert!("memory".parse::<Feature>().is_err());
    }
}
