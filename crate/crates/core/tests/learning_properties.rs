use chunkcat::pattern::{Modality, Pattern};
use chunkcat::{DiscriminationNet, NodeId};
use proptest::prelude::*;

fn pattern(tokens: &[u8]) -> Pattern {
    Pattern::from_tokens(Modality::Visual, tokens.iter().map(|t| ((b'a' + t) as char).to_string())).unwrap()
}

fn images(net: &DiscriminationNet) -> Vec<Vec<String>> {
    net.nodes().map(|n| n.image.iter().map(|p| p.as_str().to_string()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn learning_only_grows(seq in proptest::collection::vec(proptest::collection::vec(0u8..4, 1..6), 1..16)) {
        let mut net = DiscriminationNet::new(Modality::Visual);
        for p in &seq {
            let before_nodes = net.node_count();
            let before = images(&net);
            net.learn(&pattern(p)).unwrap();
            prop_assert!(net.node_count() >= before_nodes);
            let after = images(&net);
            for (old, new) in before.iter().zip(&after) {
                prop_assert!(new.len() >= old.len() && new[..old.len()] == old[..]);
            }
            // existing images gain at most one primitive between them
            let grown: usize = before.iter().zip(&after).map(|(o, n)| n.len() - o.len()).sum();
            prop_assert!(grown <= 1);
            prop_assert!(net.validate().is_ok());
        }
    }

    #[test]
    fn recognise_is_read_only(seq in proptest::collection::vec(proptest::collection::vec(0u8..4, 1..6), 1..10), probe in proptest::collection::vec(0u8..4, 0..6)) {
        let mut net = DiscriminationNet::new(Modality::Visual);
        for p in &seq {
            net.learn(&pattern(p)).unwrap();
        }
        let snapshot = images(&net);
        let p = pattern(&probe);
        let a = net.recognise(&p);
        prop_assert_eq!(a, net.recognise(&p));
        prop_assert_eq!(images(&net), snapshot);
    }
}

#[test]
fn repeated_learning_reaches_a_fixed_point() {
    let mut net = DiscriminationNet::new(Modality::Visual);
    let p = pattern(&[0, 1, 2, 3, 1]);
    let mut steps = 0;
    while net.learn(&p).unwrap().is_structural() {
        steps += 1;
        assert!(steps < 100);
    }
    let node = net.recognise(&p);
    assert_ne!(node, NodeId::ROOT);
    assert_eq!(net.retrieve(&p), p);
}
