use chunkcat::corpus::Tokenizer;
use chunkcat::pattern::{Modality, Pattern};
use chunkcat::snapshot::{self, InputSpec};
use chunkcat::{Model, RunConfig, Sample};
use proptest::prelude::*;

fn sample(body: &[u8], label: u8) -> Sample {
    let v = Pattern::from_tokens(Modality::Visual, body.iter().map(|t| ((b'a' + t) as char).to_string())).unwrap();
    let l = Pattern::from_tokens(Modality::Verbal, [format!("L{label}")]).unwrap();
    Sample::new(v, l).unwrap()
}

fn probe(tokens: &[u8]) -> Pattern {
    Pattern::from_tokens(Modality::Visual, tokens.iter().map(|t| ((b'a' + t) as char).to_string())).unwrap()
}

type Data = Vec<(Vec<u8>, u8)>;

fn data() -> impl Strategy<Value = Data> {
    proptest::collection::vec((proptest::collection::vec(0u8..4, 1..6), 0u8..3), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reload_behaves_identically(
        data in data(),
        passes in 1usize..4,
        probes in proptest::collection::vec(proptest::collection::vec(0u8..4, 1..7), 1..5),
        extra in (proptest::collection::vec(0u8..4, 1..6), 0u8..3),
    ) {
        let mut model = Model::new(RunConfig::default());
        for _ in 0..passes {
            for (body, label) in &data {
                model.train_sample(&sample(body, *label)).unwrap();
            }
        }
        let input = Some(InputSpec { tokenizer: Tokenizer::Chars, lowercase: false });
        let json = snapshot::to_json(&model, input);
        let (mut restored, restored_input) = snapshot::from_json(&json).unwrap();
        prop_assert_eq!(restored_input, input);
        prop_assert_eq!(snapshot::to_json(&restored, input), json);
        for p in &probes {
            let p = probe(p);
            prop_assert_eq!(model.categorise(&p), restored.categorise(&p));
            prop_assert_eq!(model.recognise(&p), restored.recognise(&p));
            prop_assert_eq!(model.retrieve(&p), restored.retrieve(&p));
        }
        // training continues identically from the restored state
        let s = sample(&extra.0, extra.1);
        prop_assert_eq!(model.train_sample(&s).unwrap(), restored.train_sample(&s).unwrap());
        prop_assert_eq!(snapshot::to_json(&model, None), snapshot::to_json(&restored, None));
    }
}
