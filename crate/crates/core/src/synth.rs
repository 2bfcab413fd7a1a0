//! Seeded two-category synthetic word corpus.
//!
//! Each category has its own vocabulary and a stock of recurring phrases;
//! a shared vocabulary of function words is mixed into both streams. The
//! generator writes a manifest, one training stream per category (split
//! into 20-word samples) and one test file per category (one 20-word sample
//! per line).

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub seed: u64,
    pub bytes_per_stream: usize,
    pub test_samples: usize,
    pub test_words: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec { seed: 7, bytes_per_stream: 10_000, test_samples: 20, test_words: 20 }
    }
}

const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
const SHARED: [&str; 16] =
    ["the", "a", "of", "and", "to", "in", "is", "it", "that", "was", "on", "with", "as", "for", "by", "at"];

fn word(rng: &mut ChaCha8Rng, suffix: &str) -> String {
    let syllables = rng.random_range(2..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS.choose(rng).unwrap());
        w.push_str(VOWELS.choose(rng).unwrap());
    }
    w.push_str(suffix);
    w
}

struct Style {
    vocab: Vec<String>,
    phrases: Vec<Vec<String>>,
}

impl Style {
    fn new(rng: &mut ChaCha8Rng, suffix: &str) -> Self {
        let vocab: Vec<String> = (0..40).map(|_| word(rng, suffix)).collect();
        let phrases = (0..25)
            .map(|_| {
                let len = rng.random_range(2..=4);
                (0..len)
                    .map(|_| {
                        if rng.random_bool(0.3) {
                            SHARED.choose(rng).unwrap().to_string()
                        } else {
                            vocab.choose(rng).unwrap().clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Style { vocab, phrases }
    }

    fn emit(&self, rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
        let r: f64 = rng.random();
        if r < 0.6 {
            out.extend(self.phrases.choose(rng).unwrap().iter().cloned());
        } else if r < 0.85 {
            out.push(SHARED.choose(rng).unwrap().to_string());
        } else {
            out.push(self.vocab.choose(rng).unwrap().clone());
        }
    }

    fn words(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        while out.len() < n {
            self.emit(rng, &mut out);
        }
        out.truncate(n);
        out
    }

    fn stream(&self, rng: &mut ChaCha8Rng, bytes: usize) -> String {
        let mut text = String::new();
        let mut line = 0;
        let mut buf = Vec::new();
        while text.len() < bytes {
            buf.clear();
            self.emit(rng, &mut buf);
            for w in &buf {
                text.push_str(w);
                line += 1;
                text.push(if line % 12 == 0 { '\n' } else { ' ' });
            }
        }
        if !text.ends_with('\n') {
            text.pop();
            text.push('\n');
        }
        text
    }
}

/// The generated files as `(file name, contents)`, manifest first.
pub fn generate(spec: &SynthSpec) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let styles = [("alpha", Style::new(&mut rng, "")), ("beta", Style::new(&mut rng, ""))];
    let mut manifest = String::from(
        "schema_version = 1\nname = \"synthetic\"\ntokenizer = \"words\"\nsplit_unit = \"n_words:20\"\ntest_split = \"lines\"\n",
    );
    let mut files = Vec::new();
    for (label, style) in &styles {
        let train = style.stream(&mut rng, spec.bytes_per_stream);
        let mut test = String::new();
        for _ in 0..spec.test_samples {
            let _ = writeln!(test, "{}", style.words(&mut rng, spec.test_words).join(" "));
        }
        let _ = write!(
            manifest,
            "\n[[categories]]\nlabel = \"{label}\"\ntraining_files = [\"{label}_train.txt\"]\ntest_files = [\"{label}_test.txt\"]\n"
        );
        files.push((format!("{label}_train.txt"), train));
        files.push((format!("{label}_test.txt"), test));
    }
    let mut out = vec![("manifest.toml".to_string(), manifest)];
    out.extend(files);
    out
}

pub fn write(spec: &SynthSpec, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in generate(spec) {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}
