#![allow(dead_code)]

use std::path::PathBuf;

use chunkcat::harness::{self, Presentation, SuiteResult, TrainingRun};
use chunkcat::{Dataset, DatasetManifest, Execution, Model, RunConfig};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn suite_manifest(name: &str) -> PathBuf {
    fixtures().join("suites").join(name).join("manifest.toml")
}

pub fn load_suite(name: &str) -> Dataset {
    DatasetManifest::load(&suite_manifest(name)).unwrap().load_dataset(Execution::Sequential).unwrap()
}

pub fn labels(d: &Dataset) -> Vec<String> {
    d.manifest.labels().iter().map(|s| s.to_string()).collect()
}

pub struct Trained {
    pub model: Model,
    pub run: TrainingRun,
    pub result: SuiteResult,
}

pub fn train_suite(d: &Dataset, config: RunConfig, presentation: Presentation) -> Trained {
    let mut model = Model::new(config);
    let run = harness::train(&mut model, &d.train, presentation).unwrap();
    let result = harness::run_suite(&model, &labels(d), &d.test, Execution::Sequential);
    Trained { model, run, result }
}

// Reference pattern algebra over plain strings.

pub fn ref_equal(a: &[String], b: &[String]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for i in 0..a.len() {
        if a[i] != b[i] {
            return false;
        }
    }
    true
}

pub fn ref_matches(a: &[String], b: &[String]) -> bool {
    // a is one of the prefixes of b
    (0..=b.len()).any(|k| ref_equal(a, &b[..k]))
}

pub fn ref_difference(a: &[String], b: &[String]) -> Vec<String> {
    let mut k = a.len().min(b.len());
    while k > 0 && !ref_equal(&a[..k], &b[..k]) {
        k -= 1;
    }
    a[k..].to_vec()
}

pub fn random_tokens(rng: &mut ChaCha8Rng, alphabet: usize, max_len: usize) -> Vec<String> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| ((b'a' + rng.random_range(0..alphabet) as u8) as char).to_string()).collect()
}

// Exact binomial tail with rationals.

fn choose(n: u64, k: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

pub fn exact_at_least(n: u64, k: u64, p: &BigRational) -> f64 {
    let q = BigRational::one() - p;
    let mut sum = BigRational::zero();
    for i in k..=n {
        let term = BigRational::from_integer(choose(n, i)) * pow(p, i) * pow(&q, n - i);
        sum += term;
    }
    sum.to_f64().unwrap()
}

/// Every upper tail `P(X >= k)` for `k` in `0..=n`, exactly.
pub fn exact_tails(n: u64, p: &BigRational) -> Vec<f64> {
    let q = BigRational::one() - p;
    let mut terms = Vec::with_capacity(n as usize + 1);
    let mut term = pow(&q, n);
    for i in 0..=n {
        terms.push(term.clone());
        if i < n {
            term = term * BigRational::from_integer(BigInt::from(n - i)) * p
                / (BigRational::from_integer(BigInt::from(i + 1)) * &q);
        }
    }
    let mut tails = vec![0.0; terms.len()];
    let mut sum = BigRational::zero();
    for i in (0..terms.len()).rev() {
        sum += &terms[i];
        tails[i] = sum.to_f64().unwrap();
    }
    tails
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

// Occluded stimuli.

/// Letters absent from both trained names.
pub const NOISE: &[char] = &['z', 'x', 'q', 'j', 'k', 'w', 'y', 'b', 'd', 'f', 'g', 'u'];

/// `word` with between one and `word.len()` noise letters inserted at random
/// positions, so noise is at most half the stimulus.
pub fn occlude(rng: &mut ChaCha8Rng, word: &str) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let noise = rng.random_range(1..=chars.len());
    for _ in 0..noise {
        let at = rng.random_range(0..=chars.len());
        chars.insert(at, NOISE[rng.random_range(0..NOISE.len())]);
    }
    chars.into_iter().collect()
}
