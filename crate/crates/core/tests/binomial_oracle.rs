mod common;

use chunkcat::metrics::{binomial_at_least, binomial_exactly, bonferroni};
use common::{exact_at_least, exact_tails, ratio};

#[test]
fn tail_matches_rational_oracle() {
    let probs = [(1, 16), (1, 12), (1, 4), (7, 16), (1, 2), (5, 6)];
    let mut worst: f64 = 0.0;
    for n in [1u64, 2, 5, 17, 40, 60, 99, 122] {
        for &(num, den) in &probs {
            let p = num as f64 / den as f64;
            let tails = exact_tails(n, &ratio(num, den));
            for k in 0..=n {
                let want = tails[k as usize];
                let got = binomial_at_least(n, k, p).unwrap();
                worst = worst.max((got - want).abs());
            }
        }
    }
    assert!(worst < 1e-12, "worst absolute error {worst:e}");
}

#[test]
fn point_mass_matches_difference_of_tails() {
    let tails = exact_tails(30, &ratio(1, 3));
    for k in 0..=30u64 {
        let a = tails[k as usize];
        let b = tails.get(k as usize + 1).copied().unwrap_or(0.0);
        assert!((binomial_exactly(30, k, 1.0 / 3.0).unwrap() - (a - b)).abs() < 1e-12);
    }
}

#[test]
fn significance_values() {
    let tail = binomial_at_least(122, 15, 1.0 / 16.0).unwrap();
    assert!((tail - exact_at_least(122, 15, &ratio(1, 16))).abs() < 1e-12);
    let tails = exact_tails(122, &ratio(1, 16));
    assert_eq!(tails[15].to_bits(), exact_at_least(122, 15, &ratio(1, 16)).to_bits());
    assert_eq!(bonferroni(0.05, 5).unwrap(), 0.01);
}
