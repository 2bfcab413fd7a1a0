//! Human versus model comparison metrics and their significance.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attention::Classification;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("classification has no activation; the item cannot be scored")]
    Unclassifiable,
    #[error("invalid binomial query: {0}")]
    InvalidQuery(String),
    #[error("unknown {kind} {value:?}")]
    Unknown { kind: &'static str, value: String },
    #[error("prediction pair repeats {0:?} as top and second")]
    RepeatedLabel(String),
    #[error("fixture: {0}")]
    Fixture(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// A ranked top-two prediction; `second` is absent for single-label answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub top: String,
    pub second: Option<String>,
}

impl PredictionPair {
    pub fn new(top: impl Into<String>, second: Option<impl Into<String>>) -> Result<Self, MetricsError> {
        let top = top.into();
        let second = second.map(Into::into);
        if second.as_deref() == Some(top.as_str()) {
            return Err(MetricsError::RepeatedLabel(top));
        }
        Ok(PredictionPair { top, second })
    }

    pub fn single(top: impl Into<String>) -> Self {
        PredictionPair { top: top.into(), second: None }
    }

    pub fn pair(top: impl Into<String>, second: impl Into<String>) -> Result<Self, MetricsError> {
        PredictionPair::new(top, Some(second.into()))
    }

    fn slots(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.top.as_str()).chain(self.second.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Identical,
    BothMatch,
    TopsMatch,
    OneMatchesTop,
    SingleMatch,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::Identical, Metric::BothMatch, Metric::TopsMatch, Metric::OneMatchesTop, Metric::SingleMatch];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Identical => "identical",
            Metric::BothMatch => "both_match",
            Metric::TopsMatch => "tops_match",
            Metric::OneMatchesTop => "one_matches_top",
            Metric::SingleMatch => "single_match",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MetricsError::Unknown { kind: "metric", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MetricRow {
    pub identical: bool,
    pub both_match: bool,
    pub tops_match: bool,
    pub one_matches_top: bool,
    pub single_match: bool,
}

impl MetricRow {
    pub fn get(&self, m: Metric) -> bool {
        match m {
            Metric::Identical => self.identical,
            Metric::BothMatch => self.both_match,
            Metric::TopsMatch => self.tops_match,
            Metric::OneMatchesTop => self.one_matches_top,
            Metric::SingleMatch => self.single_match,
        }
    }

    pub fn as_array(&self) -> [bool; 5] {
        Metric::ALL.map(|m| self.get(m))
    }

    pub fn from_array(v: [bool; 5]) -> Self {
        MetricRow { identical: v[0], both_match: v[1], tops_match: v[2], one_matches_top: v[3], single_match: v[4] }
    }

    /// identical <= both_match <= single_match and
    /// identical <= tops_match <= one_matches_top <= single_match.
    pub fn is_monotone(&self) -> bool {
        let le = |a: bool, b: bool| !a || b;
        le(self.identical, self.both_match)
            && le(self.both_match, self.single_match)
            && le(self.identical, self.tops_match)
            && le(self.tops_match, self.one_matches_top)
            && le(self.one_matches_top, self.single_match)
    }
}

/// Scores a model prediction against a human one. Absent seconds never match.
pub fn score_pair(human: &PredictionPair, model: &PredictionPair) -> MetricRow {
    let both_seconds = human.second.is_some() && model.second.is_some();
    MetricRow {
        identical: both_seconds && human.top == model.top && human.second == model.second,
        both_match: both_seconds
            && ((human.top == model.top && human.second == model.second)
                || (Some(&human.top) == model.second.as_ref() && human.second.as_ref() == Some(&model.top))),
        tops_match: human.top == model.top,
        one_matches_top: model.slots().any(|m| m == human.top),
        single_match: human.slots().any(|h| model.slots().any(|m| m == h)),
    }
}

/// Top two labels with positive confidence, in ranking order.
pub fn extract_pair(c: &Classification) -> Result<PredictionPair, MetricsError> {
    let top2 = c.top2();
    match top2.as_slice() {
        [] => Err(MetricsError::Unclassifiable),
        [a] => Ok(PredictionPair::single(a.label.name.clone())),
        [a, b, ..] => PredictionPair::pair(a.label.name.clone(), b.label.name.clone()),
    }
}

fn check_query(n: u64, k: u64, p: f64) -> Result<(), MetricsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricsError::InvalidQuery(format!("p = {p} outside [0, 1]")));
    }
    if k > n {
        return Err(MetricsError::InvalidQuery(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// ln of each binomial term `C(n,i) p^i (1-p)^(n-i)` for `i in 0..=n`.
fn log_terms(n: u64, p: f64) -> Vec<f64> {
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut ln_choose = 0.0;
    let mut out = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        let a = if i == 0 { 0.0 } else { i as f64 * lp };
        let b = if i == n { 0.0 } else { (n - i) as f64 * lq };
        out.push(ln_choose + a + b);
    }
    out
}

/// P(X = k) for X ~ Binomial(n, p).
pub fn binomial_exactly(n: u64, k: u64, p: f64) -> Result<f64, MetricsError> {
    check_query(n, k, p)?;
    Ok(log_terms(n, p)[k as usize].exp())
}

/// P(X >= k) for X ~ Binomial(n, p), summed in log space.
pub fn binomial_at_least(n: u64, k: u64, p: f64) -> Result<f64, MetricsError> {
    check_query(n, k, p)?;
    if k == 0 || p == 1.0 {
        return Ok(1.0);
    }
    let terms = &log_terms(n, p)[k as usize..];
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok((max + sum.ln()).exp().min(1.0))
}

pub fn bonferroni(alpha: f64, hypotheses: u32) -> Result<f64, MetricsError> {
    if hypotheses == 0 {
        return Err(MetricsError::InvalidQuery("hypothesis count must be at least 1".into()));
    }
    Ok(alpha / f64::from(hypotheses))
}

/// How a random responder fills the two prediction slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChanceRule {
    /// Top and second drawn independently and uniformly from all labels.
    #[default]
    IndependentUniform,
    /// Uniform over ordered pairs of distinct labels.
    DistinctPairs,
}

impl FromStr for ChanceRule {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "independent_uniform" => Ok(ChanceRule::IndependentUniform),
            "distinct_pairs" => Ok(ChanceRule::DistinctPairs),
            other => Err(MetricsError::Unknown { kind: "chance rule", value: other.to_string() }),
        }
    }
}

/// Exact chance of `metric` matching a fixed two-label human answer, as a
/// fraction `(hits, outcomes)`, by enumerating every random model answer.
pub fn chance_fraction(metric: Metric, label_count: u32, rule: ChanceRule) -> Result<(u64, u64), MetricsError> {
    if label_count < 2 {
        return Err(MetricsError::InvalidQuery("label_count must be at least 2".into()));
    }
    let (h1, h2) = (0u32, 1u32);
    let (mut hits, mut total) = (0u64, 0u64);
    for top in 0..label_count {
        for second in 0..label_count {
            if rule == ChanceRule::DistinctPairs && top == second {
                continue;
            }
            total += 1;
            let hit = match metric {
                Metric::Identical => top == h1 && second == h2,
                Metric::BothMatch => (top == h1 && second == h2) || (top == h2 && second == h1),
                Metric::TopsMatch => top == h1,
                Metric::OneMatchesTop => top == h1 || second == h1,
                Metric::SingleMatch => [top, second].iter().any(|m| *m == h1 || *m == h2),
            };
            hits += u64::from(hit);
        }
    }
    Ok((hits, total))
}

pub fn chance_probability(metric: Metric, label_count: u32, rule: ChanceRule) -> Result<f64, MetricsError> {
    let (hits, total) = chance_fraction(metric, label_count, rule)?;
    Ok(hits as f64 / total as f64)
}

/// One transcribed comparison between a participant and the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureRow {
    pub participant: String,
    pub category: String,
    pub excerpt: String,
    pub labels: Vec<String>,
    pub human: PredictionPair,
    pub model: PredictionPair,
    /// The metric booleans as published.
    pub published: MetricRow,
    /// Whether `published` equals `score_pair(human, model)`.
    pub recomputed_agrees: bool,
}

#[derive(Debug, Deserialize)]
struct RawFixtureRow {
    participant: String,
    category: String,
    excerpt: String,
    labels: String,
    human_top: String,
    human_second: String,
    model_top: String,
    model_second: String,
    identical: u8,
    both_match: u8,
    tops_match: u8,
    one_matches_top: u8,
    single_match: u8,
    recomputed_agrees: u8,
}

fn opt(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

fn flag(v: u8, what: &str) -> Result<bool, MetricsError> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(MetricsError::Fixture(format!("{what} must be 0 or 1, got {v}"))),
    }
}

pub fn read_fixture<R: Read>(reader: R) -> Result<Vec<FixtureRow>, MetricsError> {
    let mut rows = Vec::new();
    for raw in csv::Reader::from_reader(reader).deserialize::<RawFixtureRow>() {
        let r = raw?;
        let published = MetricRow::from_array([
            flag(r.identical, "identical")?,
            flag(r.both_match, "both_match")?,
            flag(r.tops_match, "tops_match")?,
            flag(r.one_matches_top, "one_matches_top")?,
            flag(r.single_match, "single_match")?,
        ]);
        rows.push(FixtureRow {
            human: PredictionPair::new(r.human_top, opt(r.human_second))?,
            model: PredictionPair::new(r.model_top, opt(r.model_second))?,
            participant: r.participant,
            category: r.category,
            excerpt: r.excerpt,
            labels: r.labels.split(';').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            published,
            recomputed_agrees: flag(r.recomputed_agrees, "recomputed_agrees")?,
        });
    }
    if rows.is_empty() {
        return Err(MetricsError::Fixture("fixture has no rows".into()));
    }
    Ok(rows)
}

pub fn load_fixture(path: &std::path::Path) -> Result<Vec<FixtureRow>, MetricsError> {
    read_fixture(std::fs::File::open(path)?)
}

#[derive(Debug, Deserialize)]
struct RawModelRow {
    participant: String,
    excerpt: String,
    top: String,
    #[serde(default)]
    second: String,
}

/// Replaces fixture model pairs with predictions read from a CSV with
/// columns `participant,excerpt,top,second`. Published booleans are dropped
/// in favour of freshly scored ones.
pub fn apply_model_results<R: Read>(rows: &mut [FixtureRow], reader: R) -> Result<(), MetricsError> {
    let mut preds = BTreeMap::new();
    for raw in csv::Reader::from_reader(reader).deserialize::<RawModelRow>() {
        let r = raw?;
        preds.insert((r.participant, r.excerpt), PredictionPair::new(r.top, opt(r.second))?);
    }
    for row in rows.iter_mut() {
        let key = (row.participant.clone(), row.excerpt.clone());
        let pred = preds
            .remove(&key)
            .ok_or_else(|| MetricsError::Fixture(format!("no model prediction for {} / {}", key.0, key.1)))?;
        row.model = pred;
        row.published = score_pair(&row.human, &row.model);
        row.recomputed_agrees = true;
    }
    Ok(())
}

pub type Totals = [u64; 5];

fn add(t: &mut Totals, r: &MetricRow) {
    for (slot, v) in t.iter_mut().zip(r.as_array()) {
        *slot += u64::from(v);
    }
}

/// Per-metric sums of the published rows.
pub fn published_totals(rows: &[FixtureRow]) -> Totals {
    let mut t = [0; 5];
    rows.iter().for_each(|r| add(&mut t, &r.published));
    t
}

/// Per-metric sums recomputed from the prediction pairs.
pub fn recomputed_totals(rows: &[FixtureRow]) -> Totals {
    let mut t = [0; 5];
    rows.iter().for_each(|r| add(&mut t, &score_pair(&r.human, &r.model)));
    t
}

/// Published totals per participant, in first-appearance order.
pub fn participant_totals(rows: &[FixtureRow]) -> Vec<(String, Totals)> {
    let mut out: Vec<(String, Totals)> = Vec::new();
    for r in rows {
        let pos = match out.iter().position(|(p, _)| *p == r.participant) {
            Some(i) => i,
            None => {
                out.push((r.participant.clone(), [0; 5]));
                out.len() - 1
            }
        };
        add(&mut out[pos].1, &r.published);
    }
    out
}

/// Per-row CSV: participant, excerpt and the five metric columns.
pub fn write_metrics_csv<W: Write>(rows: &[FixtureRow], out: W) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["participant", "excerpt"];
    header.extend(Metric::ALL.map(Metric::as_str));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.participant.clone(), r.excerpt.clone()];
        rec.extend(r.published.as_array().map(|b| u8::from(b).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceLine {
    pub metric: Metric,
    pub total: u64,
    pub n: u64,
    pub p: f64,
    pub tail: f64,
    pub threshold: f64,
    pub significant: bool,
}

/// Tail probability of each metric total under the chance model, judged
/// against a Bonferroni-adjusted threshold over the five metrics.
pub fn significance_report(
    totals: &Totals,
    n: u64,
    label_count: u32,
    rule: ChanceRule,
    alpha: f64,
) -> Result<Vec<SignificanceLine>, MetricsError> {
    let threshold = bonferroni(alpha, Metric::ALL.len() as u32)?;
    Metric::ALL
        .iter()
        .zip(totals)
        .map(|(&metric, &total)| {
            let p = chance_probability(metric, label_count, rule)?;
            let tail = binomial_at_least(n, total.min(n), p)?;
            Ok(SignificanceLine { metric, total, n, p, tail, threshold, significant: tail < threshold })
        })
        .collect()
}

pub fn format_report(lines: &[SignificanceLine]) -> String {
    let mut out = format!(
        "{:<16} {:>6} {:>5} {:>8} {:>12} {:>10} {}\n",
        "metric", "total", "n", "p", "P(>=total)", "threshold", "verdict"
    );
    for l in lines {
        out.push_str(&format!(
            "{:<16} {:>6} {:>5} {:>8.5} {:>12.6e} {:>10.4} {}\n",
            l.metric.as_str(),
            l.total,
            l.n,
            l.p,
            l.tail,
            l.threshold,
            if l.significant { "significant" } else { "not significant" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attention::{Label, Scored};
    use crate::ltm::NodeId;
    use proptest::prelude::*;

    fn pp(top: &str, second: Option<&str>) -> PredictionPair {
        PredictionPair::new(top, second).unwrap()
    }

    fn bits(r: MetricRow) -> [u8; 5] {
        r.as_array().map(u8::from)
    }

    #[test]
    fn score_examples() {
        let h = pp("Bach", Some("Beethoven"));
        assert_eq!(bits(score_pair(&h, &h)), [1, 1, 1, 1, 1]);
        let h = pp("Bach", Some("Mozart"));
        assert_eq!(bits(score_pair(&h, &pp("Mozart", Some("Bach")))), [0, 1, 0, 1, 1]);
        assert_eq!(bits(score_pair(&h, &pp("Haydn", Some("Schubert")))), [0; 5]);
        // an absent second never matches
        assert_eq!(bits(score_pair(&pp("Bach", None), &pp("Bach", None))), [0, 0, 1, 1, 1]);
        assert_eq!(bits(score_pair(&pp("Bach", None), &pp("Mozart", Some("Bach")))), [0, 0, 0, 1, 1]);
    }

    #[test]
    fn one_matches_top_is_directed() {
        let h = pp("A", Some("B"));
        let m = pp("B", Some("C"));
        assert!(!score_pair(&h, &m).one_matches_top);
        assert!(score_pair(&m, &h).one_matches_top);
    }

    #[test]
    fn pair_rejects_repeat() {
        assert!(PredictionPair::pair("A", "A").is_err());
    }

    fn classification(scores: &[(&str, f64)]) -> Classification {
        Classification {
            ranked: scores
                .iter()
                .enumerate()
                .map(|(i, (n, c))| Scored {
                    label: Label { node: NodeId(i as u32 + 1), name: n.to_string() },
                    activation: *c,
                    confidence: *c,
                })
                .collect(),
        }
    }

    #[test]
    fn extract_examples() {
        let c = classification(&[("Mozart", 0.6), ("Beethoven", 0.3), ("Bach", 0.1)]);
        assert_eq!(extract_pair(&c).unwrap(), pp("Mozart", Some("Beethoven")));
        let c = classification(&[("X", 1.0), ("Y", 0.0)]);
        assert_eq!(extract_pair(&c).unwrap(), pp("X", None));
        let c = classification(&[("P", 0.5), ("Q", 0.5)]);
        assert_eq!(extract_pair(&c).unwrap(), pp("P", Some("Q")));
        assert!(matches!(extract_pair(&Classification::no_activation()), Err(MetricsError::Unclassifiable)));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_at_least(1, 1, 0.5).unwrap(), 0.5);
        assert!((binomial_at_least(2, 1, 0.5).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(binomial_at_least(5, 0, 0.3).unwrap(), 1.0);
        assert_eq!(binomial_at_least(5, 1, 0.0).unwrap(), 0.0);
        assert_eq!(binomial_at_least(5, 5, 1.0).unwrap(), 1.0);
        assert!((binomial_exactly(4, 2, 0.5).unwrap() - 0.375).abs() < 1e-15);
        assert!(binomial_at_least(3, 4, 0.5).is_err());
        assert!(binomial_at_least(3, 1, 1.5).is_err());
    }

    #[test]
    fn bonferroni_examples() {
        assert_eq!(bonferroni(0.05, 5).unwrap(), 0.01);
        assert_eq!(bonferroni(0.05, 1).unwrap(), 0.05);
        assert_eq!(bonferroni(0.01, 2).unwrap(), 0.005);
        assert!(bonferroni(0.05, 0).is_err());
    }

    #[test]
    fn chance_values() {
        use ChanceRule::*;
        let want_ind = [(1, 16), (2, 16), (4, 16), (7, 16), (12, 16)];
        let want_dis = [(1, 12), (2, 12), (3, 12), (6, 12), (10, 12)];
        for (i, m) in Metric::ALL.into_iter().enumerate() {
            assert_eq!(chance_fraction(m, 4, IndependentUniform).unwrap(), want_ind[i]);
            assert_eq!(chance_fraction(m, 4, DistinctPairs).unwrap(), want_dis[i]);
        }
        assert_eq!(chance_probability(Metric::Identical, 4, IndependentUniform).unwrap(), 1.0 / 16.0);
        assert!(chance_probability(Metric::Identical, 1, IndependentUniform).is_err());
        assert!("uniform".parse::<ChanceRule>().is_err());
    }

    #[test]
    fn fixture_parsing() {
        let text = "participant,category,excerpt,labels,human_top,human_second,model_top,model_second,identical,both_match,tops_match,one_matches_top,single_match,recomputed_agrees\n\
                    XY,Bach,piece,Bach;Mozart,Bach,Mozart,Bach,Mozart,1,1,1,1,1,1\n";
        let rows = read_fixture(text.as_bytes()).unwrap();
        assert_eq!(rows[0].labels, ["Bach", "Mozart"]);
        assert_eq!(published_totals(&rows), [1; 5]);
        assert_eq!(recomputed_totals(&rows), [1; 5]);
        let header_only = text.lines().next().unwrap();
        assert!(read_fixture(header_only.as_bytes()).is_err());

        let mut rows = rows;
        apply_model_results(&mut rows, "participant,excerpt,top,second\nXY,piece,Mozart,\n".as_bytes()).unwrap();
        assert_eq!(published_totals(&rows), [0, 0, 0, 0, 1]);
    }

    fn arb_pair() -> impl Strategy<Value = PredictionPair> {
        (0u8..5, proptest::option::of(0u8..5)).prop_filter_map("distinct", |(t, s)| {
            if s == Some(t) {
                return None;
            }
            Some(PredictionPair { top: format!("L{t}"), second: s.map(|s| format!("L{s}")) })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn stringency_chain_and_symmetry(h in arb_pair(), m in arb_pair()) {
            let a = score_pair(&h, &m);
            let b = score_pair(&m, &h);
            prop_assert!(a.is_monotone());
            prop_assert_eq!(a.identical, b.identical);
            prop_assert_eq!(a.both_match, b.both_match);
            prop_assert_eq!(a.tops_match, b.tops_match);
            prop_assert_eq!(a.single_match, b.single_match);
        }
    }
}
