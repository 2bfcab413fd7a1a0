//! Training to convergence, suite evaluation, seed sweeps and run
//! directories.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attention::{AttentionError, Classification};
use crate::config::{ConfigError, RunConfig};
use crate::corpus::{CorpusError, Dataset, Sample, TestItem};
use crate::exec::Execution;
use crate::ltm::{LearnKind, LtmError};
use crate::metrics::{self, MetricsError};
use crate::model::{Feature, Model};
use crate::pattern::Modality;
use crate::snapshot::{self, InputSpec, SnapshotError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ltm(#[from] LtmError),
    #[error(transparent)]
    Attention(#[from] AttentionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error("node count {nodes} exceeded the ceiling of {ceiling} in epoch {epoch}; training aborted")]
    NodeCeiling { epoch: usize, nodes: usize, ceiling: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

/// Order of samples within an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presentation {
    /// Reshuffled every epoch from the run seed.
    #[default]
    Shuffled,
    /// Dataset order, every epoch.
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub created_node: u64,
    pub familiarised: u64,
    pub no_change: u64,
    /// Changes withheld by the chunk-probability gate.
    pub deferred: u64,
}

impl EventCounts {
    fn record(&mut self, kind: LearnKind) {
        match kind {
            LearnKind::CreatedNode => self.created_node += 1,
            LearnKind::Familiarised => self.familiarised += 1,
            LearnKind::NoChange => self.no_change += 1,
        }
    }

    pub fn structural(&self) -> u64 {
        self.created_node + self.familiarised
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRun {
    pub seed: u64,
    pub presentation: Presentation,
    pub samples: usize,
    pub training_tokens: usize,
    pub epoch_count: usize,
    pub events: EventCounts,
    /// Structural events per epoch.
    pub epoch_structural: Vec<u64>,
    pub links_formed: u64,
    pub simulated_time_seconds: u64,
    pub converged: bool,
    pub node_counts: BTreeMap<Modality, usize>,
    pub naming_links: u64,
}

impl TrainingRun {
    /// Epochs whose structural event count rose over the previous epoch.
    pub fn non_monotone_epochs(&self) -> Vec<usize> {
        self.epoch_structural.windows(2).enumerate().filter(|(_, w)| w[1] > w[0]).map(|(i, _)| i + 2).collect()
    }
}

/// Presents `samples` epoch by epoch until an epoch makes no structural
/// change, `max_epochs` is reached, or the node ceiling is exceeded.
pub fn train(model: &mut Model, samples: &[Sample], presentation: Presentation) -> Result<TrainingRun, HarnessError> {
    let tokens: usize = samples.iter().map(|s| s.visual.len() + s.label.len()).sum();
    let ceiling = model.config().node_ceiling_factor.saturating_mul(tokens.max(1)) + Modality::ALL.len();
    train_bounded(model, samples, presentation, ceiling)
}

/// [`train`] with an explicit node ceiling.
pub fn train_bounded(
    model: &mut Model,
    samples: &[Sample],
    presentation: Presentation,
    ceiling: usize,
) -> Result<TrainingRun, HarnessError> {
    let cfg = model.config().clone();
    let tokens: usize = samples.iter().map(|s| s.visual.len() + s.label.len()).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut run = TrainingRun {
        seed: cfg.seed,
        presentation,
        samples: samples.len(),
        training_tokens: tokens,
        epoch_count: 0,
        events: EventCounts::default(),
        epoch_structural: Vec::new(),
        links_formed: 0,
        simulated_time_seconds: 0,
        converged: false,
        node_counts: BTreeMap::new(),
        naming_links: 0,
    };
    for epoch in 1..=cfg.max_epochs {
        if presentation == Presentation::Shuffled {
            order.shuffle(&mut rng);
        }
        let mut counts = EventCounts::default();
        for &i in &order {
            let (ev, deferred) = model.train_sample(&samples[i])?;
            counts.record(ev.visual.kind);
            counts.record(ev.verbal.kind);
            counts.deferred += deferred as u64;
            run.links_formed += ev.links as u64;
        }
        run.epoch_count = epoch;
        run.epoch_structural.push(counts.structural());
        run.events.created_node += counts.created_node;
        run.events.familiarised += counts.familiarised;
        run.events.no_change += counts.no_change;
        run.events.deferred += counts.deferred;
        if model.node_count() > ceiling {
            return Err(HarnessError::NodeCeiling { epoch, nodes: model.node_count(), ceiling });
        }
        if counts.structural() == 0 && counts.deferred == 0 {
            run.converged = true;
            break;
        }
    }
    run.simulated_time_seconds = model.simulated_time_seconds();
    run.node_counts = model.nets().iter().map(|(m, n)| (*m, n.node_count())).collect();
    run.naming_links = model.visual().naming_link_total();
    Ok(run)
}

/// Returns a copy of `model` with `feature` disabled for later training.
pub fn ablate(model: &Model, feature: Feature) -> Model {
    let mut m = model.clone();
    m.ablate(feature);
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub id: String,
    pub stimulus: String,
    pub expected: String,
    pub classification: Classification,
    pub predicted: Option<String>,
    pub correct: bool,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub labels: Vec<String>,
    pub rows: Vec<SuiteRow>,
    pub correct_count: usize,
    pub total: usize,
    pub chance_baseline: f64,
}

impl SuiteResult {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct_count as f64 / self.total as f64
        }
    }

    /// One-sided binomial tail of the correct count against uniform guessing.
    pub fn chance_tail(&self) -> Result<f64, MetricsError> {
        let p = 1.0 / self.labels.len().max(1) as f64;
        metrics::binomial_at_least(self.total as u64, self.correct_count as u64, p)
    }
}

/// Categorises every test item; items are independent and run under `exec`.
pub fn run_suite(model: &Model, labels: &[String], tests: &[TestItem], exec: Execution) -> SuiteResult {
    let rows = exec.map(tests, |t| {
        let classification = model.categorise(&t.stimulus).unwrap_or_else(|_| Classification::no_activation());
        let predicted = classification.top().map(|s| s.label.name.clone());
        SuiteRow {
            id: t.id.clone(),
            stimulus: t.stimulus.to_line(),
            expected: t.label.clone(),
            correct: predicted.as_deref() == Some(t.label.as_str()),
            tie: classification.has_top_tie(),
            predicted,
            classification,
        }
    });
    let correct_count = rows.iter().filter(|r| r.correct).count();
    SuiteResult {
        labels: labels.to_vec(),
        total: rows.len(),
        chance_baseline: rows.len() as f64 / labels.len().max(1) as f64,
        rows,
        correct_count,
    }
}

/// Results CSV: id, stimulus, expected, one confidence column per label,
/// predicted, correct, tie.
pub fn write_results_csv<W: Write>(result: &SuiteResult, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "stimulus".into(), "expected".into()];
    header.extend(result.labels.iter().cloned());
    header.extend(["predicted".into(), "correct".into(), "tie".into()]);
    w.write_record(&header)?;
    for r in &result.rows {
        let mut rec = vec![r.id.clone(), r.stimulus.clone(), r.expected.clone()];
        rec.extend(result.labels.iter().map(|l| format!("{:.6}", r.classification.confidence_of(l))));
        rec.push(r.predicted.clone().unwrap_or_else(|| "no-activation".into()));
        rec.push(r.correct.to_string());
        rec.push(r.tie.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn format_results_table(result: &SuiteResult) -> String {
    let id_w = result.rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = format!("{:<id_w$} {:<10}", "id", "expected");
    for l in &result.labels {
        let _ = write!(out, " {:>9}", l);
    }
    out.push_str("  predicted\n");
    for r in &result.rows {
        let _ = write!(out, "{:<id_w$} {:<10}", r.id, r.expected);
        for l in &result.labels {
            let _ = write!(out, " {:>9.3}", r.classification.confidence_of(l));
        }
        let mark = if r.correct { "" } else { "  x" };
        let tie = if r.tie { " (tie)" } else { "" };
        let _ = writeln!(out, "  {}{}{}", r.predicted.as_deref().unwrap_or("no-activation"), tie, mark);
    }
    let _ = writeln!(out, "correct {}/{} (chance {:.1})", result.correct_count, result.total, result.chance_baseline);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anchor {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Acceptance checks for a named suite. Unknown suites must beat chance at
/// the Bonferroni-adjusted 0.01 level.
pub fn check_anchors(suite: &str, result: &SuiteResult) -> Vec<Anchor> {
    let mut out = Vec::new();
    match suite {
        "xor" => {
            let exact =
                result.rows.iter().all(|r| r.correct && r.classification.top().is_some_and(|s| s.confidence == 1.0));
            out.push(Anchor {
                name: "xor truth table".into(),
                passed: exact && result.total == 4,
                detail: format!("{}/{} correct at confidence 1.0", result.correct_count, result.total),
            });
        }
        "five_four" => {
            let row = result.rows.iter().find(|r| r.stimulus == "1 0 0 0");
            let got = row.and_then(|r| r.predicted.clone()).unwrap_or_else(|| "missing".into());
            out.push(Anchor { name: "1000 -> A".into(), passed: got == "A", detail: format!("got {got}") });
        }
        "occlusion" => {
            out.push(Anchor {
                name: "occluded names".into(),
                passed: result.total > 0 && result.correct_count == result.total,
                detail: format!("{}/{} correct", result.correct_count, result.total),
            });
        }
        _ => {
            let tail = result.chance_tail().unwrap_or(1.0);
            let threshold = metrics::bonferroni(0.05, 5).unwrap_or(0.01);
            out.push(Anchor {
                name: "above chance".into(),
                passed: tail < threshold,
                detail: format!(
                    "{}/{} correct, P(>= k | chance) = {tail:.3e}, threshold {threshold}",
                    result.correct_count, result.total
                ),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepItem {
    pub id: String,
    pub stimulus: String,
    pub reference: String,
    pub counts: BTreeMap<String, usize>,
    pub modal: String,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub seeds: Vec<u64>,
    pub converged_runs: usize,
    pub items: Vec<SweepItem>,
    pub agreement: usize,
}

impl SweepReport {
    pub fn format_table(&self) -> String {
        let mut out = format!("{} seeds, {} converged\n", self.seeds.len(), self.converged_runs);
        let _ = writeln!(out, "{:<12} {:<9} {:<6} counts", "stimulus", "reference", "modal");
        for it in &self.items {
            let counts: Vec<String> = it.counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(
                out,
                "{:<12} {:<9} {:<6} {}{}",
                it.stimulus,
                it.reference,
                it.modal,
                counts.join(" "),
                if it.agrees { "" } else { "  (differs)" }
            );
        }
        let _ = writeln!(out, "agreement {}/{}", self.agreement, self.items.len());
        out
    }
}

/// Trains one model per seed with shuffled presentation and reports each
/// test item's modal label against the expected one. Seeds run under `exec`.
pub fn seed_sweep(
    dataset: &Dataset,
    config: &RunConfig,
    seeds: &[u64],
    exec: Execution,
) -> Result<SweepReport, HarnessError> {
    let labels = dataset.manifest.labels().iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let runs = exec.try_map(seeds, |&seed| -> Result<(bool, Vec<Option<String>>), HarnessError> {
        let mut model = Model::new(RunConfig { seed, ..config.clone() });
        let run = train(&mut model, &dataset.train, Presentation::Shuffled)?;
        let result = run_suite(&model, &labels, &dataset.test, Execution::Sequential);
        Ok((run.converged, result.rows.into_iter().map(|r| r.predicted).collect()))
    })?;
    let converged_runs = runs.iter().filter(|(c, _)| *c).count();
    let items: Vec<SweepItem> = dataset
        .test
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for (_, preds) in &runs {
                let l = preds[i].clone().unwrap_or_else(|| "-".into());
                *counts.entry(l).or_default() += 1;
            }
            // highest count; ties go to manifest label order
            let rank = |l: &str| labels.iter().position(|x| x == l).unwrap_or(usize::MAX);
            let modal = counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(rank(b.0).cmp(&rank(a.0))))
                .map(|(l, _)| l.clone())
                .unwrap_or_default();
            SweepItem {
                id: t.id.clone(),
                stimulus: t.stimulus.to_line(),
                reference: t.label.clone(),
                agrees: modal == t.label,
                counts,
                modal,
            }
        })
        .collect();
    let agreement = items.iter().filter(|i| i.agrees).count();
    Ok(SweepReport { seeds: seeds.to_vec(), converged_runs, items, agreement })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary<'a> {
    pub suite: &'a str,
    pub training: &'a TrainingRun,
    pub correct_count: usize,
    pub total: usize,
    pub chance_baseline: f64,
    pub model_digest: String,
}

/// Writes `config.toml`, `model.json`, `results.csv`, `run.log` and
/// `run.json` into `dir` and returns the model digest.
pub fn write_run_dir(
    dir: &Path,
    suite: &str,
    model: &Model,
    input: Option<InputSpec>,
    run: &TrainingRun,
    result: Option<&SuiteResult>,
) -> Result<String, HarnessError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let cfg_path = dir.join("config.toml");
    std::fs::write(&cfg_path, model.config().to_toml()).map_err(io_err(&cfg_path))?;
    let digest = snapshot::save(model, input, &dir.join("model.json"))?;
    if let Some(result) = result {
        let path = dir.join("results.csv");
        let f = std::fs::File::create(&path).map_err(io_err(&path))?;
        write_results_csv(result, f)
            .map_err(|e| HarnessError::Io { path: path.display().to_string(), source: e.into() })?;
    }
    let log_path = dir.join("run.log");
    std::fs::write(&log_path, run_log(suite, run, result, &digest)).map_err(io_err(&log_path))?;
    let summary = RunSummary {
        suite,
        training: run,
        correct_count: result.map_or(0, |r| r.correct_count),
        total: result.map_or(0, |r| r.total),
        chance_baseline: result.map_or(0.0, |r| r.chance_baseline),
        model_digest: digest.clone(),
    };
    let json_path = dir.join("run.json");
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serialises");
    json.push('\n');
    std::fs::write(&json_path, json).map_err(io_err(&json_path))?;
    Ok(digest)
}

pub fn run_log(suite: &str, run: &TrainingRun, result: Option<&SuiteResult>, digest: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suite {suite}");
    let _ = writeln!(out, "seed {}", run.seed);
    let _ = writeln!(out, "presentation {:?}", run.presentation);
    let _ = writeln!(out, "samples {} tokens {}", run.samples, run.training_tokens);
    let _ = writeln!(out, "epochs {} converged {}", run.epoch_count, run.converged);
    let per_epoch: Vec<String> = run.epoch_structural.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "structural events per epoch {}", per_epoch.join(" "));
    let bumps = run.non_monotone_epochs();
    if !bumps.is_empty() {
        let list: Vec<String> = bumps.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "diagnostic: event count rose in epochs {}", list.join(" "));
    }
    let e = &run.events;
    let _ = writeln!(
        out,
        "events created {} familiarised {} no_change {} deferred {}",
        e.created_node, e.familiarised, e.no_change, e.deferred
    );
    let _ = writeln!(out, "naming links formed {} (table total {})", run.links_formed, run.naming_links);
    let _ = writeln!(out, "simulated time {} s", run.simulated_time_seconds);
    for (m, n) in &run.node_counts {
        let _ = writeln!(out, "nodes {m} {n}");
    }
    if let Some(r) = result {
        let _ = writeln!(out, "correct {}/{} chance {:.2}", r.correct_count, r.total, r.chance_baseline);
    }
    let _ = writeln!(out, "model sha256 {digest}");
    out
}
