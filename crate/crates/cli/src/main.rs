use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::LazyLock;

use anyhow::Context;
use chunkcat::corpus::{CorpusError, Tokenizer};
use chunkcat::harness::{self, HarnessError, Presentation};
use chunkcat::metrics::{self, ChanceRule, MetricsError};
use chunkcat::model::Feature;
use chunkcat::pattern::{self, Modality, Pattern};
use chunkcat::snapshot::{self, InputSpec, SNAPSHOT_SCHEMA_VERSION};
use chunkcat::synth::{self, SynthSpec};
use chunkcat::{Classification, DatasetManifest, DiscriminationNet, Execution, Model, NodeId, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

static VERSION: LazyLock<String> =
    LazyLock::new(|| format!("{} (snapshot schema {SNAPSHOT_SCHEMA_VERSION})", env!("CARGO_PKG_VERSION")));

#[derive(Parser)]
#[command(name = "chunkcat", version = VERSION.as_str(), about = "Chunking category learner")]
struct Cli {
    /// Overrides the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run configuration (TOML). Missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Run data-parallel work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Shuffled,
    Canonical,
}

impl From<Order> for Presentation {
    fn from(o: Order) -> Self {
        match o {
            Order::Shuffled => Presentation::Shuffled,
            Order::Canonical => Presentation::Canonical,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train on a manifest's training files and write a run directory.
    Train {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::Shuffled)]
        presentation: Order,
        /// Continue from this snapshot instead of a fresh model.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Disable a feature before training (stm, naming_links).
        #[arg(long)]
        ablate: Vec<Feature>,
    },
    /// Label stimuli, one per line, from a file or stdin.
    Categorise {
        model: PathBuf,
        /// Input file; stdin when absent or `-`.
        input: Option<PathBuf>,
    },
    /// Print the image each stimulus sorts to.
    Retrieve {
        model: PathBuf,
        input: Option<PathBuf>,
        #[arg(long, default_value = "visual")]
        modality: Modality,
    },
    /// Train, evaluate the test files and write a run directory.
    RunSuite {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::Shuffled)]
        presentation: Order,
        /// Fail unless the suite's acceptance anchors hold.
        #[arg(long)]
        check: bool,
    },
    /// Score prediction pairs and test them against chance.
    Eval {
        fixture: PathBuf,
        /// CSV of model predictions (participant, excerpt, top, second)
        /// replacing the fixture's model pairs.
        #[arg(long)]
        model_results: Option<PathBuf>,
        /// Number of trials; defaults to the fixture's row count.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, default_value_t = 4)]
        labels: u32,
        #[arg(long, default_value = "independent_uniform")]
        chance_rule: ChanceRule,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarise a snapshot; optionally dump networks and STM.
    Inspect {
        model: PathBuf,
        #[arg(long)]
        tree: bool,
        #[arg(long)]
        stm: bool,
    },
    /// Train one model per seed and report modal labels per test item.
    Sweep {
        manifest: PathBuf,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
    },
    /// Write the synthetic two-category corpus.
    GenSynthetic {
        dir: PathBuf,
        #[arg(long, default_value_t = SynthSpec::default().seed)]
        corpus_seed: u64,
        #[arg(long, default_value_t = SynthSpec::default().bytes_per_stream)]
        bytes: usize,
    },
}

/// An error with the process exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_TRAINING: u8 = 3;
const EXIT_NO_ACTIVATION: u8 = 4;

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure { code, error: error.into() }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = if let Some(h) = error.downcast_ref::<HarnessError>() {
            match h {
                HarnessError::Corpus(_) | HarnessError::Config(_) => EXIT_INPUT,
                HarnessError::NodeCeiling { .. } => EXIT_TRAINING,
                _ => EXIT_FAILURE,
            }
        } else if error.is::<CorpusError>()
            || error.is::<chunkcat::config::ConfigError>()
            || error.is::<MetricsError>()
            || error.is::<snapshot::SnapshotError>()
        {
            EXIT_INPUT
        } else {
            EXIT_FAILURE
        };
        Failure { code, error }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    seed: Option<u64>,
    config: Option<PathBuf>,
    format: Format,
    exec: Execution,
}

impl Ctx {
    fn run_config(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).map_err(|e| fail(EXIT_INPUT, e))?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        config: cli.config,
        format: cli.format,
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
    };
    let outcome = match cli.command {
        Command::Train { manifest, out, presentation, init, ablate } => {
            train(&ctx, &manifest, &out, presentation.into(), init.as_deref(), &ablate)
        }
        Command::Categorise { model, input } => categorise(&ctx, &model, input.as_deref()),
        Command::Retrieve { model, input, modality } => retrieve(&model, input.as_deref(), modality),
        Command::RunSuite { manifest, out, presentation, check } => {
            run_suite(&ctx, &manifest, out.as_deref(), presentation.into(), check)
        }
        Command::Eval { fixture, model_results, n, labels, chance_rule, alpha, out } => {
            eval(&ctx, &fixture, model_results.as_deref(), n, labels, chance_rule, alpha, out.as_deref())
        }
        Command::Inspect { model, tree, stm } => inspect(&model, tree, stm),
        Command::Sweep { manifest, seeds, first_seed } => sweep(&ctx, &manifest, first_seed, seeds),
        Command::GenSynthetic { dir, corpus_seed, bytes } => {
            let spec = SynthSpec { seed: corpus_seed, bytes_per_stream: bytes, ..SynthSpec::default() };
            synth::write(&spec, &dir).with_context(|| format!("writing {}", dir.display())).map_err(Failure::from)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", message(&f.error));
            ExitCode::from(f.code)
        }
    }
}

/// The error and its causes, skipping causes its message already quotes.
fn message(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn load_manifest(path: &Path) -> Result<DatasetManifest, Failure> {
    DatasetManifest::load(path).map_err(|e| fail(EXIT_INPUT, e))
}

fn load_model(path: &Path) -> Result<(Model, Option<InputSpec>), Failure> {
    snapshot::load(path).map_err(|e| fail(EXIT_INPUT, e))
}

fn input_spec(m: &DatasetManifest) -> InputSpec {
    InputSpec { tokenizer: m.tokenizer, lowercase: m.lowercase }
}

fn train(
    ctx: &Ctx,
    manifest: &Path,
    out: &Path,
    presentation: Presentation,
    init: Option<&Path>,
    ablate: &[Feature],
) -> Outcome {
    let m = load_manifest(manifest)?;
    let data = m.load_dataset(ctx.exec).map_err(|e| fail(EXIT_INPUT, e))?;
    if data.train.is_empty() {
        return Err(fail(EXIT_INPUT, anyhow::anyhow!("{} has no training samples", manifest.display())));
    }
    let mut model = match init {
        Some(p) => load_model(p)?.0,
        None => Model::new(ctx.run_config()?),
    };
    for &f in ablate {
        model.ablate(f);
    }
    let run = harness::train(&mut model, &data.train, presentation).map_err(anyhow::Error::from)?;
    let digest =
        harness::write_run_dir(out, &m.name, &model, Some(input_spec(&m)), &run, None).map_err(anyhow::Error::from)?;
    print!("{}", harness::run_log(&m.name, &run, None, &digest));
    if !run.converged {
        return Err(fail(EXIT_TRAINING, anyhow::anyhow!("no convergence within {} epochs", run.epoch_count)));
    }
    Ok(())
}

fn read_lines(input: Option<&Path>) -> Result<Vec<String>, Failure> {
    let lines: io::Result<Vec<String>> = match input {
        None => io::stdin().lock().lines().collect(),
        Some(p) if p == Path::new("-") => io::stdin().lock().lines().collect(),
        Some(p) => std::fs::read_to_string(p).map(|t| t.lines().map(str::to_string).collect()),
    };
    let lines = lines.context("reading stimuli").map_err(|e| fail(EXIT_INPUT, e))?;
    Ok(lines.into_iter().filter(|l| !l.trim().is_empty()).collect())
}

fn stimulus(line: &str, spec: Option<InputSpec>, modality: Modality) -> Result<Pattern, Failure> {
    let spec = spec.unwrap_or(InputSpec { tokenizer: Tokenizer::Words, lowercase: false });
    let stream = spec.tokenizer.tokenize(line, spec.lowercase).map_err(|e| fail(EXIT_INPUT, e))?;
    Ok(Pattern::new(modality, stream.tokens))
}

fn ranking(c: &Classification) -> String {
    c.ranked.iter().map(|s| format!("{} {:.3}", s.label.name, s.confidence)).collect::<Vec<_>>().join("  ")
}

fn categorise(ctx: &Ctx, model: &Path, input: Option<&Path>) -> Outcome {
    let (model, spec) = load_model(model)?;
    let mut silent = 0;
    let mut out = String::new();
    if ctx.format == Format::Csv {
        out.push_str("stimulus,rank,label,confidence\n");
    }
    for line in read_lines(input)? {
        let p = stimulus(&line, spec, Modality::Visual)?;
        let c = model.categorise(&p).map_err(|e| fail(EXIT_INPUT, e))?;
        if c.is_no_activation() {
            silent += 1;
            eprintln!("no-activation: {}", line.trim());
            continue;
        }
        match ctx.format {
            Format::Table => {
                let _ = writeln!(out, "{}\t{}", line.trim(), ranking(&c));
            }
            Format::Csv => {
                for (i, s) in c.ranked.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{},{:.6}", csv_field(line.trim()), i + 1, s.label.name, s.confidence);
                }
            }
        }
    }
    print!("{out}");
    if silent > 0 {
        return Err(fail(EXIT_NO_ACTIVATION, anyhow::anyhow!("{silent} stimuli activated no label")));
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn retrieve(model: &Path, input: Option<&Path>, modality: Modality) -> Outcome {
    let (model, spec) = load_model(model)?;
    for line in read_lines(input)? {
        let p = stimulus(&line, spec, modality)?;
        let image = model.net(modality).retrieve(&p);
        println!("{}\t{}", line.trim(), image.to_line());
    }
    Ok(())
}

fn run_suite(ctx: &Ctx, manifest: &Path, out: Option<&Path>, presentation: Presentation, check: bool) -> Outcome {
    let m = load_manifest(manifest)?;
    let data = m.load_dataset(ctx.exec).map_err(|e| fail(EXIT_INPUT, e))?;
    if data.train.is_empty() || data.test.is_empty() {
        return Err(fail(EXIT_INPUT, anyhow::anyhow!("{} needs training and test files", manifest.display())));
    }
    let mut model = Model::new(ctx.run_config()?);
    let run = harness::train(&mut model, &data.train, presentation).map_err(anyhow::Error::from)?;
    let labels: Vec<String> = m.labels().iter().map(|s| s.to_string()).collect();
    let result = harness::run_suite(&model, &labels, &data.test, ctx.exec);
    if let Some(dir) = out {
        harness::write_run_dir(dir, &m.name, &model, Some(input_spec(&m)), &run, Some(&result))
            .map_err(anyhow::Error::from)?;
    }
    match ctx.format {
        Format::Table => print!("{}", harness::format_results_table(&result)),
        Format::Csv => {
            harness::write_results_csv(&result, io::stdout().lock()).context("writing results")?;
        }
    }
    if !run.converged {
        return Err(fail(EXIT_TRAINING, anyhow::anyhow!("no convergence within {} epochs", run.epoch_count)));
    }
    if check {
        let anchors = harness::check_anchors(&m.name, &result);
        for a in &anchors {
            eprintln!("{} {}: {}", if a.passed { "ok" } else { "FAILED" }, a.name, a.detail);
        }
        if anchors.iter().any(|a| !a.passed) {
            return Err(fail(EXIT_FAILURE, anyhow::anyhow!("acceptance anchors failed")));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn eval(
    ctx: &Ctx,
    fixture: &Path,
    model_results: Option<&Path>,
    n: Option<u64>,
    labels: u32,
    rule: ChanceRule,
    alpha: f64,
    out: Option<&Path>,
) -> Outcome {
    let mut rows = metrics::load_fixture(fixture).map_err(|e| fail(EXIT_INPUT, e))?;
    if let Some(p) = model_results {
        let f = std::fs::File::open(p)
            .with_context(|| format!("opening {}", p.display()))
            .map_err(|e| fail(EXIT_INPUT, e))?;
        metrics::apply_model_results(&mut rows, f).map_err(|e| fail(EXIT_INPUT, e))?;
    }
    let totals = metrics::published_totals(&rows);
    let n = n.unwrap_or(rows.len() as u64);
    let report = metrics::significance_report(&totals, n, labels, rule, alpha).map_err(|e| fail(EXIT_INPUT, e))?;
    let mut csv = Vec::new();
    metrics::write_metrics_csv(&rows, &mut csv).map_err(|e| fail(EXIT_FAILURE, e))?;
    let mut text = String::new();
    let names = metrics::Metric::ALL.map(metrics::Metric::as_str);
    let _ = writeln!(text, "{:<12} {}", "participant", names.join(" "));
    for (p, t) in metrics::participant_totals(&rows) {
        let _ = writeln!(text, "{p:<12} {t:?}");
    }
    let _ = writeln!(text, "{:<12} {totals:?}", "total");
    let recomputed = metrics::recomputed_totals(&rows);
    if recomputed != totals {
        let _ = writeln!(text, "{:<12} {recomputed:?}", "rescored");
    }
    text.push('\n');
    text.push_str(&metrics::format_report(&report));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("metrics.csv"), &csv).context("writing metrics.csv")?;
        std::fs::write(dir.join("report.txt"), &text).context("writing report.txt")?;
    }
    match ctx.format {
        Format::Table => print!("{text}"),
        Format::Csv => io::stdout().write_all(&csv).context("writing metrics")?,
    }
    Ok(())
}

fn tree(net: &DiscriminationNet, id: NodeId, depth: usize, out: &mut String) {
    let Some(n) = net.node(id) else { return };
    if !id.is_root() {
        let links: Vec<String> = n.naming_links.iter().map(|(l, c)| format!("{l}x{c}")).collect();
        let _ = writeln!(
            out,
            "{:indent$}{} test [{}] image [{}]{}{}",
            "",
            id,
            pattern::join(&n.test),
            pattern::join(&n.image),
            if n.image_complete { " complete" } else { "" },
            if links.is_empty() { String::new() } else { format!(" links {}", links.join(" ")) },
            indent = 2 * depth
        );
    }
    for &c in &n.children {
        tree(net, c, depth + 1, out);
    }
}

fn inspect(model: &Path, show_tree: bool, show_stm: bool) -> Outcome {
    let bytes = std::fs::read(model)
        .with_context(|| format!("reading {}", model.display()))
        .map_err(|e| fail(EXIT_INPUT, e))?;
    let (model, spec) = load_model(model)?;
    let mut out = String::new();
    let _ = writeln!(out, "schema {SNAPSHOT_SCHEMA_VERSION} sha256 {}", snapshot::digest(&bytes));
    if let Some(s) = spec {
        let _ = writeln!(out, "input {:?} lowercase {}", s.tokenizer, s.lowercase);
    }
    let _ = writeln!(out, "seed {} simulated time {} s", model.config().seed, model.simulated_time_seconds());
    let a = model.ablations();
    let _ = writeln!(out, "ablations stm {} naming_links {}", a.stm, a.naming_links);
    for (m, net) in model.nets() {
        let _ = writeln!(out, "{m} nodes {} naming links {}", net.node_count(), net.naming_link_total());
    }
    let labels: Vec<String> = model.labels().into_iter().map(|(_, n)| n).collect();
    let _ = writeln!(out, "labels {}", labels.join(" "));
    if show_tree {
        for (m, net) in model.nets() {
            let _ = writeln!(out, "{m} network");
            tree(net, NodeId::ROOT, 0, &mut out);
        }
    }
    if show_stm {
        for (m, q) in model.stms() {
            out.push_str(&q.dump(model.net(*m)));
        }
    }
    print!("{out}");
    Ok(())
}

fn sweep(ctx: &Ctx, manifest: &Path, first: u64, count: u64) -> Outcome {
    let m = load_manifest(manifest)?;
    let data = m.load_dataset(ctx.exec).map_err(|e| fail(EXIT_INPUT, e))?;
    if data.train.is_empty() || data.test.is_empty() {
        return Err(fail(EXIT_INPUT, anyhow::anyhow!("{} needs training and test files", manifest.display())));
    }
    let seeds: Vec<u64> = (first..first + count).collect();
    let report = harness::seed_sweep(&data, &ctx.run_config()?, &seeds, ctx.exec).map_err(anyhow::Error::from)?;
    match ctx.format {
        Format::Table => print!("{}", report.format_table()),
        Format::Csv => {
            let mut out = String::from("id,stimulus,reference,modal,agrees,counts\n");
            for it in &report.items {
                let counts: Vec<String> = it.counts.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_field(&it.id),
                    csv_field(&it.stimulus),
                    it.reference,
                    it.modal,
                    it.agrees,
                    counts.join(" ")
                );
            }
            print!("{out}");
        }
    }
    Ok(())
}
