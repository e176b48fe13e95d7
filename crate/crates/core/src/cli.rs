//! The `draftrank` command line.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::draft::{
    compute_stats, count_pairs, load_catalog, parse_draft_log, split_drafts, synth_drafts, write_draft_log, CardCatalog,
    Draft, PairCounts, PlantedOracle,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate, export_embeddings, random_baseline, write_curve_csv, write_embeddings_csv, EvalReport};
use crate::preference::Head;
use crate::service::{self, AdvisorState};
use crate::training::{
    load_checkpoint, probe_picks, resume, save_checkpoint, train, write_log_csv, Checkpoint, TrainConfig, TrainingData,
};

pub const DEFAULT_CARD_COUNT: usize = 265;

#[derive(Debug, Parser)]
#[command(name = "draftrank", version, about = "Preference learning for card drafting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a card catalog (and optionally a draft log against it).
    CatalogCheck(CatalogCheckArgs),
    /// Per-card pick and first-pick rates as CSV.
    Stats(StatsArgs),
    /// Generate drafts from a planted utility oracle.
    Synth(SynthArgs),
    /// Split a draft log into train and test sets by draft.
    Split(SplitArgs),
    /// Train a cpr or ranknet model.
    Train(Box<TrainArgs>),
    /// Compute MTTA, MTPD and the per-pick accuracy table.
    Evaluate(EvaluateArgs),
    /// Write per-card embeddings and distance to the empty pool.
    ExportEmbeddings(ExportArgs),
    /// Run the HTTP ranking service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// Card catalog CSV (`card_id,name`).
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Card count when no catalog is given; names become card_000, card_001, ...
    #[arg(long, default_value_t = DEFAULT_CARD_COUNT)]
    cards: usize,
}

impl CatalogArgs {
    fn load(&self) -> Result<CardCatalog> {
        match &self.catalog {
            Some(path) => load_catalog(path),
            None => Ok(CardCatalog::synthetic(self.cards)),
        }
    }
}

#[derive(Debug, Args)]
struct CatalogCheckArgs {
    /// Card catalog CSV.
    #[arg(long)]
    catalog: PathBuf,
    /// Draft log to validate against the catalog.
    #[arg(long)]
    drafts: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Draft log (JSON lines).
    #[arg(long)]
    drafts: PathBuf,
    #[command(flatten)]
    catalog: CatalogArgs,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Number of drafts to generate.
    #[arg(long)]
    drafts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output draft log; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Catalog size.
    #[arg(long, default_value_t = DEFAULT_CARD_COUNT)]
    cards: usize,
    /// Weight of the squared color-count synergy term.
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Softmax temperature of the simulated players; 0 picks greedily.
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Write the generated catalog CSV here.
    #[arg(long)]
    catalog_out: Option<PathBuf>,
    /// Write the oracle (strengths, colors, beta) as JSON here.
    #[arg(long)]
    oracle_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    drafts: PathBuf,
    #[command(flatten)]
    catalog: CatalogArgs,
    /// Fraction of drafts sent to the test set.
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    train_out: PathBuf,
    #[arg(long)]
    test_out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training draft log.
    #[arg(long)]
    drafts: PathBuf,
    #[command(flatten)]
    catalog: CatalogArgs,
    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting preset: cpr-d2, cpr-d16, cpr-d256, ranknet, desk-cpr or desk-ranknet.
    #[arg(long)]
    preset: Option<String>,
    /// cpr or ranknet.
    #[arg(long)]
    head: Option<Head>,
    /// Output dimension (embedding size for cpr).
    #[arg(long)]
    dim: Option<usize>,
    /// Hidden layer widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Epochs to train (extra epochs with --resume).
    #[arg(long)]
    epochs: Option<usize>,
    /// Triplet margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Initialization and dropout seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shuffle_seed: Option<u64>,
    /// Log every this many updates.
    #[arg(long)]
    eval_every: Option<usize>,
    /// Held-out draft log used for running MTTA in the training log.
    #[arg(long)]
    probe: Option<PathBuf>,
    /// Maximum number of probe picks.
    #[arg(long, default_value_t = 2000)]
    probe_picks: usize,
    /// Continue training from this checkpoint; its stored configuration is
    /// used and only --epochs applies.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Output checkpoint.
    #[arg(long)]
    out: PathBuf,
    /// Training log CSV (`batch,loss,probe_mtta,seconds`).
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Model checkpoint; not needed with --baseline.
    #[arg(long, required_unless_present = "baseline")]
    model: Option<PathBuf>,
    /// Test draft log.
    #[arg(long)]
    drafts: PathBuf,
    /// Catalog to check the model fingerprint against.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Card count for --baseline without --catalog.
    #[arg(long, default_value_t = DEFAULT_CARD_COUNT)]
    cards: usize,
    /// Evaluate a baseline instead of a model (only `random`).
    #[arg(long, value_parser = ["random"], conflicts_with = "model")]
    baseline: Option<String>,
    /// Random-baseline trials.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pick accuracy CSV (`pick_index,pack_0,pack_1,pack_2`).
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// CPR checkpoint.
    #[arg(long)]
    model: PathBuf,
    /// Draft log the first-pick rates are computed from.
    #[arg(long)]
    drafts: PathBuf,
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Oracle JSON from `synth --oracle-out`; adds tau against planted strength.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Embedding CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Checkpoint to serve, as `id=path` or `path` (id = file stem). Repeatable.
    #[arg(long = "model", required = true)]
    models: Vec<String>,
    /// Catalog supplying card names.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// Allowed browser origin, e.g. http://localhost:5173.
    #[arg(long)]
    cors_origin: Option<String>,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::CatalogCheck(a) => catalog_check(a),
        Command::Stats(a) => stats(a),
        Command::Synth(a) => synth(a),
        Command::Split(a) => split(a),
        Command::Train(a) => train_cmd(*a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::ExportEmbeddings(a) => export_cmd(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn to_json_text(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn catalog_check(a: CatalogCheckArgs) -> Result<()> {
    let catalog = load_catalog(&a.catalog)?;
    let fp = catalog.fingerprint();
    let mut report = json!({
        "card_count": fp.card_count,
        "names_sha256": fp.names_sha256,
    });
    if let Some(path) = &a.drafts {
        let drafts = parse_draft_log(path, &catalog)?;
        let mut pairs = PairCounts::default();
        for d in &drafts {
            pairs += count_pairs(d);
        }
        report["drafts"] = json!(drafts.len());
        report["triples_raw"] = json!(pairs.raw);
        report["triples_degenerate"] = json!(pairs.degenerate);
        report["triples_emitted"] = json!(pairs.emitted());
    }
    write_output(None, &to_json_text(&report))
}

fn stats(a: StatsArgs) -> Result<()> {
    let catalog = a.catalog.load()?;
    let drafts = parse_draft_log(&a.drafts, &catalog)?;
    let stats = compute_stats(&drafts, catalog.len())?;
    write_output(a.out.as_deref(), &stats.to_csv_string(&catalog))
}

fn synth(a: SynthArgs) -> Result<()> {
    if !(a.temperature >= 0.0 && a.temperature.is_finite()) {
        return Err(Error::Usage(format!("temperature must be >= 0, got {}", a.temperature)));
    }
    if a.drafts == 0 {
        return Err(Error::Usage("--drafts must be at least 1".into()));
    }
    let oracle = PlantedOracle::random(a.cards, a.beta, a.seed);
    let drafts = synth_drafts(a.drafts, &oracle, a.temperature, a.seed)?;
    if let Some(path) = &a.catalog_out {
        CardCatalog::synthetic(a.cards).write_csv(path)?;
    }
    if let Some(path) = &a.oracle_out {
        write_output(Some(path), &to_json_text(&oracle))?;
    }
    match &a.out {
        Some(path) => write_draft_log(path, &drafts),
        None => {
            let text: String = drafts.iter().map(|d| d.to_json_line() + "\n").collect();
            write_output(None, &text)
        }
    }
}

fn split(a: SplitArgs) -> Result<()> {
    let catalog = a.catalog.load()?;
    let drafts = parse_draft_log(&a.drafts, &catalog)?;
    let (train, test) = split_drafts(drafts, a.test_fraction, a.seed)?;
    write_draft_log(&a.train_out, &train)?;
    write_draft_log(&a.test_out, &test)?;
    eprintln!("train {} drafts, test {} drafts", train.len(), test.len());
    Ok(())
}

fn build_config(a: &TrainArgs, card_count: usize) -> Result<TrainConfig> {
    let mut config = match &a.preset {
        Some(name) => TrainConfig::preset(name, card_count)?,
        None => TrainConfig::new(a.head.unwrap_or(Head::Cpr), card_count),
    };
    if let Some(path) = &a.config {
        config.apply_file(path)?;
    }
    if let Some(head) = a.head {
        if head != config.head && a.dim.is_none() {
            config.mlp.output_dim = TrainConfig::new(head, card_count).mlp.output_dim;
        }
        config.head = head;
    }
    if let Some(v) = a.dim {
        config.mlp.output_dim = v;
    }
    if let Some(v) = &a.hidden {
        config.mlp.hidden_dims = v.clone();
    }
    if let Some(v) = a.dropout {
        config.mlp.dropout_p = v;
    }
    if let Some(v) = a.lr {
        config.lr = v;
    }
    if let Some(v) = a.batch_size {
        config.batch_size = v;
    }
    if let Some(v) = a.epochs {
        config.epochs = v;
    }
    if let Some(v) = a.margin {
        config.margin = v;
    }
    if let Some(v) = a.seed {
        config.mlp.seed = v;
    }
    if let Some(v) = a.shuffle_seed {
        config.shuffle_seed = v;
    }
    if let Some(v) = a.eval_every {
        config.eval_every = v;
    }
    config.validate()?;
    Ok(config)
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let catalog = a.catalog.load()?;
    let drafts = parse_draft_log(&a.drafts, &catalog)?;
    let data = TrainingData::from_drafts(&drafts, catalog.len());
    drop(drafts);
    let probe = match &a.probe {
        Some(path) => probe_picks(&parse_draft_log(path, &catalog)?, catalog.len(), Some(a.probe_picks)),
        None => Vec::new(),
    };
    let outcome = match &a.resume {
        Some(path) => {
            let ckpt = load_checkpoint(path)?;
            ckpt.check_catalog(&catalog)?;
            resume(ckpt, a.epochs.unwrap_or(1), &data, &probe)?
        }
        None => {
            let config = build_config(&a, catalog.len())?;
            train(&config, catalog.fingerprint(), &data, &probe)?
        }
    };
    save_checkpoint(&a.out, &outcome.checkpoint)?;
    if let Some(path) = &a.log {
        write_log_csv(path, &outcome.log)?;
    }
    let last = outcome.log.last();
    eprintln!(
        "trained {} updates over {} triples; final logged loss {}",
        outcome.checkpoint.rng_cursor,
        data.len(),
        last.map(|r| format!("{:.6}", r.loss)).unwrap_or_else(|| "-".into())
    );
    Ok(())
}

fn load_model_checked(path: &Path, catalog: Option<&Path>) -> Result<(Checkpoint, CardCatalog)> {
    let ckpt = load_checkpoint(path)?;
    let catalog = match catalog {
        Some(c) => {
            let catalog = load_catalog(c)?;
            ckpt.check_catalog(&catalog)?;
            catalog
        }
        None => CardCatalog::synthetic(ckpt.catalog.card_count),
    };
    Ok((ckpt, catalog))
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    let report: EvalReport = match &a.model {
        Some(model) => {
            let (ckpt, catalog) = load_model_checked(model, a.catalog.as_deref())?;
            let drafts: Vec<Draft> = parse_draft_log(&a.drafts, &catalog)?;
            evaluate(&ckpt.model()?, &drafts)?
        }
        None => {
            let catalog = match &a.catalog {
                Some(c) => load_catalog(c)?,
                None => CardCatalog::synthetic(a.cards),
            };
            let drafts = parse_draft_log(&a.drafts, &catalog)?;
            random_baseline(&drafts, a.seed, a.trials)?
        }
    };
    if let Some(path) = &a.curve {
        write_curve_csv(path, &report)?;
    }
    write_output(a.out.as_deref(), &to_json_text(&report))
}

fn export_cmd(a: ExportArgs) -> Result<()> {
    let (ckpt, catalog) = load_model_checked(&a.model, a.catalog.as_deref())?;
    let model = ckpt.model()?;
    let drafts = parse_draft_log(&a.drafts, &catalog)?;
    let stats = compute_stats(&drafts, catalog.len())?;
    let export = export_embeddings(&model, &catalog, &stats)?;
    write_embeddings_csv(&a.out, &export)?;
    let mut summary = json!({ "cards": export.rows.len(), "tau_first_pick_rate": export.tau });
    if let Some(path) = &a.oracle {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let oracle: PlantedOracle =
            serde_json::from_str(&text).map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
        summary["tau_strength"] = json!(export.tau_against(&oracle.strengths)?);
    }
    write_output(None, &to_json_text(&summary))
}

fn parse_model_spec(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((id, path)) if !id.is_empty() => (id.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(spec);
            (service::model_id_for(&path), path)
        }
    }
}

fn serve_cmd(a: ServeArgs) -> Result<()> {
    let specs: Vec<(String, PathBuf)> = a.models.iter().map(|s| parse_model_spec(s)).collect();
    let catalog = a.catalog.as_deref().map(load_catalog).transpose()?;
    let state = Arc::new(AdvisorState::load(&specs, catalog)?);
    for m in state.models() {
        eprintln!("loaded model {} ({}, D={})", m.model_id, m.head, m.dim);
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::io("<runtime>", e))?;
    runtime.block_on(service::serve(state, a.bind, a.cors_origin.as_deref()))
}
