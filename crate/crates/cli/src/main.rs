//! `d3`: file-in/file-out driver for the persona-dialogue data pipeline.
//!
//! Every subcommand reads corpora from disk, runs one stage (or the whole
//! pipeline), writes its artifacts, and prints exactly one JSON document to
//! stdout. Exit codes: 0 on success, 2 when inputs fail validation (flags,
//! config, malformed corpus files), 1 on any other failure. Progress and
//! warnings go to stderr via `log`; set `RUST_LOG=info` to see them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use d3_core::backend::{BackendError, BackendSuite, EntailmentScorer, SimilarityScorer};
use d3_core::config::Config;
use d3_core::corpus::{
    compute_stats, parse_convai2_str, read_jsonl, read_samples, unroll_dialogues, write_jsonl,
    DialogueSample, DistilledSample, PersonaSentence, SampleRecord, SourceId, Utterance,
};
use d3_core::curriculum::{
    build_plan, run_plan, CurriculumError, PlanDatasets, UnigramTrainer, Variant,
};
use d3_core::distill::distill_dataset;
use d3_core::diversify::{diversify_dataset, DiversifyParams};
use d3_core::metrics::{consistent_attention, standard_report, AttentionRecord};
use d3_core::pipeline::{run_pipeline, sha256_hex, PipelineError, PipelineOptions};
use d3_core::text::tokenize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "d3",
    version,
    about = "Distill, diversify, and order persona-dialogue training data"
)]
struct Cli {
    /// Master seed; all stage randomness is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Config file: TOML, or JSON for `.json` paths. Defaults apply when absent.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for data-parallel stages (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce samples to entailed persona sentences and the last utterance.
    Distill(DistillArgs),
    /// Edit distilled personas, re-align responses, vary histories.
    Diversify(DiversifyArgs),
    /// Build a curriculum variant and train a builtin trainer through it.
    Curriculum(CurriculumArgs),
    /// Score hypothesis responses against references.
    Evaluate(EvaluateArgs),
    /// Print dataset statistics for a corpus file.
    Stats(StatsArgs),
    /// Run distill, diversify, and assembly end to end into a directory.
    Pipeline(PipelineArgs),
}

/// Corpus file format; `auto` sniffs the extension, then the first byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Jsonl,
    Convai2,
}

#[derive(Args)]
struct DistillArgs {
    /// Input corpus (JSONL records or ConvAI2 text).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output JSONL of distilled samples.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
    /// NLI backend override (`reference` or `remote:<host:port>`).
    #[arg(long, value_name = "NAME")]
    nli: Option<String>,
    /// Entailment-probability threshold override.
    #[arg(long)]
    tau: Option<f64>,
}

#[derive(Args)]
struct DiversifyArgs {
    /// Input JSONL of distilled samples (multi-persona rows are reduced
    /// to their first persona sentence and last history utterance).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output JSONL of diversified samples.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Write the composition report here as well as to stdout.
    #[arg(long, value_name = "FILE")]
    composition: Option<PathBuf>,
    /// Write skipped-unit diagnostics here.
    #[arg(long, value_name = "FILE")]
    skipped: Option<PathBuf>,
}

#[derive(Args)]
struct CurriculumArgs {
    /// Variant: d3, original, only_augment, shuffle, or reverse.
    #[arg(long)]
    variant: String,
    /// Original corpus (the hard phase).
    #[arg(long, value_name = "FILE")]
    orig: PathBuf,
    /// Augmented corpus (the easy phase).
    #[arg(long, value_name = "FILE")]
    aug: PathBuf,
    /// Held-out dev set; when omitted the tail of --orig is held out.
    #[arg(long, value_name = "FILE")]
    dev: Option<PathBuf>,
    /// Easy-phase dev set; when omitted it is derived from the dev set by
    /// the same augmentation the pipeline applies.
    #[arg(long = "dev-easy", value_name = "FILE")]
    dev_easy: Option<PathBuf>,
    /// Trainer implementation (builtin: unigram).
    #[arg(long, default_value = "unigram")]
    trainer: String,
    #[arg(long = "patience-easy", value_name = "N")]
    patience_easy: Option<usize>,
    #[arg(long = "patience-hard", value_name = "N")]
    patience_hard: Option<usize>,
    /// Cap on epochs per phase (config max_epochs when omitted).
    #[arg(long = "max-epochs", value_name = "N")]
    max_epochs: Option<usize>,
    /// Write the curriculum manifest here as well as to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Hypothesis responses (JSONL; the `response` field is scored).
    #[arg(long, value_name = "FILE")]
    hyp: PathBuf,
    /// Reference samples (JSONL), aligned with --hyp line by line.
    #[arg(long = "ref", value_name = "FILE")]
    reference: PathBuf,
    /// Persona source for the consistency score (often the --ref file).
    #[arg(long, value_name = "FILE")]
    personas: Option<PathBuf>,
    /// NLI backend for the consistency score.
    #[arg(long, value_name = "NAME")]
    nli: Option<String>,
    /// Also report mean hypothesis/reference similarity.
    #[arg(long)]
    similarity: bool,
    /// Attention records (JSONL) for consistent-attention analysis.
    #[arg(long, value_name = "FILE")]
    attention: Option<PathBuf>,
    /// Write the report here as well as to stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input corpus (JSONL records or ConvAI2 text).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output directory for all artifacts and the manifest.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
    /// Keep every persona sentence instead of entailment-filtering.
    #[arg(long = "no-distill")]
    no_distill: bool,
    /// Skip diversification; the augmented set is the distilled set.
    #[arg(long = "no-diversify")]
    no_diversify: bool,
}

/// User input failed validation (exit 2) vs. everything else (exit 1).
#[derive(Debug)]
enum CliError {
    Validation(String),
    Other(String),
}

fn validation(err: impl ToString) -> CliError {
    CliError::Validation(err.to_string())
}

fn other(err: impl ToString) -> CliError {
    CliError::Other(err.to_string())
}

fn backend_err(err: BackendError) -> CliError {
    match err {
        BackendError::UnknownBackend(_) => validation(err),
        _ => other(err),
    }
}

fn curriculum_err(err: CurriculumError) -> CliError {
    match err {
        CurriculumError::UnknownVariant(_) | CurriculumError::EmptyDataset { .. } => {
            validation(err)
        }
        CurriculumError::Trainer { .. } => other(err),
    }
}

fn pipeline_err(err: PipelineError) -> CliError {
    match err {
        PipelineError::Backend(e) => backend_err(e),
        _ => other(err),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Other(message)) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(other)?;
    }
    let config = match &cli.config {
        Some(path) => Config::load(path).map_err(validation)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Distill(args) => run_distill(&config, cli.seed, args),
        Command::Diversify(args) => run_diversify(&config, cli.seed, args),
        Command::Curriculum(args) => run_curriculum(&config, cli.seed, args),
        Command::Evaluate(args) => run_evaluate(&config, args),
        Command::Stats(args) => run_stats(args),
        Command::Pipeline(args) => run_pipeline_cmd(&config, cli.seed, args),
    }
}

fn run_distill(config: &Config, _seed: u64, args: DistillArgs) -> Result<(), CliError> {
    let mut config = config.clone();
    if let Some(nli) = args.nli {
        config.backend = nli;
    }
    if let Some(tau) = args.tau {
        config.tau = tau;
    }
    config.validate().map_err(validation)?;
    let corpus = load_corpus(&args.input, args.format)?;
    let suite = suite_for(&config, &persona_corpus(&corpus))?;
    let distilled = distill_dataset(&corpus, suite.persona_nli.as_ref(), config.tau)
        .map_err(backend_err)?;
    let records: Vec<SampleRecord> = distilled.iter().map(SampleRecord::from_distilled).collect();
    write_records(&args.out, &records)?;
    log::info!("distilled {} samples from {} inputs", records.len(), corpus.len());
    emit(&json!({
        "input_samples": corpus.len(),
        "distilled_samples": records.len(),
        "tau": config.tau,
        "out": args.out.display().to_string(),
    }))
}

fn run_diversify(config: &Config, seed: u64, args: DiversifyArgs) -> Result<(), CliError> {
    config.validate().map_err(validation)?;
    let records = read_records(&args.input)?;
    let distilled: Vec<DistilledSample> = records
        .iter()
        .enumerate()
        .map(|(i, r)| record_to_distilled(r, i + 1))
        .collect::<Result<_, _>>()?;
    let corpus: Vec<Vec<String>> =
        distilled.iter().map(|d| d.persona.tokens().to_vec()).collect();
    let suite = suite_for(config, &corpus)?;
    let params = DiversifyParams::from_config(config);
    let outcome = diversify_dataset(&distilled, &suite, &params, seed).map_err(backend_err)?;
    let out_records: Vec<SampleRecord> = outcome.samples.iter().map(|s| s.to_record()).collect();
    write_records(&args.out, &out_records)?;
    if let Some(path) = &args.composition {
        write_json_file(path, &outcome.composition)?;
    }
    if let Some(path) = &args.skipped {
        write_json_file(path, &outcome.skipped)?;
    }
    log::info!(
        "kept {} diversified samples from {} distilled units ({} skipped)",
        out_records.len(),
        distilled.len(),
        outcome.skipped.len()
    );
    emit(&json!({
        "distilled_units": distilled.len(),
        "diversified_samples": out_records.len(),
        "skipped_units": outcome.skipped.len(),
        "composition": outcome.composition,
        "out": args.out.display().to_string(),
    }))
}

fn run_curriculum(config: &Config, seed: u64, args: CurriculumArgs) -> Result<(), CliError> {
    config.validate().map_err(validation)?;
    let variant: Variant = args.variant.parse().map_err(validation)?;
    if args.trainer != "unigram" {
        return Err(CliError::Validation(format!(
            "unknown trainer `{}` (builtin trainers: unigram)",
            args.trainer
        )));
    }
    let mut orig = load_corpus(&args.orig, args.format)?;
    let aug = load_corpus(&args.aug, Format::Auto)?;
    let dev: Vec<DialogueSample> = match &args.dev {
        Some(path) => load_corpus(path, Format::Auto)?,
        None => {
            if orig.len() < 2 {
                return Err(CliError::Validation(
                    "need at least 2 original samples to hold out a dev set; pass --dev".into(),
                ));
            }
            let held = orig.split_off(orig.len() - (orig.len() / 10).max(1));
            log::info!("held out the last {} original samples as the dev set", held.len());
            held
        }
    };
    let dev_easy: Vec<DialogueSample> = match &args.dev_easy {
        Some(path) => load_corpus(path, Format::Auto)?,
        None => derive_easy_dev(config, &orig, &dev, seed)?,
    };
    let data = PlanDatasets {
        original: &orig,
        augmented: &aug,
        dev: &dev,
        dev_easy: &dev_easy,
    };
    let patience_easy = args.patience_easy.unwrap_or(config.patience_easy);
    let patience_hard = args.patience_hard.unwrap_or(config.patience_hard);
    let max_epochs = args.max_epochs.unwrap_or(config.max_epochs);
    if patience_easy == 0 || patience_hard == 0 || max_epochs == 0 {
        return Err(CliError::Validation("patience and max-epochs must be >= 1".into()));
    }
    let plan =
        build_plan(variant, &data, patience_easy, patience_hard, seed).map_err(curriculum_err)?;
    let mut trainer = UnigramTrainer::new();
    let outcome = run_plan(&mut trainer, &plan, max_epochs).map_err(curriculum_err)?;
    let phases: Vec<serde_json::Value> = plan
        .phases
        .iter()
        .map(|phase| {
            json!({
                "name": phase.name,
                "patience": phase.patience,
                "train_samples": phase.train.len(),
                "dev_samples": phase.dev.len(),
                "train_digest": digest_samples(&phase.train),
                "dev_digest": digest_samples(&phase.dev),
            })
        })
        .collect();
    // Final dev loss = the last improving epoch of the last phase, whose
    // checkpoint is the one the run returns.
    let last_phase = &plan.phases.last().expect("plans have at least one phase").name;
    let final_dev_loss = outcome
        .log
        .iter()
        .filter(|r| &r.phase == last_phase && r.is_best)
        .next_back()
        .map(|r| r.dev_loss);
    let manifest = json!({
        "variant": variant.as_str(),
        "trainer": args.trainer,
        "seed": seed,
        "max_epochs": max_epochs,
        "datasets": {
            "original": compute_stats(&orig),
            "augmented": compute_stats(&aug),
            "dev": compute_stats(&dev),
            "dev_easy": compute_stats(&dev_easy),
        },
        "phases": phases,
        "epochs_run": outcome.log.len(),
        "final_dev_loss": final_dev_loss,
        "log": outcome.log,
    });
    if let Some(path) = &args.out {
        write_json_file(path, &manifest)?;
    }
    emit(&manifest)
}

fn run_evaluate(config: &Config, args: EvaluateArgs) -> Result<(), CliError> {
    let mut config = config.clone();
    if let Some(nli) = args.nli {
        config.backend = nli;
    }
    config.validate().map_err(validation)?;
    let hyp_records = read_records(&args.hyp)?;
    let ref_records = read_records(&args.reference)?;
    if hyp_records.len() != ref_records.len() {
        return Err(CliError::Validation(format!(
            "--hyp has {} records but --ref has {}; they must align line by line",
            hyp_records.len(),
            ref_records.len()
        )));
    }
    let hypotheses: Vec<Vec<String>> =
        hyp_records.iter().map(|r| tokenize(&r.response)).collect();
    let references: Vec<Vec<String>> =
        ref_records.iter().map(|r| tokenize(&r.response)).collect();
    let personas: Option<Vec<Vec<Vec<String>>>> = match &args.personas {
        Some(path) => {
            let records = read_records(path)?;
            if records.len() != hyp_records.len() {
                return Err(CliError::Validation(format!(
                    "--personas has {} records but --hyp has {}",
                    records.len(),
                    hyp_records.len()
                )));
            }
            Some(
                records
                    .iter()
                    .map(|r| r.persona.iter().map(|p| tokenize(p)).collect())
                    .collect(),
            )
        }
        None => None,
    };
    let suite = if personas.is_some() || args.similarity {
        let fit: Vec<Vec<String>> =
            personas.iter().flatten().flatten().cloned().collect();
        Some(suite_for(&config, &fit)?)
    } else {
        None
    };
    let persona_arg: Option<(&[Vec<Vec<String>>], &dyn EntailmentScorer)> =
        match (&personas, &suite) {
            (Some(p), Some(s)) => Some((p.as_slice(), s.persona_nli.as_ref())),
            _ => None,
        };
    let similarity_arg: Option<&dyn SimilarityScorer> = if args.similarity {
        suite.as_ref().map(|s| s.similarity.as_ref())
    } else {
        None
    };
    let mut report =
        standard_report(&hypotheses, &references, persona_arg, similarity_arg)
            .map_err(backend_err)?;
    if let Some(path) = &args.attention {
        let records = read_attention(path)?;
        if records.is_empty() {
            return Err(CliError::Validation(format!(
                "{}: no attention records",
                path.display()
            )));
        }
        let mut token_scores = Vec::new();
        let mut sentence_scores = Vec::new();
        for (i, record) in records.iter().enumerate() {
            let (token, sentence) = consistent_attention(record)
                .map_err(|e| CliError::Validation(format!("attention record {}: {e}", i + 1)))?;
            if let Some(t) = token {
                token_scores.push(t);
            }
            sentence_scores.push(sentence);
        }
        report.insert("a_s", mean(&sentence_scores));
        if !token_scores.is_empty() {
            report.insert("a_t", mean(&token_scores));
        }
        report
            .metadata
            .insert("attention_records".into(), records.len().to_string());
        report
            .metadata
            .insert("attention_records_with_overlap".into(), token_scores.len().to_string());
    }
    report.metadata.insert("hypotheses".into(), hypotheses.len().to_string());
    if let Some(path) = &args.out {
        write_json_file(path, &report)?;
    }
    emit(&report)
}

fn run_stats(args: StatsArgs) -> Result<(), CliError> {
    let text = read_input(&args.input)?;
    let stats = match resolve_format(&args.input, args.format, &text) {
        // JSONL rows are counted as-is, so distilled and diversified files
        // work without needing to round-trip through full samples.
        Format::Jsonl => compute_stats(&parse_records(&text, &args.input)?),
        _ => {
            let records = parse_convai2_str(&text).map_err(validation)?;
            compute_stats(&unroll_dialogues(&records).map_err(validation)?)
        }
    };
    emit(&stats)
}

fn run_pipeline_cmd(config: &Config, seed: u64, args: PipelineArgs) -> Result<(), CliError> {
    config.validate().map_err(validation)?;
    let corpus = load_corpus(&args.input, args.format)?;
    let opts = PipelineOptions {
        no_distill: args.no_distill,
        no_diversify: args.no_diversify,
    };
    let manifest =
        run_pipeline(config, &corpus, &args.out, seed, &opts).map_err(pipeline_err)?;
    let failed = manifest.failed();
    emit(&manifest)?;
    if failed {
        return Err(CliError::Other(format!(
            "a pipeline stage failed; see {}",
            args.out.join("manifest.json").display()
        )));
    }
    Ok(())
}

/// Augment the dev set the same way the pipeline augments training data,
/// so the easy phase is validated on easy-distribution data.
fn derive_easy_dev(
    config: &Config,
    orig: &[DialogueSample],
    dev: &[DialogueSample],
    seed: u64,
) -> Result<Vec<DialogueSample>, CliError> {
    let mut corpus = persona_corpus(orig);
    corpus.extend(persona_corpus(dev));
    let suite = suite_for(config, &corpus)?;
    let distilled =
        distill_dataset(dev, suite.persona_nli.as_ref(), config.tau).map_err(backend_err)?;
    let params = DiversifyParams::from_config(config);
    let outcome = diversify_dataset(&distilled, &suite, &params, seed).map_err(backend_err)?;
    let mut easy: Vec<DialogueSample> =
        distilled.iter().map(|d| d.to_dialogue_sample()).collect();
    easy.extend(outcome.samples.iter().map(|s| s.to_dialogue_sample()));
    if easy.is_empty() {
        log::warn!("augmenting the dev set produced nothing; easy phase evaluates on the dev set");
        return Ok(dev.to_vec());
    }
    log::info!("derived {} easy-dev samples from {} dev samples", easy.len(), dev.len());
    Ok(easy)
}

fn persona_corpus(samples: &[DialogueSample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .flat_map(|s| s.persona.iter().map(|p| p.tokens().to_vec()))
        .collect()
}

fn suite_for(config: &Config, corpus: &[Vec<String>]) -> Result<BackendSuite, CliError> {
    BackendSuite::by_name(&config.backend, corpus, config.ppl_constant).map_err(backend_err)
}

/// Rebuild a distilled sample from its wire form. Multi-persona rows are
/// reduced the same way distillation reduces them: first kept persona,
/// last history utterance.
fn record_to_distilled(record: &SampleRecord, line: usize) -> Result<DistilledSample, CliError> {
    let at = |message: &str| CliError::Validation(format!("record {line}: {message}"));
    let persona = record.persona.first().ok_or_else(|| at("no persona sentence"))?;
    if record.persona.len() > 1 {
        log::warn!("record {line}: {} persona sentences; keeping the first", record.persona.len());
    }
    let history = record.history.last().ok_or_else(|| at("no history utterance"))?;
    // The trailing `:<n>` of a source key is the persona index; rows
    // without provenance default to index 0.
    let persona_index = record
        .source_id
        .as_deref()
        .and_then(|key| key.rsplit(':').next())
        .and_then(|raw| raw.parse().ok())
        .unwrap_or(0);
    Ok(DistilledSample {
        persona: PersonaSentence::new(persona).map_err(validation)?,
        history: Utterance::new(history).map_err(validation)?,
        response: Utterance::new(&record.response).map_err(validation)?,
        source_id: SourceId {
            dialogue_id: record
                .dialogue_id
                .clone()
                .unwrap_or_else(|| format!("line{line}")),
            turn_index: record.turn_index.unwrap_or(0),
            persona_index,
        },
    })
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("read {}: {e}", path.display())))
}

fn resolve_format(path: &Path, format: Format, text: &str) -> Format {
    if format != Format::Auto {
        return format;
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if ext.eq_ignore_ascii_case("jsonl") || ext.eq_ignore_ascii_case("json") {
        Format::Jsonl
    } else if ext.eq_ignore_ascii_case("txt") {
        Format::Convai2
    } else if text.trim_start().starts_with('{') {
        Format::Jsonl
    } else {
        Format::Convai2
    }
}

fn parse_records(text: &str, path: &Path) -> Result<Vec<SampleRecord>, CliError> {
    read_jsonl(text.as_bytes())
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn read_records(path: &Path) -> Result<Vec<SampleRecord>, CliError> {
    let text = read_input(path)?;
    parse_records(&text, path)
}

fn load_corpus(path: &Path, format: Format) -> Result<Vec<DialogueSample>, CliError> {
    let text = read_input(path)?;
    match resolve_format(path, format, &text) {
        Format::Jsonl => read_samples(text.as_bytes())
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
        _ => {
            let records = parse_convai2_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            unroll_dialogues(&records).map_err(validation)
        }
    }
}

fn read_attention(path: &Path) -> Result<Vec<AttentionRecord>, CliError> {
    let text = read_input(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| {
                CliError::Validation(format!("{} line {}: {e}", path.display(), i + 1))
            })
        })
        .collect()
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Other(format!("create {}: {e}", parent.display())))?;
        }
    }
    Ok(())
}

fn write_records(path: &Path, records: &[SampleRecord]) -> Result<(), CliError> {
    ensure_parent(path)?;
    let file = fs::File::create(path)
        .map_err(|e| CliError::Other(format!("write {}: {e}", path.display())))?;
    write_jsonl(std::io::BufWriter::new(file), records)
        .map_err(|e| CliError::Other(format!("write {}: {e}", path.display())))
}

fn write_json_file(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(other)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Other(format!("write {}: {e}", path.display())))
}

/// Print the one JSON document a subcommand owes stdout.
fn emit(value: &impl serde::Serialize) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value).map_err(other)?);
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn digest_samples(samples: &[DialogueSample]) -> String {
    let records: Vec<SampleRecord> = samples.iter().map(SampleRecord::from_sample).collect();
    let mut bytes = Vec::new();
    write_jsonl(&mut bytes, &records).expect("in-memory serialization cannot fail");
    sha256_hex(&bytes)
}
