//! End-to-end data pipeline: distill, diversify, assemble, and write every
//! artifact with a manifest.
//!
//! All outputs are pure functions of the input corpus, the config, and the
//! seed — no timestamps, no machine state — so reruns are byte-identical
//! and safe to diff. Stage failures from a backend are recorded in the
//! manifest rather than destroying the artifacts already written; only I/O
//! and setup problems abort the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::{BackendError, BackendSuite};
use crate::config::Config;
use crate::corpus::{
    compute_stats, write_jsonl, DatasetStats, DialogueSample, DistilledSample,
    JsonlError, SampleRecord, SourceId,
};
use crate::distill::distill_dataset;
use crate::diversify::{
    diversify_dataset, CompositionReport, DiversifiedSample, DiversifyOutcome,
    DiversifyParams, SkippedUnit,
};

pub const DISTILLED_FILE: &str = "distilled.jsonl";
pub const DIVERSIFIED_FILE: &str = "diversified.jsonl";
pub const AUGMENTED_FILE: &str = "augmented.jsonl";
pub const COMPOSITION_FILE: &str = "composition.json";
pub const SKIPPED_FILE: &str = "skipped.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("failed to create {}: {source}", path.display())]
    CreateDir { path: PathBuf, source: std::io::Error },
    #[error("failed to write {}: {source}", path.display())]
    WriteFile { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineOptions {
    /// Keep every persona sentence instead of filtering by entailment.
    pub no_distill: bool,
    /// Skip diversification; the augmented set is the distilled set.
    pub no_diversify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageState {
    Ok,
    Skipped,
    Failed,
    NotRun,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageStatus {
    pub stage: String,
    pub state: StageState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl StageStatus {
    fn new(stage: &str, state: StageState, detail: Option<String>) -> Self {
        StageStatus { stage: stage.to_owned(), state, detail }
    }
}

/// What a run produced: provenance, per-stage outcomes, dataset sizes, and
/// the digest of every artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub backend: String,
    /// Digest of the effective config's canonical TOML form.
    pub config_digest: String,
    pub stages: Vec<StageStatus>,
    pub stats: BTreeMap<String, DatasetStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composition: Option<CompositionReport>,
    /// Artifact name to content digest, excluding the manifest itself.
    pub files: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn failed(&self) -> bool {
        self.stages.iter().any(|s| s.state == StageState::Failed)
    }
}

/// Lowercase hex SHA-256, the digest form used throughout manifests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

struct OutputDir<'a> {
    dir: &'a Path,
    files: BTreeMap<String, String>,
}

impl<'a> OutputDir<'a> {
    fn create(dir: &'a Path) -> Result<Self, PipelineError> {
        std::fs::create_dir_all(dir)
            .map_err(|source| PipelineError::CreateDir { path: dir.to_owned(), source })?;
        Ok(OutputDir { dir, files: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)
            .map_err(|source| PipelineError::WriteFile { path, source })?;
        self.files.insert(name.to_owned(), sha256_hex(bytes));
        Ok(())
    }

    fn write_records(
        &mut self,
        name: &str,
        records: &[SampleRecord],
    ) -> Result<(), PipelineError> {
        let mut buf = Vec::new();
        write_jsonl(&mut buf, records)?;
        self.write(name, &buf)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), PipelineError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .expect("pipeline artifacts serialize to JSON");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }
}

/// Every (sample, persona sentence) pair, unfiltered, with the history cut
/// to the last utterance — the no-distill ablation's stand-in for
/// distillation.
fn expand_all_personas(corpus: &[DialogueSample]) -> Vec<DistilledSample> {
    let mut out = Vec::new();
    for sample in corpus {
        let history =
            sample.history.last().expect("samples always have history").clone();
        for (persona_index, persona) in sample.persona.iter().enumerate() {
            out.push(DistilledSample {
                persona: persona.clone(),
                history: history.clone(),
                response: sample.response.clone(),
                source_id: SourceId {
                    dialogue_id: sample.dialogue_id.clone(),
                    turn_index: sample.turn_index,
                    persona_index,
                },
            });
        }
    }
    out
}

/// Run the full pipeline into `out_dir` and return the manifest (also
/// written there as `manifest.json`).
pub fn run_pipeline(
    config: &Config,
    corpus: &[DialogueSample],
    out_dir: &Path,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<RunManifest, PipelineError> {
    let persona_corpus: Vec<Vec<String>> = corpus
        .iter()
        .flat_map(|s| s.persona.iter().map(|p| p.tokens().to_vec()))
        .collect();
    let suite = BackendSuite::by_name(&config.backend, &persona_corpus, config.ppl_constant)?;
    let mut out = OutputDir::create(out_dir)?;
    let mut stages: Vec<StageStatus> = Vec::new();
    let mut stats: BTreeMap<String, DatasetStats> = BTreeMap::new();
    stats.insert("original".to_owned(), compute_stats(corpus));

    // Distill.
    let mut distill_failed = false;
    let distilled: Vec<DistilledSample> = if opts.no_distill {
        stages.push(StageStatus::new(
            "distill",
            StageState::Skipped,
            Some("kept every persona sentence without entailment filtering".to_owned()),
        ));
        expand_all_personas(corpus)
    } else {
        match distill_dataset(corpus, suite.persona_nli.as_ref(), config.tau) {
            Ok(d) => {
                stages.push(StageStatus::new(
                    "distill",
                    StageState::Ok,
                    Some(format!("{} units from {} samples", d.len(), corpus.len())),
                ));
                d
            }
            Err(err) => {
                distill_failed = true;
                stages.push(StageStatus::new(
                    "distill",
                    StageState::Failed,
                    Some(err.to_string()),
                ));
                Vec::new()
            }
        }
    };
    if !distill_failed {
        let records: Vec<SampleRecord> =
            distilled.iter().map(SampleRecord::from_distilled).collect();
        out.write_records(DISTILLED_FILE, &records)?;
        stats.insert("distilled".to_owned(), compute_stats(&distilled));
    }

    // Diversify.
    let mut composition: Option<CompositionReport> = None;
    let diversified: Vec<DiversifiedSample> = if distill_failed {
        stages.push(StageStatus::new(
            "diversify",
            StageState::NotRun,
            Some("distillation failed".to_owned()),
        ));
        Vec::new()
    } else if opts.no_diversify {
        stages.push(StageStatus::new(
            "diversify",
            StageState::Skipped,
            Some("augmented set is the distilled set".to_owned()),
        ));
        Vec::new()
    } else {
        let params = DiversifyParams::from_config(config);
        match diversify_dataset(&distilled, &suite, &params, seed) {
            Ok(DiversifyOutcome { samples, skipped, composition: report }) => {
                stages.push(StageStatus::new(
                    "diversify",
                    StageState::Ok,
                    Some(format!(
                        "{} samples kept, {} candidates skipped",
                        samples.len(),
                        skipped.len()
                    )),
                ));
                let records: Vec<SampleRecord> =
                    samples.iter().map(DiversifiedSample::to_record).collect();
                out.write_records(DIVERSIFIED_FILE, &records)?;
                out.write_json(COMPOSITION_FILE, &report)?;
                out.write_json::<Vec<SkippedUnit>>(SKIPPED_FILE, &skipped)?;
                composition = Some(report);
                samples
            }
            Err(err) => {
                stages.push(StageStatus::new(
                    "diversify",
                    StageState::Failed,
                    Some(err.to_string()),
                ));
                Vec::new()
            }
        }
    };
    if !distill_failed {
        stats.insert("diversified".to_owned(), compute_stats(&diversified));
    }

    // Assemble the augmented set: distilled plus diversified.
    if !distill_failed {
        let mut records: Vec<SampleRecord> =
            distilled.iter().map(SampleRecord::from_distilled).collect();
        records.extend(diversified.iter().map(DiversifiedSample::to_record));
        out.write_records(AUGMENTED_FILE, &records)?;
        let mut acc = crate::corpus::StatsAccumulator::new();
        for s in &distilled {
            acc.add(s);
        }
        for s in &diversified {
            acc.add(s);
        }
        stats.insert("augmented".to_owned(), acc.finish());
        stages.push(StageStatus::new(
            "assemble",
            StageState::Ok,
            Some(format!("{} augmented samples", records.len())),
        ));
    } else {
        stages.push(StageStatus::new(
            "assemble",
            StageState::NotRun,
            Some("distillation failed".to_owned()),
        ));
    }

    let manifest = RunManifest {
        seed,
        backend: config.backend.clone(),
        config_digest: sha256_hex(config.to_toml_string().as_bytes()),
        stages,
        stats,
        composition,
        files: out.files.clone(),
    };
    out.write_json(MANIFEST_FILE, &manifest)?;
    Ok(manifest)
}
