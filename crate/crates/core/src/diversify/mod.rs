//! Diversification: expand each distilled unit into persona variants with
//! matching responses and history variants, then keep the best-scoring
//! candidates.
//!
//! Per unit: token- and phrase-level persona edits are pooled, rated, and
//! the top few selected; each selected persona gets one response (by
//! substitution when the edit is echoed in the gold response, otherwise
//! generated) and is crossed with the original and back-translated
//! histories. Candidates are deduplicated globally and pass through the
//! keep filter, either an absolute score threshold or a size-matched cut.

mod align;
mod edit;
mod history;

pub use align::align_response_token_edit;
pub use edit::{phrase_level_edits, token_level_edits};
pub use history::augment_history;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, BackendSuite, FluencyScorer, SimilarityScorer};
use crate::config::Config;
use crate::corpus::{
    DialogueSample, DistilledSample, PersonaSentence, SampleFields, SampleRecord,
    SourceId, Utterance,
};
use crate::scoring::{score_edited_persona, score_sample};
use crate::seeding::{derive_seed, rng_for};
use crate::Score;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    TokenLevel,
    PhraseLevel,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::TokenLevel => "token_level",
            EditKind::PhraseLevel => "phrase_level",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistoryKind {
    Original,
    BackTranslated,
}

impl HistoryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HistoryKind::Original => "original",
            HistoryKind::BackTranslated => "back_translated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    TokenEdited,
    Generated,
}

impl ResponseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ResponseKind::TokenEdited => "token_edited",
            ResponseKind::Generated => "generated",
        }
    }
}

/// A candidate persona produced by one of the editing operators.
#[derive(Debug, Clone, PartialEq)]
pub struct EditedPersona {
    pub tokens: Vec<String>,
    pub kind: EditKind,
    /// Edit rating, lower better; filled by the ranking pass.
    pub f_score: Option<Score>,
}

/// A fully assembled augmentation candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversifiedSample {
    pub persona: PersonaSentence,
    pub history: Utterance,
    pub response: Utterance,
    pub edit_kind: EditKind,
    pub history_kind: HistoryKind,
    pub response_kind: ResponseKind,
    /// Keep score, higher better.
    pub s_score: Score,
    pub source_id: SourceId,
}

impl DiversifiedSample {
    pub fn provenance(&self) -> String {
        format!(
            "diversified:{}:{}:{}",
            self.edit_kind.as_str(),
            self.history_kind.as_str(),
            self.response_kind.as_str()
        )
    }

    /// View as a one-persona, one-utterance dialogue sample.
    pub fn to_dialogue_sample(&self) -> DialogueSample {
        DialogueSample {
            dialogue_id: self.source_id.dialogue_id.clone(),
            turn_index: self.source_id.turn_index,
            persona: vec![self.persona.clone()],
            history: vec![self.history.clone()],
            response: self.response.clone(),
        }
    }

    pub fn to_record(&self) -> SampleRecord {
        SampleRecord {
            dialogue_id: Some(self.source_id.dialogue_id.clone()),
            turn_index: Some(self.source_id.turn_index),
            persona: vec![self.persona.text().to_owned()],
            history: vec![self.history.text().to_owned()],
            response: self.response.text().to_owned(),
            source_id: Some(self.source_id.key()),
            provenance: Some(self.provenance()),
            score: Some(self.s_score),
        }
    }
}

impl SampleFields for DiversifiedSample {
    fn persona_texts(&self) -> Vec<&str> {
        vec![self.persona.text()]
    }

    fn history_texts(&self) -> Vec<&str> {
        vec![self.history.text()]
    }

    fn response_text(&self) -> &str {
        self.response.text()
    }
}

/// How the keep filter decides what survives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum KeepMode {
    /// Keep candidates whose score is at least this threshold.
    Absolute(Score),
    /// Keep the best-scoring `ratio * |distilled|` candidates.
    SizeMatched(Score),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversifyParams {
    pub mask_ratio: f64,
    pub phrase_ratio: [f64; 2],
    pub k_candidates: usize,
    pub n_p: usize,
    pub n_h: usize,
    pub beam: usize,
    pub alpha: Score,
    pub beta: Score,
    pub gamma: Score,
    pub keep: KeepMode,
}

impl DiversifyParams {
    pub fn from_config(config: &Config) -> Self {
        DiversifyParams {
            mask_ratio: config.mask_ratio,
            phrase_ratio: config.phrase_ratio,
            k_candidates: config.k_candidates,
            n_p: config.n_p,
            n_h: config.n_h,
            beam: config.beam,
            alpha: config.alpha,
            beta: config.beta,
            gamma: config.gamma,
            keep: match config.threshold {
                Some(t) => KeepMode::Absolute(t),
                None => KeepMode::SizeMatched(config.size_ratio),
            },
        }
    }
}

/// A candidate dropped during generation, with the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedUnit {
    pub source: String,
    pub persona: String,
    pub reason: String,
}

/// Counts of kept samples by edit, history, and response kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub total: usize,
    pub counts: BTreeMap<String, usize>,
}

impl CompositionReport {
    pub fn tally(samples: &[DiversifiedSample]) -> Self {
        let mut counts = BTreeMap::new();
        for s in samples {
            let key = format!(
                "{}/{}/{}",
                s.edit_kind.as_str(),
                s.history_kind.as_str(),
                s.response_kind.as_str()
            );
            *counts.entry(key).or_insert(0) += 1;
        }
        CompositionReport { total: samples.len(), counts }
    }

    /// Cell shares of the total; they sum to 1 when the total is nonzero.
    pub fn proportions(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.total as f64))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct DiversifyOutcome {
    pub samples: Vec<DiversifiedSample>,
    pub skipped: Vec<SkippedUnit>,
    pub composition: CompositionReport,
}

/// Rate every candidate against the original and keep the `n_p` best.
///
/// Lower ratings are better; the sort is stable, so ties keep generation
/// order (token-level candidates were generated before phrase-level ones).
pub fn rank_edited_personas(
    mut candidates: Vec<EditedPersona>,
    original: &[String],
    alpha: Score,
    fluency: &dyn FluencyScorer,
    similarity: &dyn SimilarityScorer,
    n_p: usize,
) -> Result<Vec<EditedPersona>, BackendError> {
    for c in &mut candidates {
        let f = score_edited_persona(&c.tokens, original, fluency, similarity, alpha)?;
        c.f_score = Some(f);
    }
    candidates.sort_by(|a, b| {
        a.f_score.expect("rated above").total_cmp(&b.f_score.expect("rated above"))
    });
    candidates.truncate(n_p);
    Ok(candidates)
}

/// Apply the keep filter to scored candidates, preserving their order.
///
/// Size matching targets `round(ratio * distilled_len)` samples, taking
/// the highest scores (ties broken toward earlier candidates); if the pool
/// is smaller than the target, everything is kept.
pub fn apply_keep(
    samples: Vec<DiversifiedSample>,
    keep: KeepMode,
    distilled_len: usize,
) -> Vec<DiversifiedSample> {
    match keep {
        KeepMode::Absolute(t) => {
            samples.into_iter().filter(|s| s.s_score >= t).collect()
        }
        KeepMode::SizeMatched(ratio) => {
            let target = (ratio * distilled_len as f64).round() as usize;
            if target > samples.len() {
                log::warn!(
                    "size-matched keep wants {target} samples, pool has {}",
                    samples.len()
                );
            }
            let target = target.min(samples.len());
            let mut indexed: Vec<(usize, DiversifiedSample)> =
                samples.into_iter().enumerate().collect();
            indexed.sort_by(|a, b| b.1.s_score.total_cmp(&a.1.s_score).then(a.0.cmp(&b.0)));
            indexed.truncate(target);
            indexed.sort_by_key(|&(i, _)| i);
            indexed.into_iter().map(|(_, s)| s).collect()
        }
    }
}

/// Drop exact text-triple duplicates, keeping the first occurrence.
fn dedup_candidates(candidates: Vec<DiversifiedSample>) -> Vec<DiversifiedSample> {
    let mut seen = BTreeSet::new();
    let mut out = candidates;
    out.retain(|s| {
        seen.insert((
            s.persona.text().to_owned(),
            s.history.text().to_owned(),
            s.response.text().to_owned(),
        ))
    });
    out
}

fn diversify_unit(
    unit: &DistilledSample,
    backends: &BackendSuite,
    params: &DiversifyParams,
    master_seed: u64,
) -> Result<(Vec<DiversifiedSample>, Vec<SkippedUnit>), BackendError> {
    let key = unit.source_id.key();
    let persona = unit.persona.tokens();
    let history = unit.history.tokens();
    let response = unit.response.tokens();

    let mut edit_rng = rng_for(master_seed, &["diversify", &key, "edit"]);
    let mut pool = token_level_edits(
        persona,
        params.mask_ratio,
        params.k_candidates,
        backends.pos_tagger.as_ref(),
        backends.infiller.as_ref(),
        &mut edit_rng,
    )?;
    pool.extend(phrase_level_edits(
        persona,
        params.phrase_ratio,
        params.k_candidates,
        backends.continuer.as_ref(),
        &mut edit_rng,
    )?);
    let selected = rank_edited_personas(
        pool,
        persona,
        params.alpha,
        backends.fluency.as_ref(),
        backends.similarity.as_ref(),
        params.n_p,
    )?;

    let bt_seed = derive_seed(master_seed, &["diversify", &key, "bt"]);
    let histories = augment_history(
        history,
        backends.translator.as_ref(),
        params.beam,
        params.n_h,
        bt_seed,
    )?;

    let mut out = Vec::new();
    let mut skipped = Vec::new();
    let skip = |persona: &[String], reason: String, skipped: &mut Vec<SkippedUnit>| {
        skipped.push(SkippedUnit {
            source: key.clone(),
            persona: persona.join(" "),
            reason,
        });
    };
    for (pi, edited) in selected.iter().enumerate() {
        // One response per persona, decided against the original history;
        // history variants reuse it.
        let aligned = align_response_token_edit(
            persona,
            &edited.tokens,
            response,
            backends.pos_tagger.as_ref(),
        )?;
        let (response_tokens, response_kind) = match aligned {
            Some(tokens) => (tokens, ResponseKind::TokenEdited),
            None => {
                let seed = derive_seed(
                    master_seed,
                    &["diversify", &key, "respond", &pi.to_string()],
                );
                match backends.responder.respond(&edited.tokens, history, seed) {
                    Ok(tokens) => (tokens, ResponseKind::Generated),
                    Err(err) => {
                        skip(&edited.tokens, format!("responder: {err}"), &mut skipped);
                        continue;
                    }
                }
            }
        };
        let persona_utt = match Utterance::from_tokens(&edited.tokens) {
            Ok(u) => u,
            Err(err) => {
                skip(&edited.tokens, format!("persona: {err}"), &mut skipped);
                continue;
            }
        };
        let response_utt = match Utterance::from_tokens(&response_tokens) {
            Ok(u) => u,
            Err(err) => {
                skip(&edited.tokens, format!("response: {err}"), &mut skipped);
                continue;
            }
        };
        for (history_tokens, history_kind) in &histories {
            let s = score_sample(
                &response_tokens,
                &edited.tokens,
                history_tokens,
                params.beta,
                params.gamma,
                backends.fluency.as_ref(),
                backends.persona_nli.as_ref(),
                backends.coherence_nli.as_ref(),
            )?;
            let history_utt = match Utterance::from_tokens(history_tokens) {
                Ok(u) => u,
                Err(err) => {
                    skip(&edited.tokens, format!("history: {err}"), &mut skipped);
                    continue;
                }
            };
            out.push(DiversifiedSample {
                persona: persona_utt.clone().into(),
                history: history_utt,
                response: response_utt.clone(),
                edit_kind: edited.kind,
                history_kind: *history_kind,
                response_kind,
                s_score: s,
                source_id: unit.source_id.clone(),
            });
        }
    }
    Ok((out, skipped))
}

/// Diversify a distilled dataset.
///
/// Units are processed independently (in parallel) under per-unit seeds
/// derived from `master_seed` and the unit's source key, so results do not
/// depend on thread count. Candidate order follows distilled input order,
/// then persona rank, then history order.
pub fn diversify_dataset(
    distilled: &[DistilledSample],
    backends: &BackendSuite,
    params: &DiversifyParams,
    master_seed: u64,
) -> Result<DiversifyOutcome, BackendError> {
    let per_unit: Vec<(Vec<DiversifiedSample>, Vec<SkippedUnit>)> = distilled
        .par_iter()
        .map(|unit| diversify_unit(unit, backends, params, master_seed))
        .collect::<Result<_, _>>()?;
    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for (c, s) in per_unit {
        candidates.extend(c);
        skipped.extend(s);
    }
    let candidates = dedup_candidates(candidates);
    let samples = apply_keep(candidates, params.keep, distilled.len());
    let composition = CompositionReport::tally(&samples);
    Ok(DiversifyOutcome { samples, skipped, composition })
}
