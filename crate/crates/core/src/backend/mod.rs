//! Contracts for every learned model the pipeline consults.
//!
//! The pipeline never talks to a concrete model type: each role is a trait
//! object in a [`BackendSuite`]. The `reference` suite is deterministic and
//! corpus-free so everything downstream is testable hermetically; pretrained
//! or remote services plug into the same contracts for integration runs.
//!
//! Every operation must return bit-identical results for identical
//! `(inputs, seed)` and be safe for concurrent read-only use. All operations
//! are fallible because a backend may live behind a network hop; the
//! reference implementations only fail on the documented input errors.

mod pos;
mod reference;
mod remote;

pub use pos::{PosTag, RuleListPosTagger};
pub use reference::{
    normalize_perplexity, CharNgramLm, IdentityTranslator, JaccardSimilarity, OverlapNli,
    TableContinuer, TableInfiller, TemplateResponder, WordDropoutTranslator,
};
pub use remote::{RemoteBackend, RemoteClient, RemoteRequest, RemoteResponse};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("empty input text")]
    EmptyInput,
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("responder produced no output")]
    EmptyGeneration,
    #[error("remote backend: {0}")]
    Remote(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntailmentLabel {
    Entail,
    Neutral,
    Contradict,
}

/// Three-way inference verdict plus the raw entailment probability.
///
/// `label` is `Entail` exactly when `entail_prob` clears the scorer's own
/// decision threshold; callers that need a different cut compare against
/// `entail_prob` directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntailmentJudgment {
    pub entail_prob: f64,
    pub label: EntailmentLabel,
}

pub trait EntailmentScorer: Send + Sync {
    fn entail(
        &self,
        premise: &[String],
        hypothesis: &[String],
    ) -> Result<EntailmentJudgment, BackendError>;
}

pub trait FluencyScorer: Send + Sync {
    /// Perplexity clamped to the normalization constant and divided by it:
    /// `min(raw, C)/C`, always in `[0,1]`, lower is more fluent.
    fn normalized_ppl(&self, tokens: &[String]) -> Result<f64, BackendError>;
}

pub trait SimilarityScorer: Send + Sync {
    /// Sentence-pair similarity in `[0,1]`.
    fn similarity(&self, a: &[String], b: &[String]) -> Result<f64, BackendError>;
}

pub trait Infiller: Send + Sync {
    /// Fill `mask_positions` left to right, each fill conditioning on earlier
    /// fills. Outputs differ from the input only at masked positions, are
    /// deduplicated (so fewer than `n` may come back), and never contain
    /// mask or special symbols. An empty mask set returns the input itself.
    fn infill(
        &self,
        tokens: &[String],
        mask_positions: &[usize],
        n: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError>;
}

pub trait Continuer: Send + Sync {
    /// Extend `prefix` by 1..=max_new tokens; outputs keep the prefix
    /// verbatim, are deduplicated, and never contain special symbols.
    fn continue_prefix(
        &self,
        prefix: &[String],
        max_new: usize,
        n: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError>;
}

pub trait TranslationModel: Send + Sync {
    /// `beam` forward hypotheses in the pivot representation.
    fn translate(
        &self,
        tokens: &[String],
        beam: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError>;
    /// `beam` backward hypotheses for one pivot sequence.
    fn translate_back(
        &self,
        tokens: &[String],
        beam: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError>;
}

pub trait Responder: Send + Sync {
    fn respond(
        &self,
        persona: &[String],
        history: &[String],
        seed: u64,
    ) -> Result<Vec<String>, BackendError>;
}

pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Result<Vec<PosTag>, BackendError>;
}

impl PosTagger for RuleListPosTagger {
    fn tag(&self, tokens: &[String]) -> Result<Vec<PosTag>, BackendError> {
        Ok(tokens.iter().map(|t| self.tag_token(t)).collect())
    }
}

/// Round-trip translation: every forward hypothesis is translated back with
/// the same beam width, giving up to `beam * beam` variants, deduplicated in
/// generation order, with the original excluded.
pub fn back_translate(
    translator: &dyn TranslationModel,
    tokens: &[String],
    beam: usize,
    seed: u64,
) -> Result<Vec<Vec<String>>, BackendError> {
    let forward = translator.translate(tokens, beam, derive_seed(seed, &["bt", "fwd"]))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for (i, pivot) in forward.iter().enumerate() {
        let back_seed = derive_seed(seed, &["bt", "back", &i.to_string()]);
        for variant in translator.translate_back(pivot, beam, back_seed)? {
            if variant.as_slice() == tokens {
                continue;
            }
            if seen.insert(variant.clone()) {
                out.push(variant);
            }
        }
    }
    Ok(out)
}

/// One instance of every model role the pipeline needs.
///
/// `persona_nli` judges premise=response against hypothesis=persona;
/// `coherence_nli` judges premise=history utterance against
/// hypothesis=response.
#[derive(Clone)]
pub struct BackendSuite {
    pub persona_nli: Arc<dyn EntailmentScorer>,
    pub coherence_nli: Arc<dyn EntailmentScorer>,
    pub fluency: Arc<dyn FluencyScorer>,
    pub similarity: Arc<dyn SimilarityScorer>,
    pub infiller: Arc<dyn Infiller>,
    pub continuer: Arc<dyn Continuer>,
    pub translator: Arc<dyn TranslationModel>,
    pub responder: Arc<dyn Responder>,
    pub pos_tagger: Arc<dyn PosTagger>,
}

impl BackendSuite {
    /// Deterministic suite fitted on the loaded corpus's persona sentences.
    pub fn reference(persona_corpus: &[Vec<String>], ppl_constant: f64) -> Self {
        let nli = Arc::new(OverlapNli::new(0.5));
        BackendSuite {
            persona_nli: nli.clone(),
            coherence_nli: nli,
            fluency: Arc::new(CharNgramLm::fit(persona_corpus, 3, ppl_constant)),
            similarity: Arc::new(JaccardSimilarity),
            infiller: Arc::new(TableInfiller::fit(persona_corpus)),
            continuer: Arc::new(TableContinuer::fit(persona_corpus)),
            translator: Arc::new(WordDropoutTranslator),
            responder: Arc::new(TemplateResponder::new()),
            pos_tagger: Arc::new(RuleListPosTagger::new()),
        }
    }

    /// Every role served by one remote endpoint speaking the line-delimited
    /// JSON protocol (see [`RemoteBackend`]).
    pub fn remote(addr: &str) -> Self {
        let backend = Arc::new(RemoteBackend::new(addr));
        BackendSuite {
            persona_nli: backend.clone(),
            coherence_nli: backend.clone(),
            fluency: backend.clone(),
            similarity: backend.clone(),
            infiller: backend.clone(),
            continuer: backend.clone(),
            translator: backend.clone(),
            responder: backend.clone(),
            pos_tagger: backend,
        }
    }

    /// Selection by config name: `reference` or `remote:<host:port>`.
    pub fn by_name(
        name: &str,
        persona_corpus: &[Vec<String>],
        ppl_constant: f64,
    ) -> Result<Self, BackendError> {
        if name == "reference" {
            Ok(Self::reference(persona_corpus, ppl_constant))
        } else if let Some(addr) = name.strip_prefix("remote:") {
            Ok(Self::remote(addr))
        } else {
            Err(BackendError::UnknownBackend(name.to_string()))
        }
    }
}

#[cfg(test)]
pub(crate) fn toks(text: &str) -> Vec<String> {
    crate::text::tokenize(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lookup_by_name() {
        assert!(BackendSuite::by_name("reference", &[], 50.0).is_ok());
        assert!(BackendSuite::by_name("remote:127.0.0.1:9", &[], 50.0).is_ok());
        let err = match BackendSuite::by_name("oracle-9000", &[], 50.0) {
            Ok(_) => panic!("expected unknown backend error"),
            Err(e) => e,
        };
        assert!(matches!(err, BackendError::UnknownBackend(name) if name == "oracle-9000"));
    }

    #[test]
    fn back_translate_excludes_original_and_dedups() {
        let original = toks("hello how are you");
        let variants = back_translate(&WordDropoutTranslator, &original, 2, 7).unwrap();
        assert!(!variants.is_empty());
        let unique: std::collections::BTreeSet<_> = variants.iter().collect();
        assert_eq!(unique.len(), variants.len());
        for v in &variants {
            assert_ne!(v, &original);
        }
    }

    #[test]
    fn back_translate_beam_bound() {
        let original = toks("we went to the park yesterday afternoon");
        for beam in 1..=5 {
            let variants = back_translate(&WordDropoutTranslator, &original, beam, 3).unwrap();
            assert!(variants.len() <= beam * beam);
        }
    }

    #[test]
    fn identity_translator_round_trip_is_empty() {
        let original = toks("hello there");
        assert!(back_translate(&IdentityTranslator, &original, 1, 0).unwrap().is_empty());
        assert!(back_translate(&IdentityTranslator, &original, 5, 9).unwrap().is_empty());
    }

    #[test]
    fn back_translate_is_deterministic() {
        let original = toks("i had a long day at the office");
        let a = back_translate(&WordDropoutTranslator, &original, 3, 42).unwrap();
        let b = back_translate(&WordDropoutTranslator, &original, 3, 42).unwrap();
        assert_eq!(a, b);
    }
}
