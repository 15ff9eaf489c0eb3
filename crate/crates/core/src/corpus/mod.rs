//! Data model for persona-based dialogue corpora.
//!
//! An original training sample couples `L` persona sentences and `M` history
//! utterances with one gold response. Distillation reduces that to a single
//! entailed persona sentence plus the last history utterance.

mod convai2;
pub mod jsonl;
mod serialize;
mod stats;
mod synthetic;

pub use convai2::{
    parse_convai2, parse_convai2_str, to_convai2_text, DialogueRecord, ParseError, TurnPair,
};
pub use jsonl::{read_jsonl, read_samples, write_jsonl, JsonlError, SampleRecord};
pub use serialize::{serialize_input, SerializeError, SerializedInput};
pub use stats::{compute_stats, DatasetStats, StatsAccumulator};
pub use synthetic::{synthetic_dialogues, synthetic_samples};

use std::ops::Deref;

use thiserror::Error;

use crate::text::{detokenize, tokenize};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("utterance is empty after tokenization: {text:?}")]
    EmptyUtterance { text: String },
    #[error("dialogue {dialogue_id}: sample must have at least one persona sentence")]
    NoPersona { dialogue_id: String },
    #[error("dialogue {dialogue_id}: sample must have at least one history utterance")]
    NoHistory { dialogue_id: String },
    #[error("dialogue record {index} has no turn pairs")]
    NoTurns { index: usize },
}

/// A tokenized utterance. `tokens` is always the canonical tokenization of
/// `text` (see [`crate::text::tokenize`]) and is non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Utterance {
    text: String,
    tokens: Vec<String>,
}

impl Utterance {
    pub fn new(text: impl Into<String>) -> Result<Self, CorpusError> {
        let text = text.into();
        let tokens = tokenize(&text);
        if tokens.is_empty() {
            return Err(CorpusError::EmptyUtterance { text });
        }
        Ok(Self { text, tokens })
    }

    /// Build from canonical tokens; `text` becomes the space-joined form.
    pub fn from_tokens(tokens: &[String]) -> Result<Self, CorpusError> {
        Self::new(detokenize(tokens))
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Canonical text after tokenization-normalization; two utterances with
    /// the same normalized text count as the same sentence.
    pub fn normalized(&self) -> String {
        detokenize(&self.tokens)
    }
}

/// One persona profile sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PersonaSentence(pub Utterance);

impl PersonaSentence {
    pub fn new(text: impl Into<String>) -> Result<Self, CorpusError> {
        Ok(Self(Utterance::new(text)?))
    }
}

impl Deref for PersonaSentence {
    type Target = Utterance;

    fn deref(&self) -> &Utterance {
        &self.0
    }
}

impl From<Utterance> for PersonaSentence {
    fn from(utt: Utterance) -> Self {
        Self(utt)
    }
}

/// An original training sample: persona `P`, history `H`, gold response `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DialogueSample {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub persona: Vec<PersonaSentence>,
    pub history: Vec<Utterance>,
    pub response: Utterance,
}

impl DialogueSample {
    pub fn new(
        dialogue_id: impl Into<String>,
        turn_index: usize,
        persona: Vec<PersonaSentence>,
        history: Vec<Utterance>,
        response: Utterance,
    ) -> Result<Self, CorpusError> {
        let dialogue_id = dialogue_id.into();
        if persona.is_empty() {
            return Err(CorpusError::NoPersona { dialogue_id });
        }
        if history.is_empty() {
            return Err(CorpusError::NoHistory { dialogue_id });
        }
        Ok(Self { dialogue_id, turn_index, persona, history, response })
    }

    /// PersonaChat-format expectations (4 <= L <= 6, M <= 15). Violations are
    /// warnings, not errors: other corpora are allowed to differ.
    pub fn personachat_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let l = self.persona.len();
        let m = self.history.len();
        if !(4..=6).contains(&l) {
            warnings.push(format!(
                "{}:{} has {} persona sentences (expected 4..=6)",
                self.dialogue_id, self.turn_index, l
            ));
        }
        if m > 15 {
            warnings.push(format!(
                "{}:{} has {} history utterances (expected <= 15)",
                self.dialogue_id, self.turn_index, m
            ));
        }
        warnings
    }
}

/// Identifies the original (sample, persona sentence) a derived sample came
/// from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceId {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub persona_index: usize,
}

impl SourceId {
    /// Stable string form, used for seed derivation and logging.
    pub fn key(&self) -> String {
        format!("{}:{}:{}", self.dialogue_id, self.turn_index, self.persona_index)
    }
}

/// A distilled sample: exactly one entailed persona sentence and the last
/// history utterance, with the response unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistilledSample {
    pub persona: PersonaSentence,
    pub history: Utterance,
    pub response: Utterance,
    pub source_id: SourceId,
}

impl DistilledSample {
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
}

/// Uniform read access to a sample's text fields, however the sample is
/// represented. Statistics and serialization work through this.
pub trait SampleFields {
    fn persona_texts(&self) -> Vec<&str>;
    fn history_texts(&self) -> Vec<&str>;
    fn response_text(&self) -> &str;
}

impl SampleFields for DialogueSample {
    fn persona_texts(&self) -> Vec<&str> {
        self.persona.iter().map(|p| p.text()).collect()
    }

    fn history_texts(&self) -> Vec<&str> {
        self.history.iter().map(|h| h.text()).collect()
    }

    fn response_text(&self) -> &str {
        self.response.text()
    }
}

impl SampleFields for DistilledSample {
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

/// Turn parsed dialogue records into training samples: one sample per turn
/// pair, whose history is every utterance strictly before that turn's
/// self-utterance.
pub fn unroll_dialogues(records: &[DialogueRecord]) -> Result<Vec<DialogueSample>, CorpusError> {
    let mut samples = Vec::new();
    for (index, record) in records.iter().enumerate() {
        if record.turns.is_empty() {
            return Err(CorpusError::NoTurns { index });
        }
        let dialogue_id = format!("d{index:05}");
        let persona = record
            .persona
            .iter()
            .map(PersonaSentence::new)
            .collect::<Result<Vec<_>, _>>()?;
        let mut history: Vec<Utterance> = Vec::new();
        for (turn_index, turn) in record.turns.iter().enumerate() {
            history.push(Utterance::new(&turn.partner)?);
            let response = Utterance::new(&turn.self_utterance)?;
            samples.push(DialogueSample::new(
                dialogue_id.clone(),
                turn_index,
                persona.clone(),
                history.clone(),
                response.clone(),
            )?);
            history.push(response);
        }
    }
    Ok(samples)
}
