//! Dataset-level summary counts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SampleFields;
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_samples: usize,
    pub n_unique_personas: usize,
    pub n_unique_tokens: usize,
}

/// Incremental accumulator; `merge` makes parallel reduction order-free.
#[derive(Debug, Default, Clone)]
pub struct StatsAccumulator {
    n_samples: usize,
    personas: BTreeSet<String>,
    tokens: BTreeSet<String>,
}

impl StatsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add<S: SampleFields>(&mut self, sample: &S) {
        self.n_samples += 1;
        for text in sample.persona_texts() {
            let toks = tokenize(&text);
            self.personas.insert(toks.join(" "));
            self.tokens.extend(toks);
        }
        for text in sample.history_texts() {
            self.tokens.extend(tokenize(&text));
        }
        self.tokens.extend(tokenize(&sample.response_text()));
    }

    pub fn merge(&mut self, other: StatsAccumulator) {
        self.n_samples += other.n_samples;
        self.personas.extend(other.personas);
        self.tokens.extend(other.tokens);
    }

    pub fn finish(self) -> DatasetStats {
        DatasetStats {
            n_samples: self.n_samples,
            n_unique_personas: self.personas.len(),
            n_unique_tokens: self.tokens.len(),
        }
    }
}

pub fn compute_stats<S: SampleFields>(samples: &[S]) -> DatasetStats {
    let mut acc = StatsAccumulator::new();
    for sample in samples {
        acc.add(sample);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DialogueSample, PersonaSentence, Utterance};

    fn sample(persona: &[&str], history: &[&str], response: &str) -> DialogueSample {
        DialogueSample::new(
            "d0",
            0,
            persona.iter().map(|p| PersonaSentence::new(*p).unwrap()).collect(),
            history.iter().map(|h| Utterance::new(*h).unwrap()).collect(),
            Utterance::new(response).unwrap(),
        )
        .unwrap()
    }

    // Counted by hand: personas {i like cats, i am a chef}; token types
    // {i, like, cats, am, a, chef, hi, hello, yes}.
    #[test]
    fn counts_match_hand_enumeration() {
        let samples = vec![
            sample(&["i like cats"], &["hi"], "hello"),
            sample(&["i like cats", "i am a chef"], &["hello"], "yes"),
        ];
        let stats = compute_stats(&samples);
        assert_eq!(stats, DatasetStats { n_samples: 2, n_unique_personas: 2, n_unique_tokens: 9 });
    }

    // Persona uniqueness is by normalized token sequence, not raw text.
    #[test]
    fn persona_uniqueness_is_normalized() {
        let samples =
            vec![sample(&["I like CATS"], &["hi"], "ok"), sample(&["i like cats"], &["hi"], "ok")];
        assert_eq!(compute_stats(&samples).n_unique_personas, 1);
    }

    #[test]
    fn merge_equals_sequential() {
        let samples = vec![
            sample(&["i like cats"], &["hi"], "hello"),
            sample(&["i ski"], &["yo"], "nice"),
            sample(&["i am a chef"], &["hey there"], "sure"),
        ];
        let whole = compute_stats(&samples);

        let mut left = StatsAccumulator::new();
        left.add(&samples[0]);
        let mut right = StatsAccumulator::new();
        right.add(&samples[1]);
        right.add(&samples[2]);
        left.merge(right);
        assert_eq!(left.finish(), whole);
    }

    #[test]
    fn empty_dataset_is_all_zero() {
        let stats = compute_stats::<DialogueSample>(&[]);
        assert_eq!(stats, DatasetStats { n_samples: 0, n_unique_personas: 0, n_unique_tokens: 0 });
    }
}
