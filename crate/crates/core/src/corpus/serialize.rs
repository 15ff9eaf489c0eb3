//! Flattening a sample into one model-input sequence.
//!
//! Layout: begin symbol, persona sentences concatenated in order, then each
//! history utterance prefixed by its talker symbol. The last history
//! utterance is the partner's (`talker1`), alternating backwards from there.
//! The target is the response wrapped in `talker2 ... end`.

use thiserror::Error;

use super::{DialogueSample, DistilledSample, PersonaSentence, Utterance};
use crate::text::{SegmentLabel, SpecialSymbols};

#[derive(Debug, Error)]
pub enum SerializeError {
    #[error("cannot serialize a sample with empty persona and empty history")]
    EmptyInput,
}

/// A flat, symbol-annotated input/target pair ready for a trainer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerializedInput {
    pub tokens: Vec<String>,
    pub segment_labels: Vec<SegmentLabel>,
    pub target_tokens: Vec<String>,
}

impl SerializedInput {
    pub fn from_sample(
        sample: &DialogueSample,
        symbols: &SpecialSymbols,
    ) -> Result<Self, SerializeError> {
        serialize_input(&sample.persona, &sample.history, &sample.response, symbols)
    }

    pub fn from_distilled(
        sample: &DistilledSample,
        symbols: &SpecialSymbols,
    ) -> Result<Self, SerializeError> {
        serialize_input(
            std::slice::from_ref(&sample.persona),
            std::slice::from_ref(&sample.history),
            &sample.response,
            symbols,
        )
    }
}

pub fn serialize_input(
    persona: &[PersonaSentence],
    history: &[Utterance],
    response: &Utterance,
    symbols: &SpecialSymbols,
) -> Result<SerializedInput, SerializeError> {
    if persona.is_empty() && history.is_empty() {
        return Err(SerializeError::EmptyInput);
    }

    let mut tokens = vec![symbols.begin.clone()];
    let mut segment_labels = vec![SegmentLabel::Persona];
    for sentence in persona {
        for token in sentence.tokens() {
            tokens.push(token.clone());
            segment_labels.push(SegmentLabel::Persona);
        }
    }

    let m = history.len();
    for (i, utterance) in history.iter().enumerate() {
        // Last utterance is the partner's; parity alternates backwards.
        let label = if (m - 1 - i) % 2 == 0 { SegmentLabel::Talker1 } else { SegmentLabel::Talker2 };
        let symbol = match label {
            SegmentLabel::Talker1 => &symbols.talker1,
            _ => &symbols.talker2,
        };
        tokens.push(symbol.clone());
        segment_labels.push(label);
        for token in utterance.tokens() {
            tokens.push(token.clone());
            segment_labels.push(label);
        }
    }

    let mut target_tokens = vec![symbols.talker2.clone()];
    target_tokens.extend(response.tokens().iter().cloned());
    target_tokens.push(symbols.end.clone());

    Ok(SerializedInput { tokens, segment_labels, target_tokens })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SourceId;

    fn utt(text: &str) -> Utterance {
        Utterance::new(text).unwrap()
    }

    fn persona(text: &str) -> PersonaSentence {
        PersonaSentence::new(text).unwrap()
    }

    // Layout rule applied by hand: persona block, then the single history
    // utterance as the partner's.
    #[test]
    fn single_turn_layout() {
        let out = serialize_input(
            &[persona("i like cats")],
            &[utt("hi")],
            &utt("hello"),
            &SpecialSymbols::default(),
        )
        .unwrap();
        assert_eq!(out.tokens, ["<bos>", "i", "like", "cats", "<talker1>", "hi"]);
        assert_eq!(
            out.segment_labels,
            [
                SegmentLabel::Persona,
                SegmentLabel::Persona,
                SegmentLabel::Persona,
                SegmentLabel::Persona,
                SegmentLabel::Talker1,
                SegmentLabel::Talker1,
            ]
        );
        assert_eq!(out.target_tokens, ["<talker2>", "hello", "<eos>"]);
    }

    // Alternation counts backwards from the last (partner) utterance.
    #[test]
    fn two_history_utterances_alternate() {
        let out = serialize_input(
            &[persona("i like cats")],
            &[utt("hi"), utt("how are you")],
            &utt("fine"),
            &SpecialSymbols::default(),
        )
        .unwrap();
        let talkers: Vec<&str> = out
            .tokens
            .iter()
            .filter(|t| t.starts_with("<talker"))
            .map(|s| s.as_str())
            .collect();
        assert_eq!(talkers, ["<talker2>", "<talker1>"]);
    }

    #[test]
    fn distilled_serializes_same_rule() {
        let sample = DistilledSample {
            persona: persona("i like cats"),
            history: utt("hi"),
            response: utt("hello"),
            source_id: SourceId { dialogue_id: "d0".into(), turn_index: 0, persona_index: 0 },
        };
        let a = SerializedInput::from_distilled(&sample, &SpecialSymbols::default()).unwrap();
        let b = SerializedInput::from_sample(&sample.to_dialogue_sample(), &SpecialSymbols::default())
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn length_identity_holds() {
        let p = [persona("i like cats"), persona("i am a chef !")];
        let h = [utt("hi there"), utt("hello friend"), utt("how are you ?")];
        let out = serialize_input(&p, &h, &utt("good"), &SpecialSymbols::default()).unwrap();
        let persona_tokens: usize = p.iter().map(|s| s.tokens().len()).sum();
        let history_tokens: usize = h.iter().map(|u| 1 + u.tokens().len()).sum();
        assert_eq!(out.tokens.len(), 1 + persona_tokens + history_tokens);
        assert_eq!(out.segment_labels.len(), out.tokens.len());
    }

    #[test]
    fn empty_both_sides_is_an_error() {
        let err = serialize_input(&[], &[], &utt("hello"), &SpecialSymbols::default());
        assert!(matches!(err, Err(SerializeError::EmptyInput)));
    }
}
