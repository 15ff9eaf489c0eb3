//! ConvAI2/PersonaChat plain-text loader and emitter.
//!
//! The distribution format is line-oriented. Every line starts with a line
//! number; numbering restarts at 1 for each new dialogue. Persona lines
//! carry the marker `your persona:`; utterance lines hold one
//! tab-separated `partner<TAB>self` pair, optionally followed by extra
//! tab-separated fields (candidate-response distractors), which are kept on
//! the record but ignored by the pipeline.

use std::io::{self, BufRead};

use thiserror::Error;

const PERSONA_MARKER: &str = "your persona:";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: missing line-number prefix")]
    MissingLineNumber { line: usize },
    #[error("line {line}: utterance line has no tab separator")]
    MissingTab { line: usize },
    #[error("read failed: {0}")]
    Io(#[from] io::Error),
}

/// One partner/self utterance pair plus any trailing distractor fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnPair {
    pub partner: String,
    pub self_utterance: String,
    pub extras: Vec<String>,
}

impl TurnPair {
    pub fn new(partner: impl Into<String>, self_utterance: impl Into<String>) -> Self {
        Self { partner: partner.into(), self_utterance: self_utterance.into(), extras: Vec::new() }
    }
}

/// A whole dialogue as it appears in the file: persona sentences followed by
/// turn pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DialogueRecord {
    pub persona: Vec<String>,
    pub turns: Vec<TurnPair>,
}

/// Parse the ConvAI2 plain-text format. Blank lines are skipped; a line
/// number equal to 1 starts a new dialogue.
pub fn parse_convai2<R: BufRead>(reader: R) -> Result<Vec<DialogueRecord>, ParseError> {
    let mut records: Vec<DialogueRecord> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (number, rest) = split_line_number(&line)
            .ok_or(ParseError::MissingLineNumber { line: line_no })?;
        if number == 1 || records.is_empty() {
            records.push(DialogueRecord::default());
        }
        let record = records.last_mut().expect("record pushed above");
        if let Some(pos) = rest.find(PERSONA_MARKER) {
            record.persona.push(rest[pos + PERSONA_MARKER.len()..].trim().to_string());
        } else {
            let mut fields = rest.split('\t');
            let partner = fields.next().unwrap_or_default().to_string();
            let self_utterance = fields
                .next()
                .ok_or(ParseError::MissingTab { line: line_no })?
                .to_string();
            let extras = fields.map(str::to_string).collect();
            record.turns.push(TurnPair { partner, self_utterance, extras });
        }
    }
    Ok(records)
}

/// Parse from an in-memory string.
pub fn parse_convai2_str(text: &str) -> Result<Vec<DialogueRecord>, ParseError> {
    parse_convai2(text.as_bytes())
}

fn split_line_number(line: &str) -> Option<(u64, &str)> {
    let digits_end = line.find(|c: char| !c.is_ascii_digit())?;
    if digits_end == 0 {
        return None;
    }
    let number: u64 = line[..digits_end].parse().ok()?;
    let rest = line[digits_end..].strip_prefix(' ')?;
    Some((number, rest))
}

/// Emit records back to the ConvAI2 text form. `parse_convai2` on the output
/// reproduces the records exactly.
pub fn to_convai2_text(records: &[DialogueRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let mut n = 1;
        for persona in &record.persona {
            out.push_str(&format!("{n} {PERSONA_MARKER} {persona}\n"));
            n += 1;
        }
        for turn in &record.turns {
            out.push_str(&format!("{n} {}\t{}", turn.partner, turn.self_utterance));
            for extra in &turn.extras {
                out.push('\t');
                out.push_str(extra);
            }
            out.push('\n');
            n += 1;
        }
    }
    out
}
