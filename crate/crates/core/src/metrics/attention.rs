//! Persona-attention diagnostics over externally produced attention maps.
//!
//! A record carries one response's attention matrix (one row per response
//! token, one column per input token, rows stochastic), the set of input
//! positions belonging to persona text, and the (input, response) pairs of
//! shared content tokens. From these, two scores: mean attention on shared
//! tokens, and mean persona attention mass per response token.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendError, PosTagger};

pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum AttentionError {
    #[error("attention matrix is empty")]
    Empty,
    #[error("row {row} has {got} columns, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
    #[error("row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("persona position {position} is out of range for {cols} columns")]
    PersonaOutOfRange { position: usize, cols: usize },
    #[error("overlap pair ({input}, {response}) is invalid")]
    BadPair { input: usize, response: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionRecord {
    /// Row `l` is the attention distribution of response token `l` over
    /// the input positions.
    pub attention: Vec<Vec<f64>>,
    /// Input positions occupied by persona tokens.
    pub persona_positions: BTreeSet<usize>,
    /// `(input position, response position)` pairs of shared content
    /// tokens; input positions must lie in `persona_positions`.
    pub overlap_pairs: Vec<(usize, usize)>,
}

impl AttentionRecord {
    pub fn validate(&self) -> Result<(), AttentionError> {
        if self.attention.is_empty() || self.attention[0].is_empty() {
            return Err(AttentionError::Empty);
        }
        let cols = self.attention[0].len();
        let rows = self.attention.len();
        for (row, r) in self.attention.iter().enumerate() {
            if r.len() != cols {
                return Err(AttentionError::Ragged { row, got: r.len(), expected: cols });
            }
            let sum: f64 = r.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(AttentionError::NotStochastic { row, sum });
            }
        }
        if let Some(&bad) = self.persona_positions.iter().find(|&&p| p >= cols) {
            return Err(AttentionError::PersonaOutOfRange { position: bad, cols });
        }
        for &(s, l) in &self.overlap_pairs {
            if !self.persona_positions.contains(&s) || l >= rows {
                return Err(AttentionError::BadPair { input: s, response: l });
            }
        }
        Ok(())
    }
}

/// `(token score, sentence score)` for one record.
///
/// The token score is the mean of `attention[l][s]` over the overlap pairs
/// and is `None` when there are none. The sentence score is the mean, over
/// response tokens, of the attention mass falling on persona positions.
pub fn consistent_attention(
    record: &AttentionRecord,
) -> Result<(Option<f64>, f64), AttentionError> {
    record.validate()?;
    let token = if record.overlap_pairs.is_empty() {
        None
    } else {
        let sum: f64 = record
            .overlap_pairs
            .iter()
            .map(|&(s, l)| record.attention[l][s])
            .sum();
        Some(sum / record.overlap_pairs.len() as f64)
    };
    let rows = record.attention.len();
    let mass: f64 = record
        .attention
        .iter()
        .map(|row| record.persona_positions.iter().map(|&s| row[s]).sum::<f64>())
        .sum();
    Ok((token, mass / rows as f64))
}

/// Shared-content-token pairs for a response against a serialized input.
///
/// Emits `(input position, response position)` for every persona-position
/// input token that is content-tagged and literally equal to a response
/// token, over all such position pairs.
pub fn overlap_pairs_from(
    input_tokens: &[String],
    persona_positions: &BTreeSet<usize>,
    response_tokens: &[String],
    tagger: &dyn PosTagger,
) -> Result<Vec<(usize, usize)>, BackendError> {
    let input_tags = tagger.tag(input_tokens)?;
    let response_tags = tagger.tag(response_tokens)?;
    let mut pairs = Vec::new();
    for &s in persona_positions {
        if s >= input_tokens.len() || !input_tags[s].is_content() {
            continue;
        }
        for (l, token) in response_tokens.iter().enumerate() {
            if response_tags[l].is_content() && token == &input_tokens[s] {
                pairs.push((s, l));
            }
        }
    }
    Ok(pairs)
}
