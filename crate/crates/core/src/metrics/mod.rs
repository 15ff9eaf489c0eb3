//! Evaluation metrics: n-gram diversity, overlap scores, persona
//! consistency, and attention diagnostics.

mod attention;
mod bleu;
mod ngram;
mod nist;

pub use attention::{
    consistent_attention, overlap_pairs_from, AttentionError, AttentionRecord,
    ROW_SUM_TOLERANCE,
};
pub use bleu::{corpus_bleu, sentence_bleu, Smoothing, BLEU_EPSILON};
pub use ngram::{distinct_n, entropy_n, ngrams, novelty_n, NoveltyMode};
pub use nist::{nist_4, nist_n};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, EntailmentLabel, EntailmentScorer, SimilarityScorer};

/// Mean persona-consistency of responses: each persona sentence judged
/// against its response contributes +1 if entailed, -1 if contradicted,
/// 0 otherwise; sentence contributions are summed per response and the
/// sums averaged. Empty input scores 0.
pub fn c_score(
    responses: &[Vec<String>],
    personas: &[Vec<Vec<String>>],
    nli: &dyn EntailmentScorer,
) -> Result<f64, BackendError> {
    assert_eq!(responses.len(), personas.len());
    if responses.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (response, persona) in responses.iter().zip(personas) {
        for sentence in persona {
            let judgment = nli.entail(response, sentence)?;
            total += match judgment.label {
                EntailmentLabel::Entail => 1.0,
                EntailmentLabel::Neutral => 0.0,
                EntailmentLabel::Contradict => -1.0,
            };
        }
    }
    Ok(total / responses.len() as f64)
}

/// A named bundle of metric values plus free-form provenance notes.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MetricsReport {
    pub fn insert(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_owned(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

/// The standard report over hypothesis/reference pairs.
///
/// Always includes `distinct_1..3`, `entropy_1..3`, `novelty_1..4`
/// (type-set mode), corpus `bleu` (smoothed, order 4), and mean sentence
/// `nist_4`. With a persona list and scorer, adds `c_score`; with a
/// similarity scorer, adds mean pairwise `similarity_f`.
pub fn standard_report(
    hypotheses: &[Vec<String>],
    references: &[Vec<String>],
    personas: Option<(&[Vec<Vec<String>>], &dyn EntailmentScorer)>,
    similarity: Option<&dyn SimilarityScorer>,
) -> Result<MetricsReport, BackendError> {
    assert_eq!(hypotheses.len(), references.len());
    let mut report = MetricsReport::default();
    for n in 1..=3 {
        report.insert(&format!("distinct_{n}"), distinct_n(hypotheses, n));
        report.insert(&format!("entropy_{n}"), entropy_n(hypotheses, n));
    }
    for n in 1..=4 {
        report.insert(
            &format!("novelty_{n}"),
            novelty_n(hypotheses, references, n, NoveltyMode::TypeSet),
        );
    }
    let pairs: Vec<(Vec<String>, Vec<Vec<String>>)> = hypotheses
        .iter()
        .zip(references)
        .map(|(h, r)| (h.clone(), vec![r.clone()]))
        .collect();
    report.insert(
        "bleu",
        if pairs.is_empty() {
            0.0
        } else {
            corpus_bleu(&pairs, 4, Smoothing::AddEpsilon(BLEU_EPSILON))
        },
    );
    let nist = if hypotheses.is_empty() {
        0.0
    } else {
        hypotheses
            .iter()
            .zip(references)
            .map(|(h, r)| nist_4(h, &[r.clone()]))
            .sum::<f64>()
            / hypotheses.len() as f64
    };
    report.insert("nist_4", nist);
    if let Some((personas, nli)) = personas {
        report.insert("c_score", c_score(hypotheses, personas, nli)?);
    }
    if let Some(sim) = similarity {
        let mean = if hypotheses.is_empty() {
            0.0
        } else {
            let mut total = 0.0;
            for (h, r) in hypotheses.iter().zip(references) {
                total += sim.similarity(h, r)?;
            }
            total / hypotheses.len() as f64
        };
        report.insert("similarity_f", mean);
    }
    Ok(report)
}
