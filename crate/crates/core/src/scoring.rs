//! Linear rating functions for edited personas and rebuilt samples.
//!
//! Both are plain convex combinations; the generic forms carry the math and
//! the `score_*` wrappers bind them to backends.

use crate::backend::{BackendError, EntailmentScorer, FluencyScorer, SimilarityScorer};
use crate::num::Scalar;
use crate::Score;

/// Rating for an edited persona: `alpha * ppl + (1 - alpha) * similarity`.
///
/// Both inputs live in [0,1] and lower is better on both axes — a fluent
/// edit that strays far from its source scores best.
pub fn persona_edit_score<S: Scalar>(normalized_ppl: S, similarity: S, alpha: S) -> S {
    alpha * normalized_ppl + (S::one() - alpha) * similarity
}

/// Quality score for a rebuilt sample:
/// `beta * (1 - ppl) + gamma * nli + (1 - beta - gamma) * nli_c`.
///
/// Perplexity enters inverted so that all three terms are higher-better and
/// a single keep-threshold rule (`score >= T`) is coherent.
pub fn sample_keep_score<S: Scalar>(
    normalized_ppl: S,
    persona_entail: S,
    coherence_entail: S,
    beta: S,
    gamma: S,
) -> S {
    beta * (S::one() - normalized_ppl)
        + gamma * persona_entail
        + (S::one() - beta - gamma) * coherence_entail
}

/// Backend-bound form of [`persona_edit_score`]; lower is better.
pub fn score_edited_persona(
    candidate: &[String],
    original: &[String],
    fluency: &dyn FluencyScorer,
    similarity: &dyn SimilarityScorer,
    alpha: Score,
) -> Result<Score, BackendError> {
    Ok(persona_edit_score(
        fluency.normalized_ppl(candidate)?,
        similarity.similarity(candidate, original)?,
        alpha,
    ))
}

/// Backend-bound form of [`sample_keep_score`]; higher is better, keep when
/// the result clears the active threshold.
#[allow(clippy::too_many_arguments)]
pub fn score_sample(
    response: &[String],
    persona: &[String],
    history: &[String],
    beta: Score,
    gamma: Score,
    fluency: &dyn FluencyScorer,
    persona_nli: &dyn EntailmentScorer,
    coherence_nli: &dyn EntailmentScorer,
) -> Result<Score, BackendError> {
    Ok(sample_keep_score(
        fluency.normalized_ppl(response)?,
        persona_nli.entail(response, persona)?.entail_prob,
        coherence_nli.entail(history, response)?.entail_prob,
        beta,
        gamma,
    ))
}
