//! Data distillation: reduce each sample to its entailed persona sentences
//! and the last history utterance.
//!
//! A source sample yields one distilled sample per persona sentence the
//! response entails at probability >= tau, so it may yield none, one, or
//! several. All distilled fields are verbatim from the source.

use rayon::prelude::*;

use crate::backend::{BackendError, EntailmentScorer};
use crate::corpus::{DialogueSample, DistilledSample, SourceId, Utterance};

/// Indices of persona sentences entailed by the response, ascending.
///
/// The judgment direction is premise=response, hypothesis=persona: the
/// response is the evidence, the persona sentence the claim being tested.
pub fn distill_persona(
    sample: &DialogueSample,
    nli: &dyn EntailmentScorer,
    tau: f64,
) -> Result<Vec<usize>, BackendError> {
    let response = sample.response.tokens();
    let mut kept = Vec::new();
    for (k, persona) in sample.persona.iter().enumerate() {
        if nli.entail(response, persona.tokens())?.entail_prob >= tau {
            kept.push(k);
        }
    }
    Ok(kept)
}

/// The last history utterance, returned by reference: no re-tokenization,
/// no copy. Samples always carry at least one utterance by construction.
pub fn distill_history(sample: &DialogueSample) -> &Utterance {
    sample.history.last().expect("DialogueSample guarantees non-empty history")
}

/// Distill a whole dataset. Output order follows input order, then persona
/// index within each sample; the per-sample work is a pure map, so it runs
/// in parallel and reassembles deterministically.
pub fn distill_dataset(
    samples: &[DialogueSample],
    nli: &dyn EntailmentScorer,
    tau: f64,
) -> Result<Vec<DistilledSample>, BackendError> {
    let per_sample: Vec<Vec<DistilledSample>> = samples
        .par_iter()
        .map(|sample| {
            let history = distill_history(sample).clone();
            distill_persona(sample, nli, tau).map(|kept| {
                kept.into_iter()
                    .map(|k| DistilledSample {
                        persona: sample.persona[k].clone(),
                        history: history.clone(),
                        response: sample.response.clone(),
                        source_id: SourceId {
                            dialogue_id: sample.dialogue_id.clone(),
                            turn_index: sample.turn_index,
                            persona_index: k,
                        },
                    })
                    .collect()
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(per_sample.into_iter().flatten().collect())
}
