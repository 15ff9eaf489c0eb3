//! History augmentation by round-trip translation.
//!
//! The original last utterance is always kept; the most divergent
//! round-trip variants (lowest smoothed BLEU against the original) are
//! added beside it.

use super::HistoryKind;
use crate::backend::{back_translate, BackendError, TranslationModel};
use crate::metrics::{sentence_bleu, Smoothing, BLEU_EPSILON};

/// The original history plus up to `n_h` back-translated variants.
///
/// Variants are ranked by smoothed BLEU-4 against the original, lowest
/// first, ties broken by generation order; the selected variants are
/// returned in generation order after the original.
pub fn augment_history(
    history: &[String],
    translator: &dyn TranslationModel,
    beam: usize,
    n_h: usize,
    seed: u64,
) -> Result<Vec<(Vec<String>, HistoryKind)>, BackendError> {
    let mut out = vec![(history.to_vec(), HistoryKind::Original)];
    if n_h == 0 {
        return Ok(out);
    }
    let candidates = back_translate(translator, history, beam, seed)?;
    let reference = vec![history.to_vec()];
    let mut ranked: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (i, sentence_bleu(c, &reference, 4, Smoothing::AddEpsilon(BLEU_EPSILON)))
        })
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let mut chosen: Vec<usize> = ranked.iter().take(n_h).map(|&(i, _)| i).collect();
    chosen.sort_unstable();
    for i in chosen {
        out.push((candidates[i].clone(), HistoryKind::BackTranslated));
    }
    Ok(out)
}
