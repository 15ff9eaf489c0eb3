//! Response aligning: carry a persona edit through to the response.
//!
//! When a token-level edit changes a content word that the gold response
//! reuses, the response can be fixed up by substitution alone; otherwise a
//! fresh response has to be generated.

use std::collections::BTreeMap;

use crate::backend::{BackendError, PosTagger};

/// Substitute edited persona content words into the response.
///
/// Requires the edited persona to be position-aligned with the original
/// (token-level edits preserve length). For every position whose original
/// token is content-tagged, was changed, and occurs in the response, every
/// occurrence of that token in the response is replaced with the edited
/// token. Returns `None` when no such substitution applies — the response
/// does not echo any edited word — or when the lengths differ.
pub fn align_response_token_edit(
    original_persona: &[String],
    edited_persona: &[String],
    response: &[String],
    tagger: &dyn PosTagger,
) -> Result<Option<Vec<String>>, BackendError> {
    if original_persona.len() != edited_persona.len() {
        return Ok(None);
    }
    let tags = tagger.tag(original_persona)?;
    // Later positions win if the same word was edited twice differently.
    let mut substitutions: BTreeMap<&String, &String> = BTreeMap::new();
    for i in 0..original_persona.len() {
        if tags[i].is_content() && original_persona[i] != edited_persona[i] {
            substitutions.insert(&original_persona[i], &edited_persona[i]);
        }
    }
    substitutions.retain(|word, _| response.contains(word));
    if substitutions.is_empty() {
        return Ok(None);
    }
    let aligned = response
        .iter()
        .map(|t| substitutions.get(t).map_or_else(|| t.clone(), |s| (*s).clone()))
        .collect();
    Ok(Some(aligned))
}
