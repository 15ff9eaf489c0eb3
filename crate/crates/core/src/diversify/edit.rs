//! Persona sentence editing: token-level masked infilling and phrase-level
//! tail regeneration.

use rand::Rng;

use super::{EditKind, EditedPersona};
use crate::backend::{BackendError, Continuer, Infiller, PosTagger};

/// Mask a fixed share of the content-tagged tokens and infill.
///
/// Eligible positions are those whose tag is a content tag; the number
/// masked is `ceil(mask_ratio * eligible)`. Candidates equal to the
/// original are dropped, and at most `k` come back. A persona with no
/// eligible tokens yields no candidates.
pub fn token_level_edits(
    persona: &[String],
    mask_ratio: f64,
    k: usize,
    tagger: &dyn PosTagger,
    infiller: &dyn Infiller,
    rng: &mut impl Rng,
) -> Result<Vec<EditedPersona>, BackendError> {
    let tags = tagger.tag(persona)?;
    let eligible: Vec<usize> = tags
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_content())
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() || k == 0 {
        return Ok(Vec::new());
    }
    let m = ((mask_ratio * eligible.len() as f64).ceil() as usize).clamp(1, eligible.len());
    let mut positions: Vec<usize> = rand::seq::index::sample(rng, eligible.len(), m)
        .into_iter()
        .map(|i| eligible[i])
        .collect();
    positions.sort_unstable();
    let seed = rng.gen::<u64>();
    // One extra requested: infiller outputs are unique, so at most one can
    // equal the original and survive into the filter below.
    let candidates = infiller.infill(persona, &positions, k + 1, seed)?;
    Ok(candidates
        .into_iter()
        .filter(|c| c.as_slice() != persona)
        .take(k)
        .map(|tokens| EditedPersona { tokens, kind: EditKind::TokenLevel, f_score: None })
        .collect())
}

/// Drop a random-sized tail and let the generator finish the sentence.
///
/// The removed span is `max(2, ceil(r * len))` tokens for `r` drawn
/// uniformly from `ratio_range`, clamped so at least one token of prefix
/// survives; the continuation may add at most `ceil(0.3 * len)` tokens.
/// Personas of one or two tokens are left alone.
pub fn phrase_level_edits(
    persona: &[String],
    ratio_range: [f64; 2],
    k: usize,
    continuer: &dyn Continuer,
    rng: &mut impl Rng,
) -> Result<Vec<EditedPersona>, BackendError> {
    let len = persona.len();
    if len <= 2 || k == 0 {
        return Ok(Vec::new());
    }
    let r = rng.gen_range(ratio_range[0]..=ratio_range[1]);
    let removal = ((r * len as f64).ceil() as usize).max(2).min(len - 1);
    let prefix = &persona[..len - removal];
    let max_new = (0.3 * len as f64).ceil() as usize;
    let seed = rng.gen::<u64>();
    let candidates = continuer.continue_prefix(prefix, max_new, k + 1, seed)?;
    Ok(candidates
        .into_iter()
        .filter(|c| c.as_slice() != persona)
        .take(k)
        .map(|tokens| EditedPersona { tokens, kind: EditKind::PhraseLevel, f_score: None })
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::backend::{RuleListPosTagger, TableContinuer, TableInfiller};
    use crate::seeding::rng_for;
    use crate::text::tokenize;

    /// Records the mask positions it was asked to fill.
    struct SpyInfiller {
        calls: Mutex<Vec<Vec<usize>>>,
    }

    impl Infiller for SpyInfiller {
        fn infill(
            &self,
            tokens: &[String],
            mask_positions: &[usize],
            _n: usize,
            _seed: u64,
        ) -> Result<Vec<Vec<String>>, BackendError> {
            self.calls.lock().unwrap().push(mask_positions.to_vec());
            let mut out = tokens.to_vec();
            for &p in mask_positions {
                out[p] = format!("x{p}");
            }
            Ok(vec![out])
        }
    }

    fn table_infiller() -> TableInfiller {
        TableInfiller::from_table(
            [("cats", &["dogs", "fish"][..]), ("like", &["love"][..])]
                .into_iter()
                .map(|(k, vs)| {
                    (k.to_owned(), vs.iter().map(|v| (*v).to_owned()).collect())
                })
                .collect(),
        )
    }

    // "i like cats" has 2 eligible tokens; ceil(0.8 * 2) = 2 masked.
    #[test]
    fn masks_the_ceiling_share_of_content_tokens() {
        let spy = SpyInfiller { calls: Mutex::new(Vec::new()) };
        let persona = tokenize("i like cats");
        let mut rng = rng_for(7, &["test"]);
        let out = token_level_edits(&persona, 0.8, 5, &RuleListPosTagger, &spy, &mut rng)
            .unwrap();
        let calls = spy.calls.lock().unwrap();
        assert_eq!(calls.len(), 1);
        assert_eq!(calls[0], vec![1, 2]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].tokens, tokenize("i x1 x2"));
        assert_eq!(out[0].kind, EditKind::TokenLevel);
    }

    #[test]
    fn half_ratio_masks_half_rounded_up() {
        // "i work at a farm" has eligible {work, at, farm}; ceil(1.5) = 2.
        let spy = SpyInfiller { calls: Mutex::new(Vec::new()) };
        let persona = tokenize("i work at a farm");
        let mut rng = rng_for(7, &["test"]);
        token_level_edits(&persona, 0.5, 5, &RuleListPosTagger, &spy, &mut rng).unwrap();
        let calls = spy.calls.lock().unwrap();
        assert_eq!(calls[0].len(), 2);
        for p in &calls[0] {
            assert!([1usize, 2, 4].contains(p), "position {p} is not eligible");
        }
        let mut sorted = calls[0].clone();
        sorted.sort_unstable();
        assert_eq!(&sorted, &calls[0], "positions must be ascending");
    }

    #[test]
    fn no_content_tokens_means_no_candidates() {
        let persona = tokenize("i am");
        let mut rng = rng_for(7, &["test"]);
        let out = token_level_edits(
            &persona,
            0.8,
            5,
            &RuleListPosTagger,
            &table_infiller(),
            &mut rng,
        )
        .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn token_edits_differ_from_original_and_respect_k() {
        let persona = tokenize("i like cats");
        let mut rng = rng_for(3, &["test"]);
        let out = token_level_edits(
            &persona,
            0.8,
            1,
            &RuleListPosTagger,
            &table_infiller(),
            &mut rng,
        )
        .unwrap();
        assert!(out.len() <= 1);
        for c in &out {
            assert_ne!(c.tokens, persona);
            assert_eq!(c.tokens.len(), persona.len());
        }
    }

    #[test]
    fn token_edits_are_deterministic_per_rng_stream() {
        let persona = tokenize("i like cats");
        let run = || {
            let mut rng = rng_for(11, &["edit"]);
            token_level_edits(
                &persona,
                0.8,
                4,
                &RuleListPosTagger,
                &table_infiller(),
                &mut rng,
            )
            .unwrap()
        };
        let a: Vec<Vec<String>> = run().into_iter().map(|c| c.tokens).collect();
        let b: Vec<Vec<String>> = run().into_iter().map(|c| c.tokens).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn short_personas_skip_phrase_editing() {
        let continuer = TableContinuer::fit(&[tokenize("i like cats")]);
        let mut rng = rng_for(7, &["test"]);
        let out =
            phrase_level_edits(&tokenize("hi there"), [0.3, 0.6], 5, &continuer, &mut rng)
                .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn phrase_edits_keep_prefix_and_respect_length_budget() {
        let corpus: Vec<Vec<String>> = [
            "i like to play hockey with my friends",
            "i like to eat pizza on sundays",
            "i like to read books about history",
        ]
        .iter()
        .map(|t| tokenize(t))
        .collect();
        let continuer = TableContinuer::fit(&corpus);
        let persona = tokenize("i like to play hockey with my friends");
        let len = persona.len();
        let mut rng = rng_for(5, &["phrase"]);
        let out =
            phrase_level_edits(&persona, [0.3, 0.6], 6, &continuer, &mut rng).unwrap();
        assert!(!out.is_empty());
        let max_new = (0.3 * len as f64).ceil() as usize;
        for c in &out {
            assert_ne!(c.tokens, persona);
            assert_eq!(c.kind, EditKind::PhraseLevel);
            // Some prefix survives and the continuation budget holds:
            // |prefix| = len - removal, removal in [2, len-1].
            let prefix_len = (1..len)
                .rev()
                .find(|&p| c.tokens.len() >= p && c.tokens[..p] == persona[..p])
                .unwrap_or(0);
            assert!(prefix_len >= 1, "no shared prefix in {:?}", c.tokens);
            assert!(
                c.tokens.len() <= prefix_len + max_new,
                "{:?} exceeds budget",
                c.tokens
            );
        }
    }

    // The removal-size law, pinned with a degenerate ratio range.
    #[test]
    fn removal_size_is_max_of_two_and_ceiling() {
        struct SpyContinuer {
            prefix_lens: Mutex<Vec<usize>>,
        }
        impl Continuer for SpyContinuer {
            fn continue_prefix(
                &self,
                prefix: &[String],
                _max_new: usize,
                _n: usize,
                _seed: u64,
            ) -> Result<Vec<Vec<String>>, BackendError> {
                self.prefix_lens.lock().unwrap().push(prefix.len());
                Ok(Vec::new())
            }
        }
        let spy = SpyContinuer { prefix_lens: Mutex::new(Vec::new()) };
        let mut rng = rng_for(7, &["test"]);
        // len 10, r = 0.3: removal = max(2, 3) = 3 → prefix 7.
        let ten = tokenize("a b c d e f g h i j");
        phrase_level_edits(&ten, [0.3, 0.3], 5, &spy, &mut rng).unwrap();
        // len 4, r = 0.3: ceil(1.2) = 2 → removal 2 → prefix 2.
        let four = tokenize("a b c d");
        phrase_level_edits(&four, [0.3, 0.3], 5, &spy, &mut rng).unwrap();
        // len 3, r = 0.6: ceil(1.8) = 2 → removal 2 → prefix 1.
        let three = tokenize("a b c");
        phrase_level_edits(&three, [0.6, 0.6], 5, &spy, &mut rng).unwrap();
        assert_eq!(*spy.prefix_lens.lock().unwrap(), vec![7, 2, 1]);
    }
}
