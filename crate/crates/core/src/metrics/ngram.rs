//! N-gram diversity and novelty measures.
//!
//! N-grams never cross sentence boundaries. Grams are keyed by joining
//! tokens with a space, which is unambiguous because canonical tokens
//! contain no whitespace.

use std::collections::{BTreeMap, BTreeSet};

use crate::num::Scalar;

/// The n-grams of one sentence, in order, as joined keys.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    assert!(n >= 1);
    if tokens.len() < n {
        return Vec::new();
    }
    tokens.windows(n).map(|w| w.join(" ")).collect()
}

fn type_set(corpus: &[Vec<String>], n: usize) -> BTreeSet<String> {
    corpus.iter().flat_map(|s| ngrams(s, n)).collect()
}

/// Unique n-gram types divided by total n-gram tokens; 0 when the corpus
/// has no n-grams of this order.
pub fn distinct_n<S: Scalar>(corpus: &[Vec<String>], n: usize) -> S {
    let mut types = BTreeSet::new();
    let mut total = 0usize;
    for sentence in corpus {
        for gram in ngrams(sentence, n) {
            types.insert(gram);
            total += 1;
        }
    }
    if total == 0 {
        return S::zero();
    }
    S::from_count(types.len()) / S::from_count(total)
}

/// Mean per-sentence Shannon entropy (natural log) of the sentence's n-gram
/// frequency distribution. Sentences shorter than `n` contribute 0 and are
/// still counted in the mean.
pub fn entropy_n<S: Scalar>(corpus: &[Vec<String>], n: usize) -> S {
    if corpus.is_empty() {
        return S::zero();
    }
    let mut sum = S::zero();
    for sentence in corpus {
        let grams = ngrams(sentence, n);
        if grams.is_empty() {
            log::debug!("sentence of {} tokens has no {n}-grams", sentence.len());
            continue;
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for gram in &grams {
            *counts.entry(gram).or_insert(0) += 1;
        }
        let total = S::from_count(grams.len());
        let mut h = S::zero();
        for &count in counts.values() {
            let p = S::from_count(count) / total;
            h = h - p * p.ln();
        }
        sum = sum + h;
    }
    sum / S::from_count(corpus.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoveltyMode {
    /// Proportion of candidate n-gram *types* absent from the reference
    /// type set (the default).
    TypeSet,
    /// Per-sentence absent-type proportion, averaged over candidate
    /// sentences.
    PerSample,
}

/// Share of candidate n-grams unseen in the reference corpus; 0 when the
/// candidate has no n-grams.
pub fn novelty_n<S: Scalar>(
    candidate: &[Vec<String>],
    reference: &[Vec<String>],
    n: usize,
    mode: NoveltyMode,
) -> S {
    let ref_types = type_set(reference, n);
    match mode {
        NoveltyMode::TypeSet => {
            let cand_types = type_set(candidate, n);
            if cand_types.is_empty() {
                return S::zero();
            }
            let novel = cand_types.iter().filter(|g| !ref_types.contains(*g)).count();
            S::from_count(novel) / S::from_count(cand_types.len())
        }
        NoveltyMode::PerSample => {
            if candidate.is_empty() {
                return S::zero();
            }
            let mut sum = S::zero();
            for sentence in candidate {
                let types: BTreeSet<String> = ngrams(sentence, n).into_iter().collect();
                if types.is_empty() {
                    continue;
                }
                let novel = types.iter().filter(|g| !ref_types.contains(*g)).count();
                sum = sum + S::from_count(novel) / S::from_count(types.len());
            }
            sum / S::from_count(candidate.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn corpus(texts: &[&str]) -> Vec<Vec<String>> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    #[test]
    fn distinct_counts_types_over_tokens() {
        // {i, am} over 3 unigram tokens.
        let d: f64 = distinct_n(&corpus(&["i am i"]), 1);
        assert_eq!(d, 2.0 / 3.0);
    }

    #[test]
    fn distinct_shrinks_under_repetition() {
        let once = corpus(&["a b c"]);
        let thrice = corpus(&["a b c", "a b c", "a b c"]);
        let d1: f64 = distinct_n(&once, 1);
        let d3: f64 = distinct_n(&thrice, 1);
        assert_eq!(d1, 1.0);
        assert_eq!(d3, 1.0 / 3.0);
    }

    #[test]
    fn distinct_empty_orders_are_zero() {
        let d: f64 = distinct_n(&corpus(&["a b"]), 3);
        assert_eq!(d, 0.0);
        let d: f64 = distinct_n::<f64>(&[], 1);
        assert_eq!(d, 0.0);
    }

    // H("a a b") = ln 3 - (2/3) ln 2, evaluated from the closed form.
    #[test]
    fn entropy_analytic_case() {
        let h: f64 = entropy_n(&corpus(&["a a b"]), 1);
        let expected = 3.0_f64.ln() - (2.0 / 3.0) * 2.0_f64.ln();
        assert!((h - expected).abs() < 1e-12, "{h} vs {expected}");
    }

    #[test]
    fn entropy_degenerate_and_uniform() {
        let h: f64 = entropy_n(&corpus(&["a a a a"]), 1);
        assert_eq!(h, 0.0);
        let h: f64 = entropy_n(&corpus(&["a b c d e"]), 1);
        assert!((h - 5.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_counts_short_sentences_in_the_mean() {
        // Second sentence has no bigrams: contributes 0 but divides.
        let h2: f64 = entropy_n(&corpus(&["a b a b", "x"]), 2);
        let alone: f64 = entropy_n(&corpus(&["a b a b"]), 2);
        assert!((h2 - alone / 2.0).abs() < 1e-12);
    }

    #[test]
    fn novelty_set_difference_case() {
        // Candidate types {a,b,c}, reference types {b,c,d} → 1/3.
        let nov: f64 =
            novelty_n(&corpus(&["a b c"]), &corpus(&["b c d"]), 1, NoveltyMode::TypeSet);
        assert!((nov - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn novelty_of_subset_is_zero() {
        let nov: f64 =
            novelty_n(&corpus(&["b c"]), &corpus(&["a b c d"]), 1, NoveltyMode::TypeSet);
        assert_eq!(nov, 0.0);
    }

    #[test]
    fn novelty_per_sample_mode() {
        // Sentence novelties 1.0 ({x,y} unseen) and 0.0 ({a,b} seen): mean 0.5.
        let nov: f64 = novelty_n(
            &corpus(&["x y", "a b"]),
            &corpus(&["a b"]),
            1,
            NoveltyMode::PerSample,
        );
        assert!((nov - 0.5).abs() < 1e-12);
    }

    #[test]
    fn corpus_order_does_not_matter() {
        let a = corpus(&["a b c", "c d", "e f g h"]);
        let b = corpus(&["e f g h", "a b c", "c d"]);
        for n in 1..=3 {
            let da: f64 = distinct_n(&a, n);
            let db: f64 = distinct_n(&b, n);
            assert_eq!(da, db);
            let na: f64 = novelty_n(&a, &b, n, NoveltyMode::TypeSet);
            let nb: f64 = novelty_n(&b, &a, n, NoveltyMode::TypeSet);
            // Novelty both ways is 0 here because the corpora are equal sets.
            assert_eq!(na, 0.0);
            assert_eq!(nb, 0.0);
        }
    }

    #[test]
    fn metrics_work_in_single_precision() {
        let d: f32 = distinct_n(&corpus(&["i am i"]), 1);
        assert!((d - 2.0 / 3.0).abs() < 1e-6);
        let h: f32 = entropy_n(&corpus(&["a a b"]), 1);
        assert!((h - 0.636_514_2).abs() < 1e-6);
    }
}
