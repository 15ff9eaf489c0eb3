//! BLEU with clipped modified n-gram precision and a closest-reference
//! brevity penalty.
//!
//! The add-epsilon smoothing replaces zero (or undefined, when the
//! candidate is shorter than `n`) precisions with a small constant so that
//! short or disjoint candidates still receive a graded score instead of a
//! hard zero.

use std::collections::BTreeMap;

use super::ngram::ngrams;

pub const BLEU_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Plain BLEU: any zero precision zeroes the whole score.
    None,
    /// Replace zero or undefined precisions with this constant.
    AddEpsilon(f64),
}

fn counts(tokens: &[String], n: usize) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    for gram in ngrams(tokens, n) {
        *map.entry(gram).or_insert(0) += 1;
    }
    map
}

/// Clipped match count and candidate gram count for one order.
fn modified_precision(
    candidate: &[String],
    references: &[Vec<String>],
    n: usize,
) -> (usize, usize) {
    let cand = counts(candidate, n);
    let denom: usize = cand.values().sum();
    let mut matches = 0usize;
    for (gram, &count) in &cand {
        let max_ref = references
            .iter()
            .map(|r| counts(r, n).get(gram).copied().unwrap_or(0))
            .max()
            .unwrap_or(0);
        matches += count.min(max_ref);
    }
    (matches, denom)
}

/// Reference length closest to `c`; ties go to the shorter reference.
fn closest_ref_len(c: usize, references: &[Vec<String>]) -> usize {
    references
        .iter()
        .map(|r| r.len())
        .min_by_key(|&r| (r.abs_diff(c), r))
        .expect("at least one reference")
}

fn brevity_penalty(c: usize, r: usize) -> f64 {
    if c >= r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    }
}

fn combine(stats: &[(usize, usize)], c: usize, r: usize, smoothing: Smoothing) -> f64 {
    if c == 0 {
        return 0.0;
    }
    let n_max = stats.len() as f64;
    let mut log_sum = 0.0;
    for &(matches, denom) in stats {
        let p = match smoothing {
            Smoothing::None => {
                if denom == 0 || matches == 0 {
                    return 0.0;
                }
                matches as f64 / denom as f64
            }
            Smoothing::AddEpsilon(eps) => {
                if denom == 0 {
                    eps
                } else if matches == 0 {
                    eps / denom as f64
                } else {
                    matches as f64 / denom as f64
                }
            }
        };
        log_sum += p.ln() / n_max;
    }
    brevity_penalty(c, r) * log_sum.exp()
}

/// BLEU-`n_max` of one candidate against one or more references.
///
/// Panics if `references` is empty or `n_max` is 0.
pub fn sentence_bleu(
    candidate: &[String],
    references: &[Vec<String>],
    n_max: usize,
    smoothing: Smoothing,
) -> f64 {
    assert!(n_max >= 1);
    assert!(!references.is_empty());
    let stats: Vec<(usize, usize)> = (1..=n_max)
        .map(|n| modified_precision(candidate, references, n))
        .collect();
    let c = candidate.len();
    let r = closest_ref_len(c, references);
    combine(&stats, c, r, smoothing)
}

/// Corpus BLEU: match and gram counts are pooled across pairs before the
/// precisions are formed, and the brevity penalty uses summed lengths.
pub fn corpus_bleu(
    pairs: &[(Vec<String>, Vec<Vec<String>>)],
    n_max: usize,
    smoothing: Smoothing,
) -> f64 {
    assert!(n_max >= 1);
    let mut stats = vec![(0usize, 0usize); n_max];
    let mut c_total = 0usize;
    let mut r_total = 0usize;
    for (candidate, references) in pairs {
        assert!(!references.is_empty());
        for (i, stat) in stats.iter_mut().enumerate() {
            let (m, d) = modified_precision(candidate, references, i + 1);
            stat.0 += m;
            stat.1 += d;
        }
        c_total += candidate.len();
        r_total += closest_ref_len(candidate.len(), references);
    }
    combine(&stats, c_total, r_total, smoothing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn refs(texts: &[&str]) -> Vec<Vec<String>> {
        texts.iter().map(|t| tokenize(t)).collect()
    }

    #[test]
    fn identity_scores_one() {
        let cand = tokenize("the cat sat on the mat");
        let r = refs(&["the cat sat on the mat"]);
        assert_eq!(sentence_bleu(&cand, &r, 4, Smoothing::None), 1.0);
        assert_eq!(sentence_bleu(&cand, &r, 4, Smoothing::AddEpsilon(BLEU_EPSILON)), 1.0);
    }

    // p1 = 3/3 (clip keeps both "the"), p2 = 1/2, BP = exp(1 - 5/3).
    #[test]
    fn hand_computed_two_gram_case() {
        let cand = tokenize("the the cat");
        let r = refs(&["the cat on the mat"]);
        let got = sentence_bleu(&cand, &r, 2, Smoothing::None);
        let expected = (1.0 - 5.0 / 3.0_f64).exp() * 0.5_f64.sqrt();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn clipping_caps_repeated_grams() {
        // "the" appears twice in the reference, seven times in the candidate.
        let cand = tokenize("the the the the the the the");
        let r = refs(&["the cat on the mat"]);
        let got = sentence_bleu(&cand, &r, 1, Smoothing::None);
        assert!((got - 2.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_candidate_is_zero_unsmoothed() {
        let cand = tokenize("x y z");
        let r = refs(&["a b c"]);
        assert_eq!(sentence_bleu(&cand, &r, 4, Smoothing::None), 0.0);
    }

    #[test]
    fn smoothing_grades_disjoint_candidates() {
        let r = refs(&["a b c d"]);
        let near = sentence_bleu(&tokenize("a b x d"), &r, 4, Smoothing::AddEpsilon(BLEU_EPSILON));
        let far = sentence_bleu(&tokenize("x y z w"), &r, 4, Smoothing::AddEpsilon(BLEU_EPSILON));
        assert!(near > far, "{near} vs {far}");
        assert!(far > 0.0);
    }

    // A 2-token candidate has no 3- or 4-grams: those precisions become
    // epsilon itself rather than epsilon over a denominator.
    #[test]
    fn short_candidate_uses_epsilon_for_missing_orders() {
        let cand = tokenize("a b");
        let r = refs(&["a b"]);
        let got = sentence_bleu(&cand, &r, 4, Smoothing::AddEpsilon(BLEU_EPSILON));
        let expected =
            (BLEU_EPSILON.ln() / 2.0).exp(); // p1 = p2 = 1, p3 = p4 = eps, BP = 1
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn empty_candidate_is_zero() {
        let r = refs(&["a b"]);
        assert_eq!(sentence_bleu(&[], &r, 4, Smoothing::AddEpsilon(BLEU_EPSILON)), 0.0);
    }

    #[test]
    fn brevity_tie_prefers_shorter_reference() {
        // c = 3; references of lengths 2 and 4 tie on |r - c|. The shorter
        // wins, so BP = 1 (c >= r).
        let cand = tokenize("a b c");
        let r = refs(&["a b", "a b c d"]);
        let got = sentence_bleu(&cand, &r, 1, Smoothing::None);
        assert_eq!(got, 1.0);
    }

    #[test]
    fn multiple_references_clip_against_best() {
        let cand = tokenize("a a b");
        let r = refs(&["a a c", "b d e"]);
        // Unigrams: a clipped at 2 (first ref), b at 1 (second ref) → 3/3.
        let got = sentence_bleu(&cand, &r, 1, Smoothing::None);
        assert_eq!(got, 1.0);
    }

    #[test]
    fn corpus_pools_counts_not_scores() {
        let pairs = vec![
            (tokenize("a b"), refs(&["a b"])),
            (tokenize("x y"), refs(&["p q"])),
        ];
        // Pooled p1 = 2/4; sentence-mean would be (1 + 0)/2 on raw scores.
        let got = corpus_bleu(&pairs, 1, Smoothing::None);
        assert!((got - 0.5).abs() < 1e-12);
    }

    #[test]
    fn corpus_of_identities_is_one() {
        // Sentences long enough that every order up to 4 has real counts.
        let pairs = vec![
            (tokenize("a b c d e"), refs(&["a b c d e"])),
            (tokenize("f g h i"), refs(&["f g h i"])),
        ];
        assert_eq!(corpus_bleu(&pairs, 4, Smoothing::AddEpsilon(BLEU_EPSILON)), 1.0);
    }
}
