//! NIST n-gram co-occurrence score with information weights.
//!
//! Rare reference n-grams carry more information than common ones:
//! `info(w1..wn) = log2(count(w1..wn-1) / count(w1..wn))`, with the total
//! reference token count as the order-0 "prefix" for unigrams. Matched
//! candidate n-grams contribute their info weight, divided by the number
//! of candidate n-grams of that order, summed over orders, then scaled by
//! a brevity penalty that reaches 1/2 when the candidate is two thirds of
//! the mean reference length.

use std::collections::BTreeMap;

use super::ngram::ngrams;

fn gram_counts(references: &[Vec<String>], n: usize) -> BTreeMap<String, usize> {
    let mut map = BTreeMap::new();
    for r in references {
        for gram in ngrams(r, n) {
            *map.entry(gram).or_insert(0) += 1;
        }
    }
    map
}

/// Information weight of each reference n-gram of order `n`.
fn info_weights(references: &[Vec<String>], n: usize) -> BTreeMap<String, f64> {
    let grams = gram_counts(references, n);
    let prefix_count = |gram: &str| -> usize {
        if n == 1 {
            references.iter().map(Vec::len).sum()
        } else {
            let prefix: Vec<String> =
                gram.split(' ').take(n - 1).map(str::to_owned).collect();
            gram_counts(references, n - 1)
                .get(&prefix.join(" "))
                .copied()
                .unwrap_or(0)
        }
    };
    grams
        .iter()
        .map(|(gram, &count)| {
            let prefix = prefix_count(gram);
            let info = if prefix == 0 {
                0.0
            } else {
                (prefix as f64 / count as f64).log2()
            };
            (gram.clone(), info)
        })
        .collect()
}

fn brevity_penalty(c: usize, mean_ref_len: f64) -> f64 {
    if c == 0 || mean_ref_len <= 0.0 {
        return 0.0;
    }
    let beta = 0.5_f64.ln() / (2.0_f64 / 3.0).ln().powi(2);
    let ratio = (c as f64 / mean_ref_len).min(1.0);
    (beta * ratio.ln().powi(2)).exp()
}

/// NIST score of one candidate against its references, orders 1..=`n_max`.
///
/// Panics if `references` is empty or `n_max` is 0.
pub fn nist_n(candidate: &[String], references: &[Vec<String>], n_max: usize) -> f64 {
    assert!(n_max >= 1);
    assert!(!references.is_empty());
    if candidate.is_empty() {
        return 0.0;
    }
    let mut score = 0.0;
    for n in 1..=n_max {
        let info = info_weights(references, n);
        let ref_counts = gram_counts(references, n);
        let cand_grams = ngrams(candidate, n);
        if cand_grams.is_empty() {
            continue;
        }
        let mut cand_counts: BTreeMap<&str, usize> = BTreeMap::new();
        for gram in &cand_grams {
            *cand_counts.entry(gram).or_insert(0) += 1;
        }
        let mut matched_info = 0.0;
        for (gram, &count) in &cand_counts {
            let clipped = count.min(ref_counts.get(*gram).copied().unwrap_or(0));
            matched_info += clipped as f64 * info.get(*gram).copied().unwrap_or(0.0);
        }
        score += matched_info / cand_grams.len() as f64;
    }
    let mean_ref_len =
        references.iter().map(Vec::len).sum::<usize>() as f64 / references.len() as f64;
    score * brevity_penalty(candidate.len(), mean_ref_len)
}

/// NIST with the conventional maximum order of 4.
pub fn nist_4(candidate: &[String], references: &[Vec<String>]) -> f64 {
    nist_n(candidate, references, 4)
}
