//! Deterministic, corpus-free reference backends.
//!
//! These stand in for the pretrained models so the whole pipeline runs and
//! tests hermetically. They are intentionally simple but honor every trait
//! contract: determinism under (inputs, seed), concurrency safety, and the
//! output-shape rules of each operation.

use std::collections::BTreeMap;

use rand::Rng;

use super::{
    BackendError, Continuer, EntailmentJudgment, EntailmentLabel, EntailmentScorer,
    FluencyScorer, Infiller, PosTag, Responder, RuleListPosTagger, SimilarityScorer,
    TranslationModel,
};
use crate::seeding::rng_for;

/// Entailment as content-token overlap: the fraction of the hypothesis's
/// content tokens (content = tags the rule tagger marks as content) that
/// also appear as content tokens of the premise. Identical token sequences
/// short-circuit to probability 1. Never emits `Contradict`.
#[derive(Debug, Clone)]
pub struct OverlapNli {
    threshold: f64,
    tagger: RuleListPosTagger,
}

impl OverlapNli {
    pub fn new(threshold: f64) -> Self {
        OverlapNli { threshold, tagger: RuleListPosTagger::new() }
    }

    fn content_set(&self, tokens: &[String]) -> std::collections::BTreeSet<String> {
        tokens.iter().filter(|t| self.tagger.tag_token(t).is_content()).cloned().collect()
    }
}

impl EntailmentScorer for OverlapNli {
    fn entail(
        &self,
        premise: &[String],
        hypothesis: &[String],
    ) -> Result<EntailmentJudgment, BackendError> {
        let prob = if premise == hypothesis {
            1.0
        } else {
            let hyp = self.content_set(hypothesis);
            if hyp.is_empty() {
                0.0
            } else {
                let prem = self.content_set(premise);
                hyp.intersection(&prem).count() as f64 / hyp.len() as f64
            }
        };
        let label =
            if prob >= self.threshold { EntailmentLabel::Entail } else { EntailmentLabel::Neutral };
        Ok(EntailmentJudgment { entail_prob: prob, label })
    }
}

/// `min(raw, C)/C` — the normalization every fluency scorer applies.
pub fn normalize_perplexity(raw: f64, constant: f64) -> f64 {
    raw.min(constant) / constant
}

/// Character n-gram language model with Laplace smoothing, fitted on the
/// persona sentences of the loaded corpus. Text is scored as characters of
/// the space-joined token sequence with begin/end padding.
#[derive(Debug, Clone)]
pub struct CharNgramLm {
    order: usize,
    constant: f64,
    counts: BTreeMap<String, BTreeMap<char, u32>>,
    totals: BTreeMap<String, u32>,
    vocab_size: usize,
}

const PAD_START: char = '\u{2}';
const PAD_END: char = '\u{3}';

impl CharNgramLm {
    pub fn fit(persona_corpus: &[Vec<String>], order: usize, constant: f64) -> Self {
        assert!(order >= 1);
        let mut counts: BTreeMap<String, BTreeMap<char, u32>> = BTreeMap::new();
        let mut totals: BTreeMap<String, u32> = BTreeMap::new();
        let mut vocab = std::collections::BTreeSet::new();
        for tokens in persona_corpus {
            for (context, next) in Self::windows(&tokens.join(" "), order) {
                *counts.entry(context.clone()).or_default().entry(next).or_insert(0) += 1;
                *totals.entry(context).or_insert(0) += 1;
                vocab.insert(next);
            }
        }
        // One slot reserved for characters never seen in training.
        let vocab_size = vocab.len() + 1;
        CharNgramLm { order, constant, counts, totals, vocab_size }
    }

    fn windows(text: &str, order: usize) -> Vec<(String, char)> {
        let mut chars: Vec<char> = std::iter::repeat(PAD_START).take(order - 1).collect();
        chars.extend(text.chars());
        chars.push(PAD_END);
        (order - 1..chars.len())
            .map(|i| (chars[i - (order - 1)..i].iter().collect(), chars[i]))
            .collect()
    }

    pub fn raw_perplexity(&self, tokens: &[String]) -> Result<f64, BackendError> {
        if tokens.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        let windows = Self::windows(&tokens.join(" "), self.order);
        let mut log_sum = 0.0;
        for (context, next) in &windows {
            let total = self.totals.get(context).copied().unwrap_or(0);
            let count = self.counts.get(context).and_then(|m| m.get(next)).copied().unwrap_or(0);
            let p = (count as f64 + 1.0) / (total as f64 + self.vocab_size as f64);
            log_sum += p.ln();
        }
        Ok((-log_sum / windows.len() as f64).exp())
    }
}

impl FluencyScorer for CharNgramLm {
    fn normalized_ppl(&self, tokens: &[String]) -> Result<f64, BackendError> {
        Ok(normalize_perplexity(self.raw_perplexity(tokens)?, self.constant))
    }
}

/// Token-set Jaccard similarity; two empty sets count as identical.
#[derive(Debug, Clone, Copy, Default)]
pub struct JaccardSimilarity;

impl SimilarityScorer for JaccardSimilarity {
    fn similarity(&self, a: &[String], b: &[String]) -> Result<f64, BackendError> {
        let sa: std::collections::BTreeSet<&String> = a.iter().collect();
        let sb: std::collections::BTreeSet<&String> = b.iter().collect();
        let union = sa.union(&sb).count();
        if union == 0 {
            return Ok(1.0);
        }
        Ok(sa.intersection(&sb).count() as f64 / union as f64)
    }
}

fn rotate(items: &[String], offset: usize) -> impl Iterator<Item = &String> {
    let len = items.len().max(1);
    items.iter().cycle().skip(offset % len).take(items.len())
}

const TABLE_WIDTH: usize = 8;

/// Successor lists and global frequency ranking shared by the table-driven
/// generators. Ordering is (count desc, token asc) throughout.
type FollowCounts = BTreeMap<String, BTreeMap<String, u32>>;

fn cooccurrence_tables(
    corpus: &[Vec<String>],
) -> (FollowCounts, BTreeMap<String, Vec<String>>, Vec<String>) {
    let mut follow_counts: FollowCounts = BTreeMap::new();
    let mut global: BTreeMap<String, u32> = BTreeMap::new();
    for tokens in corpus {
        for token in tokens {
            *global.entry(token.clone()).or_insert(0) += 1;
        }
        for pair in tokens.windows(2) {
            *follow_counts
                .entry(pair[0].clone())
                .or_default()
                .entry(pair[1].clone())
                .or_insert(0) += 1;
        }
    }
    let follow = follow_counts
        .iter()
        .map(|(k, v)| (k.clone(), rank_by_count(v, TABLE_WIDTH)))
        .collect();
    let fallback = rank_by_count(&global, TABLE_WIDTH);
    (follow_counts, follow, fallback)
}

fn rank_by_count(counts: &BTreeMap<String, u32>, cap: usize) -> Vec<String> {
    let mut entries: Vec<(&String, &u32)> = counts.iter().collect();
    entries.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    entries.into_iter().take(cap).map(|(t, _)| t.clone()).collect()
}

/// Masked infilling from lookup tables: a synonym table keyed by the masked
/// token, then a successor table keyed by the previous (already filled)
/// token, then a global-frequency fallback. Tables come from corpus
/// co-occurrence counts or directly from a test-supplied map.
#[derive(Debug, Clone, Default)]
pub struct TableInfiller {
    synonyms: BTreeMap<String, Vec<String>>,
    follow: BTreeMap<String, Vec<String>>,
    fallback: Vec<String>,
}

impl TableInfiller {
    pub fn from_table(synonyms: BTreeMap<String, Vec<String>>) -> Self {
        TableInfiller { synonyms, follow: BTreeMap::new(), fallback: Vec::new() }
    }

    /// Synonyms = tokens sharing an observed predecessor, weighted by how
    /// often they follow it.
    pub fn fit(persona_corpus: &[Vec<String>]) -> Self {
        let (follow_counts, follow, fallback) = cooccurrence_tables(persona_corpus);
        let mut syn_counts: FollowCounts = BTreeMap::new();
        for followers in follow_counts.values() {
            for (x, _) in followers {
                for (y, c) in followers {
                    if x != y {
                        *syn_counts.entry(x.clone()).or_default().entry(y.clone()).or_insert(0) +=
                            c;
                    }
                }
            }
        }
        let synonyms =
            syn_counts.iter().map(|(k, v)| (k.clone(), rank_by_count(v, TABLE_WIDTH))).collect();
        TableInfiller { synonyms, follow, fallback }
    }

    fn candidates(&self, original: &str, previous: Option<&str>) -> Vec<String> {
        if let Some(syn) = self.synonyms.get(original) {
            if !syn.is_empty() {
                return syn.clone();
            }
        }
        if let Some(prev) = previous {
            if let Some(next) = self.follow.get(prev) {
                if !next.is_empty() {
                    return next.clone();
                }
            }
        }
        if !self.fallback.is_empty() {
            return self.fallback.clone();
        }
        vec![original.to_string()]
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        filled: &mut Vec<String>,
        positions: &[usize],
        offsets: &[usize],
        depth: usize,
        n: usize,
        out: &mut Vec<Vec<String>>,
        seen: &mut std::collections::BTreeSet<Vec<String>>,
    ) {
        if out.len() >= n {
            return;
        }
        if depth == positions.len() {
            if seen.insert(filled.clone()) {
                out.push(filled.clone());
            }
            return;
        }
        let pos = positions[depth];
        let previous = if pos > 0 { Some(filled[pos - 1].as_str()) } else { None };
        let original = filled[pos].clone();
        let candidates = self.candidates(&original, previous);
        for candidate in rotate(&candidates, offsets[depth]) {
            filled[pos] = candidate.clone();
            self.search(filled, positions, offsets, depth + 1, n, out, seen);
            if out.len() >= n {
                break;
            }
        }
        filled[pos] = original;
    }
}

impl Infiller for TableInfiller {
    fn infill(
        &self,
        tokens: &[String],
        mask_positions: &[usize],
        n: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        let mut positions: Vec<usize> = mask_positions.to_vec();
        positions.sort_unstable();
        positions.dedup();
        if positions.is_empty() {
            return Ok(vec![tokens.to_vec()]);
        }
        assert!(*positions.last().unwrap() < tokens.len(), "mask position out of range");
        let mut rng = rng_for(seed, &["infill"]);
        let offsets: Vec<usize> = positions.iter().map(|_| rng.gen_range(0..64)).collect();
        let mut filled = tokens.to_vec();
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        self.search(&mut filled, &positions, &offsets, 0, n.max(1), &mut out, &mut seen);
        Ok(out)
    }
}

/// Prefix continuation from the same successor tables.
#[derive(Debug, Clone, Default)]
pub struct TableContinuer {
    follow: BTreeMap<String, Vec<String>>,
    fallback: Vec<String>,
}

impl TableContinuer {
    pub fn from_table(follow: BTreeMap<String, Vec<String>>, fallback: Vec<String>) -> Self {
        TableContinuer { follow, fallback }
    }

    pub fn fit(persona_corpus: &[Vec<String>]) -> Self {
        let (_, follow, fallback) = cooccurrence_tables(persona_corpus);
        TableContinuer { follow, fallback }
    }

    fn next_candidates(&self, last: &str) -> Vec<String> {
        if let Some(next) = self.follow.get(last) {
            if !next.is_empty() {
                return next.clone();
            }
        }
        if !self.fallback.is_empty() {
            return self.fallback.clone();
        }
        vec![last.to_string()]
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        sequence: &mut Vec<String>,
        new_count: usize,
        max_new: usize,
        offsets: &[usize],
        n: usize,
        out: &mut Vec<Vec<String>>,
        seen: &mut std::collections::BTreeSet<Vec<String>>,
    ) {
        if out.len() >= n || new_count == max_new {
            return;
        }
        let candidates = self.next_candidates(sequence.last().expect("prefix non-empty"));
        for candidate in rotate(&candidates, offsets[new_count]) {
            sequence.push(candidate.clone());
            // Preorder emission: every depth from 1..=max_new is a candidate.
            if seen.insert(sequence.clone()) {
                out.push(sequence.clone());
            }
            self.search(sequence, new_count + 1, max_new, offsets, n, out, seen);
            sequence.pop();
            if out.len() >= n {
                break;
            }
        }
    }
}

impl Continuer for TableContinuer {
    fn continue_prefix(
        &self,
        prefix: &[String],
        max_new: usize,
        n: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        if prefix.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        if max_new == 0 {
            return Ok(Vec::new());
        }
        let mut rng = rng_for(seed, &["continue"]);
        let offsets: Vec<usize> = (0..max_new).map(|_| rng.gen_range(0..64)).collect();
        let mut sequence = prefix.to_vec();
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        self.search(&mut sequence, 0, max_new, &offsets, n.max(1), &mut out, &mut seen);
        Ok(out)
    }
}

/// "Translation" by deterministic word dropout. Forward hypotheses each drop
/// one token (position rotated from a seeded start); backward hypotheses are
/// the identity followed by further single drops. Round trips are therefore
/// proper subsequences of the input, never reorderings.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordDropoutTranslator;

fn drop_variants(
    tokens: &[String],
    beam: usize,
    seed: u64,
    include_identity: bool,
) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    if include_identity {
        seen.insert(tokens.to_vec());
        out.push(tokens.to_vec());
    }
    if tokens.len() >= 2 {
        let start = rng_for(seed, &["drop"]).gen_range(0..tokens.len());
        for i in 0..beam {
            if out.len() >= beam {
                break;
            }
            let drop = (start + i) % tokens.len();
            let mut variant = tokens.to_vec();
            variant.remove(drop);
            if seen.insert(variant.clone()) {
                out.push(variant);
            }
        }
    } else if out.is_empty() {
        // Too short to drop anything: the identity is the only hypothesis.
        out.push(tokens.to_vec());
    }
    out.truncate(beam.max(1));
    out
}

impl TranslationModel for WordDropoutTranslator {
    fn translate(
        &self,
        tokens: &[String],
        beam: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        Ok(drop_variants(tokens, beam, seed, false))
    }

    fn translate_back(
        &self,
        tokens: &[String],
        beam: usize,
        seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        Ok(drop_variants(tokens, beam, seed, true))
    }
}

/// Translator whose round trip is always the input itself; useful for
/// exercising the original-excluded rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl TranslationModel for IdentityTranslator {
    fn translate(
        &self,
        tokens: &[String],
        _beam: usize,
        _seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        Ok(vec![tokens.to_vec()])
    }

    fn translate_back(
        &self,
        tokens: &[String],
        _beam: usize,
        _seed: u64,
    ) -> Result<Vec<Vec<String>>, BackendError> {
        Ok(vec![tokens.to_vec()])
    }
}

/// Responder echoing the persona's verb phrase: "i <verb phrase> too".
#[derive(Debug, Clone, Copy, Default)]
pub struct TemplateResponder {
    tagger: RuleListPosTagger,
}

impl TemplateResponder {
    pub fn new() -> Self {
        TemplateResponder { tagger: RuleListPosTagger::new() }
    }
}

impl Responder for TemplateResponder {
    fn respond(
        &self,
        persona: &[String],
        _history: &[String],
        _seed: u64,
    ) -> Result<Vec<String>, BackendError> {
        if persona.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        let tags: Vec<PosTag> = persona.iter().map(|t| self.tagger.tag_token(t)).collect();
        let start = tags
            .iter()
            .position(|t| *t == PosTag::Verb)
            .or_else(|| tags.iter().position(|t| t.is_content()));
        let mut phrase: Vec<String> = match start {
            Some(i) => persona[i..].to_vec(),
            None => Vec::new(),
        };
        while phrase.last().map_or(false, |t| self.tagger.tag_token(t) == PosTag::Punct) {
            phrase.pop();
        }
        if phrase.is_empty() {
            return Err(BackendError::EmptyGeneration);
        }
        let mut out = vec!["i".to_string()];
        out.extend(phrase);
        out.push("too".to_string());
        Ok(out)
    }
}
