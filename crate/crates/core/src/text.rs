//! Canonical tokenization and the special-symbol table.
//!
//! Every stage of the pipeline (entailment overlap, persona editing, n-gram
//! metrics, dataset statistics) counts tokens produced by [`tokenize`].
//! Backends may re-tokenize internally, but the canonical tokens are these,
//! and the golden tests in this module pin the behavior.

use serde::{Deserialize, Serialize};

/// Lowercase, split on whitespace, then peel leading/trailing punctuation
/// off each chunk into separate tokens. Internal punctuation (apostrophes,
/// hyphens) is kept, so "i'm" and "well-known" stay single tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    tokens
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

fn split_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    let mut end = chars.len();
    while start < end && is_punct(chars[start]) {
        start += 1;
    }
    while end > start && is_punct(chars[end - 1]) {
        end -= 1;
    }
    for &c in &chars[..start] {
        out.push(c.to_string());
    }
    if start < end {
        out.push(chars[start..end].iter().collect());
    }
    for &c in &chars[end..] {
        out.push(c.to_string());
    }
}

/// Canonical text form of a token sequence: tokens joined by single spaces.
/// Used for exact-match deduplication and persona uniqueness counting.
pub fn detokenize(tokens: &[String]) -> String {
    tokens.join(" ")
}

/// Markers inserted into serialized model inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialSymbols {
    pub begin: String,
    pub end: String,
    pub talker1: String,
    pub talker2: String,
    pub mask: String,
}

impl Default for SpecialSymbols {
    fn default() -> Self {
        Self {
            begin: "<bos>".to_string(),
            end: "<eos>".to_string(),
            talker1: "<talker1>".to_string(),
            talker2: "<talker2>".to_string(),
            mask: "<mask>".to_string(),
        }
    }
}

impl SpecialSymbols {
    /// True if `token` is one of the markers. Generation backends must never
    /// emit these.
    pub fn contains(&self, token: &str) -> bool {
        token == self.begin
            || token == self.end
            || token == self.talker1
            || token == self.talker2
            || token == self.mask
    }
}

/// Which part of the serialized input a token belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLabel {
    Persona,
    Talker1,
    Talker2,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text)
    }

    // Golden cases: downstream counts depend on exactly this behavior.
    #[test]
    fn golden_tokenization() {
        assert_eq!(toks("Hello, World!"), ["hello", ",", "world", "!"]);
        assert_eq!(toks("i'm fine."), ["i'm", "fine", "."]);
        assert_eq!(toks("(really?)"), ["(", "really", "?", ")"]);
        assert_eq!(toks("well-known fact"), ["well-known", "fact"]);
        assert_eq!(toks("i have 2 cats..."), ["i", "have", "2", "cats", ".", ".", "."]);
        assert_eq!(toks("  spaced   out  "), ["spaced", "out"]);
        assert_eq!(toks("!!!"), ["!", "!", "!"]);
        assert_eq!(toks(""), Vec::<String>::new());
    }

    #[test]
    fn lowercases() {
        assert_eq!(toks("I Like CATS"), ["i", "like", "cats"]);
    }

    #[test]
    fn detokenize_joins() {
        assert_eq!(detokenize(&toks("hello , world")), "hello , world");
    }

    #[test]
    fn special_symbols_membership() {
        let sym = SpecialSymbols::default();
        assert!(sym.contains("<bos>"));
        assert!(sym.contains("<mask>"));
        assert!(!sym.contains("cats"));
    }
}
