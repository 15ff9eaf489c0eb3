//! Rule-list part-of-speech tagging over canonical tokens.
//!
//! Closed-class words come from fixed lists; open-class words fall through
//! suffix heuristics and default to `Noun`. Only the coarse content/function
//! split needs to be reliable: content tags mark tokens that editing and
//! overlap scoring may touch.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl PosTag {
    /// Tags whose tokens carry propositional content and are eligible
    /// for editing and overlap matching.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            PosTag::Verb
                | PosTag::Noun
                | PosTag::Propn
                | PosTag::Num
                | PosTag::Adv
                | PosTag::Adp
                | PosTag::Adj
        )
    }
}

const NUM_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty",
    "ninety", "hundred", "thousand", "million",
];

const PRON_WORDS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
    "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours",
    "ourselves", "they", "them", "their", "theirs", "themselves", "this", "that", "these",
    "those", "who", "whom", "whose", "which", "what", "someone", "somebody", "something",
    "anyone", "anybody", "anything", "everyone", "everybody", "everything", "nobody", "nothing",
    "i'm", "i've", "i'll", "i'd", "you're", "you've", "you'll", "it's", "he's", "she's", "we're",
    "they're", "that's", "there's", "what's", "let's",
];

const DET_WORDS: &[&str] = &[
    "a", "an", "the", "some", "any", "no", "every", "each", "either", "neither", "both", "all",
    "most", "many", "much", "few", "several", "own", "other", "another", "such",
];

const AUX_WORDS: &[&str] = &[
    "am", "is", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have", "has",
    "had", "having", "will", "would", "shall", "should", "can", "could", "may", "might", "must",
    "don't", "doesn't", "didn't", "can't", "won't", "isn't", "aren't", "wasn't", "weren't",
    "haven't", "hasn't", "hadn't", "wouldn't", "shouldn't", "couldn't",
];

const PART_WORDS: &[&str] = &["to", "not"];

const CCONJ_WORDS: &[&str] = &["and", "or", "but", "nor", "so", "yet", "plus"];

const SCONJ_WORDS: &[&str] = &[
    "if", "because", "although", "though", "while", "whereas", "unless", "since", "when",
    "whenever", "where", "wherever", "whether", "than", "as",
];

const INTJ_WORDS: &[&str] = &[
    "yes", "yeah", "yep", "nope", "hey", "hi", "hello", "oh", "ah", "wow", "ok", "okay",
    "please", "thanks", "bye", "goodbye", "hmm", "huh",
];

const ADP_WORDS: &[&str] = &[
    "in", "on", "at", "by", "with", "without", "from", "of", "for", "about", "into", "onto",
    "over", "under", "between", "among", "through", "during", "against", "around", "near",
    "off", "out", "up", "down", "across", "along", "behind", "beyond", "inside", "outside",
    "toward", "towards", "upon", "within", "after", "before", "until", "per", "via",
];

const VERB_WORDS: &[&str] = &[
    "like", "love", "hate", "enjoy", "prefer", "want", "need", "know", "think", "work", "play",
    "go", "get", "make", "take", "see", "say", "tell", "eat", "drink", "live", "run", "swim",
    "read", "write", "cook", "bake", "teach", "learn", "study", "drive", "ride", "watch",
    "listen", "sing", "dance", "travel", "hike", "camp", "paint", "draw", "collect", "build",
    "fix", "grow", "ski", "skate", "surf", "climb", "shop", "sell", "buy", "win", "lose",
    "help", "volunteer", "speak", "walk", "own",
];

const ADJ_WORDS: &[&str] = &[
    "good", "bad", "big", "small", "happy", "sad", "old", "young", "new", "nice", "great",
    "cool", "fun", "funny", "cute", "pretty", "beautiful", "smart", "tall", "short", "red",
    "blue", "green", "black", "white", "favorite", "free", "busy", "married", "single",
];

const ADV_WORDS: &[&str] = &[
    "very", "really", "quite", "too", "also", "just", "always", "never", "sometimes", "often",
    "usually", "rarely", "again", "soon", "already", "still", "almost", "maybe", "perhaps",
    "here", "there", "now", "then", "today", "tomorrow", "yesterday", "away", "back",
    "together", "alone", "early", "late",
];

const ADJ_SUFFIXES: &[&str] = &["ful", "ous", "ive", "less", "ish", "able", "ible"];

fn lexical_tag(token: &str) -> PosTag {
    if token.starts_with('<') && token.ends_with('>') {
        return PosTag::X;
    }
    if !token.chars().any(|c| c.is_alphanumeric()) {
        return PosTag::Punct;
    }
    if token.chars().any(|c| c.is_ascii_digit()) || NUM_WORDS.contains(&token) {
        return PosTag::Num;
    }
    if PRON_WORDS.contains(&token) {
        return PosTag::Pron;
    }
    if DET_WORDS.contains(&token) {
        return PosTag::Det;
    }
    if AUX_WORDS.contains(&token) {
        return PosTag::Aux;
    }
    if PART_WORDS.contains(&token) {
        return PosTag::Part;
    }
    if CCONJ_WORDS.contains(&token) {
        return PosTag::Cconj;
    }
    if SCONJ_WORDS.contains(&token) {
        return PosTag::Sconj;
    }
    if INTJ_WORDS.contains(&token) {
        return PosTag::Intj;
    }
    if ADP_WORDS.contains(&token) {
        return PosTag::Adp;
    }
    if VERB_WORDS.contains(&token) {
        return PosTag::Verb;
    }
    if ADJ_WORDS.contains(&token) {
        return PosTag::Adj;
    }
    if ADV_WORDS.contains(&token) {
        return PosTag::Adv;
    }
    if token.len() >= 4 && token.ends_with("ly") {
        return PosTag::Adv;
    }
    if token.len() >= 5 && (token.ends_with("ing") || token.ends_with("ed")) {
        return PosTag::Verb;
    }
    if token.len() >= 5 && ADJ_SUFFIXES.iter().any(|s| token.ends_with(s)) {
        return PosTag::Adj;
    }
    PosTag::Noun
}

/// Stateless tagger applying the closed-class lists and suffix rules.
#[derive(Debug, Default, Clone, Copy)]
pub struct RuleListPosTagger;

impl RuleListPosTagger {
    pub fn new() -> Self {
        RuleListPosTagger
    }

    pub fn tag_token(&self, token: &str) -> PosTag {
        lexical_tag(token)
    }
}
