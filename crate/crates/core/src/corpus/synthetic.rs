//! Deterministic synthetic dialogue corpora.
//!
//! Small template-built dialogues for tests, examples, and benchmark runs:
//! no file download needed, fully reproducible from a seed, and shaped so
//! the reference backends get meaningful work (responses that fully entail
//! a persona, partially overlap one, entail two at once, or none at all).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{unroll_dialogues, DialogueRecord, DialogueSample, TurnPair};
use crate::seeding::rng_for;

const VERBS: &[&str] =
    &["like", "love", "enjoy", "play", "watch", "cook", "read", "collect", "paint", "drive"];
const NOUNS: &[&str] = &[
    "cats", "dogs", "soccer", "pizza", "books", "movies", "music", "horses", "chess", "gardens",
    "trains", "photos",
];
const PLACES: &[&str] = &["farm", "school", "hospital", "bakery", "library", "garage"];

#[derive(Clone)]
struct Persona {
    text: String,
    // Content words a response can echo to entail this persona fully.
    echo: String,
}

fn sample_persona(rng: &mut ChaCha8Rng) -> Persona {
    match rng.gen_range(0..3) {
        0 => {
            let verb = *VERBS.choose(rng).unwrap();
            let noun = *NOUNS.choose(rng).unwrap();
            Persona { text: format!("i {verb} {noun}"), echo: format!("yes i {verb} {noun}") }
        }
        1 => {
            let place = *PLACES.choose(rng).unwrap();
            Persona {
                text: format!("i work at a {place}"),
                echo: format!("yes i work at a {place}"),
            }
        }
        _ => {
            let a = *NOUNS.choose(rng).unwrap();
            let b = *NOUNS.choose(rng).unwrap();
            Persona {
                text: format!("my favorite {a} is {b}"),
                echo: format!("well my favorite {a} is {b}"),
            }
        }
    }
}

fn partner_line(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => {
            let verb = *VERBS.choose(rng).unwrap();
            let noun = *NOUNS.choose(rng).unwrap();
            format!("do you {verb} {noun} ?")
        }
        1 => "hello how are you today ?".to_string(),
        2 => "what do you do for work ?".to_string(),
        _ => "tell me about yourself .".to_string(),
    }
}

fn partial_line(persona: &Persona, rng: &mut ChaCha8Rng) -> String {
    // Echo the final content word only, roughly half the hypothesis content.
    let last = persona.text.split_whitespace().last().unwrap();
    match rng.gen_range(0..2) {
        0 => format!("i have a {last}"),
        _ => format!("the {last} is great"),
    }
}

fn neutral_line(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..3) {
        0 => "not really sorry about that .".to_string(),
        1 => "the weather is nice today".to_string(),
        _ => "ha that is a good question".to_string(),
    }
}

fn synthetic_dialogue(rng: &mut ChaCha8Rng) -> DialogueRecord {
    let n_personas = rng.gen_range(4..=5);
    let mut personas: Vec<Persona> = Vec::new();
    while personas.len() < n_personas {
        let candidate = sample_persona(rng);
        if personas.iter().all(|p| p.text != candidate.text) {
            personas.push(candidate);
        }
    }

    let n_turns = rng.gen_range(3..=5);
    let turns = (0..n_turns)
        .map(|_| {
            let partner = partner_line(rng);
            let roll: f64 = rng.gen();
            let reply = if roll < 0.45 {
                personas.choose(rng).unwrap().echo.clone()
            } else if roll < 0.55 {
                let mut picks = personas.choose_multiple(rng, 2);
                let first = picks.next().unwrap();
                let second = picks.next().unwrap();
                format!("{} and {}", first.echo, second.echo)
            } else if roll < 0.75 {
                partial_line(personas.choose(rng).unwrap(), rng)
            } else {
                neutral_line(rng)
            };
            TurnPair { partner, self_utterance: reply, extras: Vec::new() }
        })
        .collect();

    DialogueRecord { persona: personas.into_iter().map(|p| p.text).collect(), turns }
}

/// `n` dialogues, reproducible from `seed` alone.
pub fn synthetic_dialogues(seed: u64, n: usize) -> Vec<DialogueRecord> {
    (0..n)
        .map(|i| synthetic_dialogue(&mut rng_for(seed, &["synthetic", &i.to_string()])))
        .collect()
}

/// Exactly `n` unrolled turn-pair samples, reproducible from `seed` alone.
pub fn synthetic_samples(seed: u64, n: usize) -> Vec<DialogueSample> {
    let mut dialogues = Vec::new();
    let mut total_turns = 0;
    let mut i = 0;
    while total_turns < n {
        let d = synthetic_dialogue(&mut rng_for(seed, &["synthetic", &i.to_string()]));
        total_turns += d.turns.len();
        dialogues.push(d);
        i += 1;
    }
    let mut samples = unroll_dialogues(&dialogues).expect("synthetic dialogues are well-formed");
    samples.truncate(n);
    samples
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let a = synthetic_dialogues(9, 5);
        let b = synthetic_dialogues(9, 5);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.persona, y.persona);
            assert_eq!(
                x.turns.iter().map(|t| &t.self_utterance).collect::<Vec<_>>(),
                y.turns.iter().map(|t| &t.self_utterance).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn seeds_change_the_corpus() {
        let a = synthetic_dialogues(1, 3);
        let b = synthetic_dialogues(2, 3);
        let texts = |ds: &[DialogueRecord]| {
            ds.iter().flat_map(|d| d.persona.clone()).collect::<Vec<_>>()
        };
        assert_ne!(texts(&a), texts(&b));
    }

    #[test]
    fn sample_count_is_exact() {
        for n in [1, 7, 50] {
            assert_eq!(synthetic_samples(3, n).len(), n);
        }
    }

    #[test]
    fn samples_are_well_formed() {
        for s in synthetic_samples(5, 25) {
            assert!(!s.persona.is_empty());
            assert!(!s.history.is_empty());
            assert!(!s.response.text().is_empty());
        }
    }
}
