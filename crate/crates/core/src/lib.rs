//! Data manipulation toolkit for persona-grounded dialogue corpora.
//!
//! The pipeline turns an original corpus `D` of (persona, history, response)
//! samples into an augmented training set through three stages:
//!
//! 1. **Distillation** ([`distill`]): keep, per sample, each persona sentence
//!    the response entails and only the last history utterance, yielding
//!    one-persona/one-utterance samples `D_dis`.
//! 2. **Diversification** ([`diversify`]): edit distilled personas at the
//!    token and phrase level, align new responses, back-translate histories,
//!    and quality-filter the cross product into `D_div`.
//! 3. **Curriculum** ([`curriculum`]): assemble `D_a = D_dis ∪ D_div` and `D`
//!    into ordered training phases with early stopping, driven against an
//!    abstract [`curriculum::Trainer`].
//!
//! Every learned model the pipeline consults lives behind the [`backend`]
//! contracts; deterministic corpus-free reference backends ship with the
//! crate so the whole pipeline is testable hermetically. [`metrics`] holds
//! the corpus-level evaluation suite (Distinct-n, Entropy-n, Novelty-n,
//! C-score, BLEU, NIST-4, consistent-attention analysis).
//!
//! All randomness flows from one master seed through [`seeding`], so outputs
//! are byte-identical across runs, machines, and worker counts.

pub mod backend;
pub mod config;
pub mod corpus;
pub mod curriculum;
pub mod distill;
pub mod diversify;
pub mod metrics;
pub mod num;
pub mod pipeline;
pub mod scoring;
pub mod seeding;
pub mod text;

/// Concrete scalar used by the pipeline for scores, probabilities, and
/// metric values. The numeric core ([`metrics`], [`scoring`]) is generic
/// over [`num::Scalar`]; everything else instantiates it at this alias.
pub type Score = f64;
