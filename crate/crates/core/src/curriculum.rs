//! Curriculum assembly and the phase-wise training loop.
//!
//! A plan is an ordered list of phases, each with its own train set, dev
//! set, and early-stopping patience. The canonical two-phase curriculum
//! trains on the easy (distilled + diversified) data first and the
//! original data second; ablation variants reorder, restrict, or mix the
//! same material. The loop itself is generic over a [`Trainer`], tracks
//! the best dev loss per phase, and restores the best checkpoint before
//! moving on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SampleFields;
use crate::seeding::rng_for;
use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Easy phase (augmented data) then hard phase (original data).
    D3,
    /// Original data only, one phase.
    Original,
    /// Augmented data only, one phase.
    OnlyAugment,
    /// Original and augmented data mixed and shuffled, one phase.
    Shuffle,
    /// Hard phase first, then easy: the curriculum inverted.
    Reverse,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::D3,
        Variant::Original,
        Variant::OnlyAugment,
        Variant::Shuffle,
        Variant::Reverse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::D3 => "d3",
            Variant::Original => "original",
            Variant::OnlyAugment => "only_augment",
            Variant::Shuffle => "shuffle",
            Variant::Reverse => "reverse",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = CurriculumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| CurriculumError::UnknownVariant(s.to_owned()))
    }
}

#[derive(Debug, Error)]
pub enum CurriculumError {
    #[error("unknown curriculum variant {0:?}")]
    UnknownVariant(String),
    #[error("phase {phase:?} has an empty {role} set")]
    EmptyDataset { phase: &'static str, role: &'static str },
    #[error("trainer failed in phase {phase:?}, epoch {epoch}: {source}")]
    Trainer {
        phase: String,
        epoch: usize,
        source: TrainerError,
        /// Epochs completed before the failure.
        log: Vec<EpochRecord>,
    },
}

/// One stretch of training on a fixed dataset.
#[derive(Debug, Clone)]
pub struct Phase<D> {
    pub name: String,
    pub train: Vec<D>,
    pub dev: Vec<D>,
    pub patience: usize,
}

#[derive(Debug, Clone)]
pub struct CurriculumPlan<D> {
    pub variant: Variant,
    pub phases: Vec<Phase<D>>,
}

/// The datasets a plan can draw on.
#[derive(Debug, Clone, Copy)]
pub struct PlanDatasets<'a, D> {
    pub original: &'a [D],
    pub augmented: &'a [D],
    pub dev: &'a [D],
    /// Dev set matched to the augmented distribution, used by easy phases.
    pub dev_easy: &'a [D],
}

fn phase<D: Clone>(
    name: &'static str,
    train: &[D],
    dev: &[D],
    patience: usize,
) -> Result<Phase<D>, CurriculumError> {
    if train.is_empty() {
        return Err(CurriculumError::EmptyDataset { phase: name, role: "train" });
    }
    if dev.is_empty() {
        return Err(CurriculumError::EmptyDataset { phase: name, role: "dev" });
    }
    Ok(Phase { name: name.to_owned(), train: train.to_vec(), dev: dev.to_vec(), patience })
}

/// Assemble the phase list for a variant.
///
/// Every referenced dataset must be non-empty. The shuffle variant mixes
/// original and augmented data under a permutation derived from
/// `master_seed` alone, so the plan is reproducible.
pub fn build_plan<D: Clone>(
    variant: Variant,
    data: &PlanDatasets<'_, D>,
    patience_easy: usize,
    patience_hard: usize,
    master_seed: u64,
) -> Result<CurriculumPlan<D>, CurriculumError> {
    let easy = || phase("easy", data.augmented, data.dev_easy, patience_easy);
    let hard = || phase("hard", data.original, data.dev, patience_hard);
    let phases = match variant {
        Variant::D3 => vec![easy()?, hard()?],
        Variant::Reverse => vec![hard()?, easy()?],
        Variant::Original => vec![phase("all", data.original, data.dev, patience_hard)?],
        Variant::OnlyAugment => {
            vec![phase("augment", data.augmented, data.dev_easy, patience_easy)?]
        }
        Variant::Shuffle => {
            let mut mixed: Vec<D> =
                data.original.iter().chain(data.augmented).cloned().collect();
            let mut rng = rng_for(master_seed, &["curriculum", "shuffle"]);
            mixed.shuffle(&mut rng);
            vec![phase("mixed", &mixed, data.dev, patience_hard)?]
        }
    };
    Ok(CurriculumPlan { variant, phases })
}

#[derive(Debug, Error)]
#[error("{0}")]
pub struct TrainerError(pub String);

/// Anything the loop can train: one epoch of updates, a dev loss, and
/// restorable snapshots.
pub trait Trainer<D> {
    type Checkpoint: Clone;

    fn train_epoch(&mut self, data: &[D]) -> Result<(), TrainerError>;
    fn eval_loss(&self, data: &[D]) -> Result<f64, TrainerError>;
    fn snapshot(&self) -> Self::Checkpoint;
    fn restore(&mut self, checkpoint: &Self::Checkpoint);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub phase: String,
    /// 1-based within the phase.
    pub epoch: usize,
    pub dev_loss: f64,
    /// Strict improvement over the phase's best loss so far.
    pub is_best: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome<C> {
    /// The best checkpoint of the final phase.
    pub checkpoint: C,
    pub log: Vec<EpochRecord>,
}

/// Run every phase of a plan.
///
/// Within a phase, epochs run until `patience` epochs pass without a
/// strict dev-loss improvement, or `max_epochs` is reached. The phase's
/// best checkpoint is restored before the next phase starts. A trainer
/// failure aborts the run and carries the partial epoch log in the error.
pub fn run_plan<D, T: Trainer<D>>(
    trainer: &mut T,
    plan: &CurriculumPlan<D>,
    max_epochs: usize,
) -> Result<RunOutcome<T::Checkpoint>, CurriculumError> {
    assert!(max_epochs >= 1);
    let mut log: Vec<EpochRecord> = Vec::new();
    let mut last_best: Option<T::Checkpoint> = None;
    for phase in &plan.phases {
        let mut best_loss = f64::INFINITY;
        // Until an epoch improves, the pre-phase state is the best known.
        let mut best = trainer.snapshot();
        let mut since_best = 0usize;
        for epoch in 1..=max_epochs {
            if let Err(source) = trainer.train_epoch(&phase.train) {
                return Err(CurriculumError::Trainer {
                    phase: phase.name.clone(),
                    epoch,
                    source,
                    log,
                });
            }
            let dev_loss = match trainer.eval_loss(&phase.dev) {
                Ok(loss) => loss,
                Err(source) => {
                    return Err(CurriculumError::Trainer {
                        phase: phase.name.clone(),
                        epoch,
                        source,
                        log,
                    });
                }
            };
            let is_best = dev_loss < best_loss;
            if is_best {
                best_loss = dev_loss;
                best = trainer.snapshot();
                since_best = 0;
            } else {
                since_best += 1;
            }
            log.push(EpochRecord { phase: phase.name.clone(), epoch, dev_loss, is_best });
            if since_best >= phase.patience {
                break;
            }
        }
        trainer.restore(&best);
        last_best = Some(best);
    }
    let checkpoint = match last_best {
        Some(c) => c,
        None => trainer.snapshot(),
    };
    Ok(RunOutcome { checkpoint, log })
}

/// Scripted trainer for exercising the loop: dev losses come from a fixed
/// script indexed by how many epochs have been trained, and checkpoints
/// are the epoch counter itself. Every call is recorded.
#[derive(Debug, Default)]
pub struct ScriptedTrainer {
    pub losses: Vec<f64>,
    pub steps: usize,
    pub calls: std::cell::RefCell<Vec<String>>,
}

impl ScriptedTrainer {
    /// Losses beyond the script's end repeat its last value (a plateau).
    pub fn new(losses: &[f64]) -> Self {
        assert!(!losses.is_empty());
        ScriptedTrainer {
            losses: losses.to_vec(),
            steps: 0,
            calls: std::cell::RefCell::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> Vec<String> {
        self.calls.borrow().clone()
    }
}

impl<D> Trainer<D> for ScriptedTrainer {
    type Checkpoint = usize;

    fn train_epoch(&mut self, data: &[D]) -> Result<(), TrainerError> {
        self.steps += 1;
        self.calls.borrow_mut().push(format!("train:{}", data.len()));
        Ok(())
    }

    fn eval_loss(&self, _data: &[D]) -> Result<f64, TrainerError> {
        let index = (self.steps - 1).min(self.losses.len() - 1);
        self.calls.borrow_mut().push("eval".to_owned());
        Ok(self.losses[index])
    }

    fn snapshot(&self) -> usize {
        self.steps
    }

    fn restore(&mut self, checkpoint: &usize) {
        self.calls.borrow_mut().push(format!("restore:{checkpoint}"));
        self.steps = *checkpoint;
    }
}

/// A real, tiny learner: a unigram model over response tokens, trained by
/// count accumulation (each epoch adds the train counts again, shrinking
/// the smoothing share) and evaluated by per-token cross-entropy on the
/// dev responses, quantized to 1e-6 for stable logs.
#[derive(Debug, Clone, Default)]
pub struct UnigramTrainer {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl UnigramTrainer {
    pub fn new() -> Self {
        Self::default()
    }

    fn vocab_size(&self) -> u64 {
        self.counts.len() as u64 + 1
    }
}

impl<D: SampleFields> Trainer<D> for UnigramTrainer {
    type Checkpoint = UnigramTrainer;

    fn train_epoch(&mut self, data: &[D]) -> Result<(), TrainerError> {
        for sample in data {
            for token in tokenize(sample.response_text()) {
                *self.counts.entry(token).or_insert(0) += 1;
                self.total += 1;
            }
        }
        Ok(())
    }

    fn eval_loss(&self, data: &[D]) -> Result<f64, TrainerError> {
        let mut log_sum = 0.0;
        let mut n = 0u64;
        for sample in data {
            for token in tokenize(sample.response_text()) {
                let count = self.counts.get(&token).copied().unwrap_or(0);
                let p = (count as f64 + 1.0) / (self.total as f64 + self.vocab_size() as f64);
                log_sum -= p.ln();
                n += 1;
            }
        }
        if n == 0 {
            return Err(TrainerError("dev set has no response tokens".to_owned()));
        }
        let loss = log_sum / n as f64;
        Ok((loss * 1e6).round() / 1e6)
    }

    fn snapshot(&self) -> UnigramTrainer {
        self.clone()
    }

    fn restore(&mut self, checkpoint: &UnigramTrainer) {
        *self = checkpoint.clone();
    }
}
