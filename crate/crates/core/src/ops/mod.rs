//! Mutation operators acting on a single leitmotif measure.
//!
//! Each operator implements [`MutationOperator`] and is looked up by name in
//! an [`OperatorRegistry`]. An application is split in two: the operator
//! draws its random choices and records them in a [`MutationDetail`], then
//! [`apply_detail`] performs the edit. Replaying a recorded event therefore
//! goes through the same edit path with no randomness involved.
//!
//! Skipped applications (nothing to mutate) consume exactly the draws a
//! successful one would.

mod deletion;
mod insertion;
mod inversion;
mod translocation;
mod transposition;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::DrawStream;
use crate::score::{Measure, Score, TimeSignature};

pub use deletion::{delete_span, Deletion};
pub use insertion::{insert_span, Insertion};
pub use inversion::{invert_span, Inversion};
pub use translocation::{DonorPool, Translocation};
pub use transposition::{semitones_from_draw, transpose_event, Transposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationKind {
    Insertion,
    Deletion,
    Inversion,
    Translocation,
    Transposition,
}

impl MutationKind {
    /// Order in which the engine runs the per-cycle trials.
    pub const TRIAL_ORDER: [MutationKind; 5] = [
        MutationKind::Insertion,
        MutationKind::Deletion,
        MutationKind::Inversion,
        MutationKind::Translocation,
        MutationKind::Transposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationKind::Insertion => "insertion",
            MutationKind::Deletion => "deletion",
            MutationKind::Inversion => "inversion",
            MutationKind::Translocation => "translocation",
            MutationKind::Transposition => "transposition",
        }
    }
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Operator-specific record of what was done; enough to redo it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MutationDetail {
    Insertion {
        start: usize,
        len: usize,
    },
    Deletion {
        start: usize,
        len: usize,
    },
    Inversion {
        start: usize,
        len: usize,
    },
    Translocation {
        donor_part: String,
        donor_measure: usize,
    },
    Transposition {
        event: usize,
        semitones: i32,
    },
    Skipped {
        reason: String,
    },
}

impl MutationDetail {
    pub fn is_skipped(&self) -> bool {
        matches!(self, MutationDetail::Skipped { .. })
    }

    fn skipped(reason: &str) -> Self {
        MutationDetail::Skipped {
            reason: reason.to_string(),
        }
    }
}

/// The repeating theme a cancer part plays: `measures.len()` bars lifted
/// from `source_part` starting at `source_start`, mutated in place over time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leitmotif {
    pub measures: Vec<Measure>,
    pub source_part: String,
    pub source_start: usize,
}

impl Leitmotif {
    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }
}

/// One operator application in a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationEvent {
    pub cycle: u32,
    pub part: String,
    pub kind: MutationKind,
    /// Position of the mutated measure within the leitmotif.
    pub measure_index: usize,
    pub detail: MutationDetail,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub measure: Measure,
    pub detail: MutationDetail,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("span {start}+{len} is outside a measure of {events} events")]
    SpanOutOfRange {
        start: usize,
        len: usize,
        events: usize,
    },
    #[error("event {0} is not a note or chord")]
    NotPitched(usize),
    #[error("donor measure {part}:{measure} not found")]
    MissingDonor { part: String, measure: usize },
    #[error("donor measure is in {donor}, target is in {target}")]
    MeterMismatch {
        donor: TimeSignature,
        target: TimeSignature,
    },
    #[error("a duration in the span cannot be halved further")]
    TooFine,
}

/// What an operator may look at besides the measure it mutates.
#[derive(Clone, Copy, Default)]
pub struct OperatorContext<'a> {
    pub donors: Option<&'a DonorPool>,
}

pub trait MutationOperator: Send + Sync {
    fn kind(&self) -> MutationKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Draws this operator's random choices and applies them.
    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome;
}

/// Performs the edit a detail describes. `Skipped` returns the input.
pub fn apply_detail(
    measure: &Measure,
    detail: &MutationDetail,
    ctx: &OperatorContext,
) -> Result<Measure, ReplayError> {
    match detail {
        MutationDetail::Insertion { start, len } => insert_span(measure, *start, *len),
        MutationDetail::Deletion { start, len } => delete_span(measure, *start, *len),
        MutationDetail::Inversion { start, len } => invert_span(measure, *start, *len),
        MutationDetail::Translocation {
            donor_part,
            donor_measure,
        } => {
            let pool = ctx.donors.ok_or_else(|| ReplayError::MissingDonor {
                part: donor_part.clone(),
                measure: *donor_measure,
            })?;
            pool.transplant(measure, donor_part, *donor_measure)
        }
        MutationDetail::Transposition { event, semitones } => {
            transpose_event(measure, *event, *semitones)
        }
        MutationDetail::Skipped { .. } => Ok(measure.clone()),
    }
}

/// Draws a contiguous span of a sequence of `len` items: the start uniformly,
/// then the length uniformly over what remains. Always two draws.
pub(crate) fn draw_span(len: usize, rng: &mut DrawStream) -> (usize, usize) {
    let start = rng.below(len);
    let span = rng.inclusive(1, len.saturating_sub(start).max(1));
    (start, span)
}

pub(crate) fn check_span(m: &Measure, start: usize, len: usize) -> Result<(), ReplayError> {
    if len == 0 || start + len > m.events.len() {
        return Err(ReplayError::SpanOutOfRange {
            start,
            len,
            events: m.events.len(),
        });
    }
    Ok(())
}

/// Operators keyed by name, iterated in registration order.
pub struct OperatorRegistry {
    operators: Vec<Box<dyn MutationOperator>>,
    by_name: HashMap<&'static str, usize>,
}

impl OperatorRegistry {
    pub fn empty() -> Self {
        Self {
            operators: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    /// The five built-in operators in trial order.
    pub fn standard() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(Insertion));
        reg.register(Box::new(Deletion));
        reg.register(Box::new(Inversion));
        reg.register(Box::new(Translocation));
        reg.register(Box::new(Transposition));
        reg
    }

    /// Adds an operator, replacing any previous one with the same name.
    pub fn register(&mut self, op: Box<dyn MutationOperator>) {
        let name = op.name();
        match self.by_name.get(name) {
            Some(&i) => self.operators[i] = op,
            None => {
                self.by_name.insert(name, self.operators.len());
                self.operators.push(op);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn MutationOperator> {
        self.by_name.get(name).map(|&i| self.operators[i].as_ref())
    }

    pub fn for_kind(&self, kind: MutationKind) -> Option<&dyn MutationOperator> {
        self.get(kind.name())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.operators.iter().map(|op| op.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn MutationOperator> {
        self.operators.iter().map(|op| op.as_ref())
    }
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

/// Applies the named operator to a measure.
pub fn apply_named(
    registry: &OperatorRegistry,
    name: &str,
    measure: &Measure,
    ctx: &OperatorContext,
    rng: &mut DrawStream,
) -> Option<Outcome> {
    registry.get(name).map(|op| op.apply(measure, ctx, rng))
}

/// Convenience wrappers with the free-function shape used in tests and docs.
pub fn op_insertion(m: &Measure, rng: &mut DrawStream) -> Outcome {
    Insertion.apply(m, &OperatorContext::default(), rng)
}

pub fn op_deletion(m: &Measure, rng: &mut DrawStream) -> Outcome {
    Deletion.apply(m, &OperatorContext::default(), rng)
}

pub fn op_inversion(m: &Measure, rng: &mut DrawStream) -> Outcome {
    Inversion.apply(m, &OperatorContext::default(), rng)
}

pub fn op_transposition(m: &Measure, rng: &mut DrawStream) -> Outcome {
    Transposition.apply(m, &OperatorContext::default(), rng)
}

pub fn op_translocation(m: &Measure, donors: &DonorPool, rng: &mut DrawStream) -> Outcome {
    Translocation.apply(
        m,
        &OperatorContext {
            donors: Some(donors),
        },
        rng,
    )
}

/// Donor pool over a whole score with nothing excluded.
pub fn donors_from(score: &Score) -> DonorPool {
    DonorPool::new(score, None)
}
