use super::{
    check_span, draw_span, MutationDetail, MutationKind, MutationOperator, OperatorContext,
    Outcome, ReplayError,
};
use crate::rng::DrawStream;
use crate::score::Measure;

/// Halves a run of events and plays it twice in its own place.
#[derive(Clone, Copy, Debug, Default)]
pub struct Insertion;

impl MutationOperator for Insertion {
    fn kind(&self) -> MutationKind {
        MutationKind::Insertion
    }

    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome {
        let (start, len) = draw_span(measure.events.len(), rng);
        let detail = if measure.is_all_rests() {
            MutationDetail::skipped("measure holds only rests")
        } else {
            MutationDetail::Insertion { start, len }
        };
        match super::apply_detail(measure, &detail, ctx) {
            Ok(measure) => Outcome { measure, detail },
            Err(_) => Outcome {
                measure: measure.clone(),
                detail: MutationDetail::skipped("span too fine to subdivide"),
            },
        }
    }
}

/// `[.. A B C ..]` becomes `[.. a b c a b c ..]` where each lower-case event
/// lasts half as long. Tie markers are removed from the rewritten events.
pub fn insert_span(m: &Measure, start: usize, len: usize) -> Result<Measure, ReplayError> {
    check_span(m, start, len)?;
    let halves = m.events[start..start + len]
        .iter()
        .map(|ev| ev.duration.half().map(|d| ev.with_duration(d).untied()))
        .collect::<Option<Vec<_>>>()
        .ok_or(ReplayError::TooFine)?;
    let mut events = Vec::with_capacity(m.events.len() + len);
    events.extend_from_slice(&m.events[..start]);
    events.extend(halves.iter().cloned());
    events.extend(halves);
    events.extend_from_slice(&m.events[start + len..]);
    Ok(Measure {
        events,
        ..m.clone()
    })
}
