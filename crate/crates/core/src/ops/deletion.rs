use super::{
    check_span, draw_span, MutationDetail, MutationKind, MutationOperator, OperatorContext,
    Outcome, ReplayError,
};
use crate::rng::DrawStream;
use crate::score::{Measure, NoteEvent};

/// Silences a run of events, keeping their durations.
#[derive(Clone, Copy, Debug, Default)]
pub struct Deletion;

impl MutationOperator for Deletion {
    fn kind(&self) -> MutationKind {
        MutationKind::Deletion
    }

    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome {
        let (start, len) = draw_span(measure.events.len(), rng);
        let detail = if measure.is_all_rests() {
            MutationDetail::skipped("measure holds only rests")
        } else {
            MutationDetail::Deletion { start, len }
        };
        let measure = super::apply_detail(measure, &detail, ctx).expect("drawn span is in range");
        Outcome { measure, detail }
    }
}

pub fn delete_span(m: &Measure, start: usize, len: usize) -> Result<Measure, ReplayError> {
    check_span(m, start, len)?;
    let mut out = m.clone();
    for ev in &mut out.events[start..start + len] {
        *ev = NoteEvent::rest(ev.duration);
    }
    Ok(out)
}
