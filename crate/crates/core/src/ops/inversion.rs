use super::{
    check_span, draw_span, MutationDetail, MutationKind, MutationOperator, OperatorContext,
    Outcome, ReplayError,
};
use crate::rng::DrawStream;
use crate::score::Measure;

/// Reverses the order of a run of whole events (pitch and duration move together).
#[derive(Clone, Copy, Debug, Default)]
pub struct Inversion;

impl MutationOperator for Inversion {
    fn kind(&self) -> MutationKind {
        MutationKind::Inversion
    }

    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome {
        let (start, len) = draw_span(measure.events.len(), rng);
        let detail = if measure.events.len() < 2 {
            MutationDetail::skipped("fewer than two events")
        } else {
            MutationDetail::Inversion { start, len }
        };
        let measure = super::apply_detail(measure, &detail, ctx).expect("drawn span is in range");
        Outcome { measure, detail }
    }
}

/// A span of one leaves the measure untouched, ties included.
pub fn invert_span(m: &Measure, start: usize, len: usize) -> Result<Measure, ReplayError> {
    check_span(m, start, len)?;
    let mut out = m.clone();
    if len > 1 {
        let span = &mut out.events[start..start + len];
        span.reverse();
        for ev in span {
            ev.tie = Default::default();
        }
    }
    Ok(out)
}
