use super::{
    MutationDetail, MutationKind, MutationOperator, OperatorContext, Outcome, ReplayError,
};
use crate::rng::DrawStream;
use crate::score::{transpose_pitch, Measure};

/// Moves one note (or whole chord) up or down by 1 to 12 semitones.
#[derive(Clone, Copy, Debug, Default)]
pub struct Transposition;

/// Maps a draw in `0..24` onto `-12..=-1` then `1..=12`.
pub fn semitones_from_draw(draw: usize) -> i32 {
    let d = draw as i32;
    if d < 12 {
        d - 12
    } else {
        d - 11
    }
}

impl MutationOperator for Transposition {
    fn kind(&self) -> MutationKind {
        MutationKind::Transposition
    }

    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome {
        let pitched: Vec<usize> = (0..measure.events.len())
            .filter(|&i| !measure.events[i].is_rest())
            .collect();
        let pick = rng.below(pitched.len());
        let semitones = semitones_from_draw(rng.below(24));
        let detail = match pitched.get(pick) {
            Some(&event) => MutationDetail::Transposition { event, semitones },
            None => MutationDetail::skipped("measure holds only rests"),
        };
        let measure = super::apply_detail(measure, &detail, ctx).expect("picked a pitched event");
        Outcome { measure, detail }
    }
}

pub fn transpose_event(m: &Measure, event: usize, semitones: i32) -> Result<Measure, ReplayError> {
    let ev = m.events.get(event).ok_or(ReplayError::SpanOutOfRange {
        start: event,
        len: 1,
        events: m.events.len(),
    })?;
    if ev.is_rest() {
        return Err(ReplayError::NotPitched(event));
    }
    let mut out = m.clone();
    out.events[event] = ev.map_pitches(|p| transpose_pitch(p, semitones)).untied();
    Ok(out)
}
