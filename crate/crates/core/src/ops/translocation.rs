use std::collections::HashMap;
use std::ops::Range;

use super::{
    MutationDetail, MutationKind, MutationOperator, OperatorContext, Outcome, ReplayError,
};
use crate::rng::DrawStream;
use crate::score::{Measure, NoteEvent, Score, TimeSignature};

/// Replaces the measure with a copy of another measure of the same meter.
#[derive(Clone, Copy, Debug, Default)]
pub struct Translocation;

impl MutationOperator for Translocation {
    fn kind(&self) -> MutationKind {
        MutationKind::Translocation
    }

    fn apply(&self, measure: &Measure, ctx: &OperatorContext, rng: &mut DrawStream) -> Outcome {
        let candidates = ctx
            .donors
            .map(|pool| pool.candidates(measure.time))
            .unwrap_or(&[]);
        let pick = rng.below(candidates.len());
        let detail = match (ctx.donors, candidates.get(pick)) {
            (Some(pool), Some(&entry)) => {
                let (part, index) = pool.coordinates(entry);
                MutationDetail::Translocation {
                    donor_part: part.to_string(),
                    donor_measure: index,
                }
            }
            _ => MutationDetail::skipped("no donor measure with a matching time signature"),
        };
        let measure =
            super::apply_detail(measure, &detail, ctx).expect("donor was drawn from the pool");
        Outcome { measure, detail }
    }
}

struct DonorEntry {
    part: String,
    measure: Measure,
}

/// Measures a translocation may copy from, grouped by time signature.
/// Entries are ordered part by part, then by measure index.
pub struct DonorPool {
    entries: Vec<DonorEntry>,
    by_meter: HashMap<TimeSignature, Vec<usize>>,
    lookup: HashMap<(String, usize), usize>,
}

impl DonorPool {
    /// Every measure of `score` except those in `exclude` (a part id and a
    /// range of measure indices, normally the leitmotif's source).
    pub fn new(score: &Score, exclude: Option<(&str, Range<usize>)>) -> Self {
        let mut entries = Vec::new();
        let mut by_meter: HashMap<TimeSignature, Vec<usize>> = HashMap::new();
        let mut lookup = HashMap::new();
        for part in &score.parts {
            for m in &part.measures {
                let excluded = exclude
                    .as_ref()
                    .is_some_and(|(id, range)| *id == part.id && range.contains(&m.index));
                if excluded {
                    continue;
                }
                let i = entries.len();
                by_meter.entry(m.time).or_default().push(i);
                lookup.insert((part.id.clone(), m.index), i);
                entries.push(DonorEntry {
                    part: part.id.clone(),
                    measure: m.clone(),
                });
            }
        }
        Self {
            entries,
            by_meter,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry numbers of donors in the given meter.
    pub fn candidates(&self, time: TimeSignature) -> &[usize] {
        self.by_meter.get(&time).map_or(&[], Vec::as_slice)
    }

    fn coordinates(&self, entry: usize) -> (&str, usize) {
        let e = &self.entries[entry];
        (&e.part, e.measure.index)
    }

    /// The donor measure re-indexed into the target's slot, with ties and
    /// staff context (key, clef) stripped.
    pub fn transplant(
        &self,
        target: &Measure,
        part: &str,
        index: usize,
    ) -> Result<Measure, ReplayError> {
        let entry = self.lookup.get(&(part.to_string(), index)).ok_or_else(|| {
            ReplayError::MissingDonor {
                part: part.to_string(),
                measure: index,
            }
        })?;
        let donor = &self.entries[*entry].measure;
        if donor.time != target.time {
            return Err(ReplayError::MeterMismatch {
                donor: donor.time,
                target: target.time,
            });
        }
        Ok(Measure {
            index: target.index,
            time: target.time,
            events: donor.events.iter().map(NoteEvent::untied).collect(),
            key: target.key.clone(),
            clef: target.clef.clone(),
        })
    }
}
