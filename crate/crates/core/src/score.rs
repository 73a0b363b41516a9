//! In-memory partwise score with exact durations.
//!
//! Durations are rational numbers of whole notes, so a quarter note is `1/4`
//! and a measure of 6/8 holds `3/4`. Nothing in this module uses floating
//! point for time.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use num_rational::Rational64;
use thiserror::Error;

/// Largest denominator a duration may carry and still be written out.
pub const MAX_DENOMINATOR: i64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("pitch {step}{alter:+} octave {octave} is outside the representable range")]
    PitchOutOfRange { step: Step, alter: i8, octave: i8 },
    #[error("duration {0}/{1} is not a positive rational")]
    NonPositiveDuration(i64, i64),
    #[error("invalid time signature {0}/{1}")]
    InvalidTimeSignature(u32, u32),
    #[error("chord needs at least two distinct pitches")]
    DegenerateChord,
    #[error("part {part} measure {measure}: events sum to {actual}, capacity is {capacity}")]
    CapacityMismatch {
        part: String,
        measure: usize,
        actual: Duration,
        capacity: Duration,
    },
    #[error("score has no parts")]
    Empty,
    #[error("part {part} has {actual} measures, expected {expected}")]
    RaggedParts {
        part: String,
        actual: usize,
        expected: usize,
    },
    #[error("part {part} measure slot {slot} has index {index}")]
    NonContiguousMeasures {
        part: String,
        slot: usize,
        index: usize,
    },
    #[error("part {part} measure {measure} is in {found}, other parts use {expected}")]
    TimelineMismatch {
        part: String,
        measure: usize,
        found: TimeSignature,
        expected: TimeSignature,
    },
    #[error("duplicate part id {0}")]
    DuplicatePartId(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    C,
    D,
    E,
    F,
    G,
    A,
    B,
}

impl Step {
    pub const ALL: [Step; 7] = [
        Step::C,
        Step::D,
        Step::E,
        Step::F,
        Step::G,
        Step::A,
        Step::B,
    ];

    /// Semitones above C within the octave.
    pub fn semitone(self) -> i32 {
        match self {
            Step::C => 0,
            Step::D => 2,
            Step::E => 4,
            Step::F => 5,
            Step::G => 7,
            Step::A => 9,
            Step::B => 11,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Step::C => 'C',
            Step::D => 'D',
            Step::E => 'E',
            Step::F => 'F',
            Step::G => 'G',
            Step::A => 'A',
            Step::B => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Step> {
        Some(match c.to_ascii_uppercase() {
            'C' => Step::C,
            'D' => Step::D,
            'E' => Step::E,
            'F' => Step::F,
            'G' => Step::G,
            'A' => Step::A,
            'B' => Step::B,
            _ => return None,
        })
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A spelled pitch. Construction guarantees the chromatic index lies in `0..=127`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pitch {
    step: Step,
    alter: i8,
    octave: i8,
}

impl Pitch {
    /// Lowest chromatic index reachable by transposition. Anything lower
    /// would need octave -1, which MusicXML cannot spell.
    pub const LOWEST_SPELLABLE: i32 = 12;
    pub const HIGHEST: i32 = 127;

    pub fn new(step: Step, alter: i8, octave: i8) -> Result<Self, ScoreError> {
        let out_of_range = ScoreError::PitchOutOfRange {
            step,
            alter,
            octave,
        };
        if !(-2..=2).contains(&alter) || !(0..=9).contains(&octave) {
            return Err(out_of_range);
        }
        let p = Pitch {
            step,
            alter,
            octave,
        };
        if !(0..=Self::HIGHEST).contains(&p.chromatic()) {
            return Err(out_of_range);
        }
        Ok(p)
    }

    pub fn step(&self) -> Step {
        self.step
    }

    pub fn alter(&self) -> i8 {
        self.alter
    }

    pub fn octave(&self) -> i8 {
        self.octave
    }

    /// MIDI-style index, C4 = 60.
    pub fn chromatic(&self) -> i32 {
        (self.octave as i32 + 1) * 12 + self.step.semitone() + self.alter as i32
    }

    /// Simplest spelling of a chromatic index, sharps preferred.
    /// The index is clamped into the spellable range first.
    pub fn from_chromatic(index: i32) -> Pitch {
        const SPELLING: [(Step, i8); 12] = [
            (Step::C, 0),
            (Step::C, 1),
            (Step::D, 0),
            (Step::D, 1),
            (Step::E, 0),
            (Step::F, 0),
            (Step::F, 1),
            (Step::G, 0),
            (Step::G, 1),
            (Step::A, 0),
            (Step::A, 1),
            (Step::B, 0),
        ];
        let index = index.clamp(Self::LOWEST_SPELLABLE, Self::HIGHEST);
        let (step, alter) = SPELLING[(index % 12) as usize];
        Pitch {
            step,
            alter,
            octave: (index / 12 - 1) as i8,
        }
    }
}

impl fmt::Display for Pitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let acc = match self.alter {
            -2 => "bb",
            -1 => "b",
            1 => "#",
            2 => "##",
            _ => "",
        };
        write!(f, "{}{}{}", self.step, acc, self.octave)
    }
}

/// Shift a pitch by `semitones`, clamping into the spellable range and
/// respelling the result. A shift that lands on the same index returns `p`
/// unchanged.
pub fn transpose_pitch(p: Pitch, semitones: i32) -> Pitch {
    let target = (p.chromatic() + semitones).clamp(Pitch::LOWEST_SPELLABLE, Pitch::HIGHEST);
    if target == p.chromatic() {
        p
    } else {
        Pitch::from_chromatic(target)
    }
}

/// Exact length in whole notes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Duration(Rational64);

impl Duration {
    pub const WHOLE: Duration = Duration(Rational64::new_raw(1, 1));
    pub const HALF: Duration = Duration(Rational64::new_raw(1, 2));
    pub const QUARTER: Duration = Duration(Rational64::new_raw(1, 4));
    pub const EIGHTH: Duration = Duration(Rational64::new_raw(1, 8));
    pub const SIXTEENTH: Duration = Duration(Rational64::new_raw(1, 16));

    pub fn new(numer: i64, denom: i64) -> Result<Self, ScoreError> {
        if numer <= 0 || denom <= 0 {
            return Err(ScoreError::NonPositiveDuration(numer, denom));
        }
        Ok(Duration(Rational64::new(numer, denom)))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn as_ratio(&self) -> Rational64 {
        self.0
    }

    /// Half of this duration, or `None` once the denominator would exceed
    /// [`MAX_DENOMINATOR`].
    pub fn half(&self) -> Option<Duration> {
        if self.numer() % 2 == 0 {
            return Some(Duration(Rational64::new(self.numer() / 2, self.denom())));
        }
        let denom = self.denom().checked_mul(2)?;
        (denom <= MAX_DENOMINATOR).then(|| Duration(Rational64::new(self.numer(), denom)))
    }

    pub fn checked_sub(&self, other: Duration) -> Option<Duration> {
        let d = self.0 - other.0;
        (d > Rational64::from_integer(0)).then_some(Duration(d))
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl Add for Duration {
    type Output = Duration;

    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

impl Sum for Duration {
    fn sum<I: Iterator<Item = Duration>>(iter: I) -> Duration {
        // Zero is not a valid duration; the empty sum is represented as 0/1
        // internally and only ever compared against.
        Duration(iter.map(|d| d.0).sum())
    }
}

impl fmt::Debug for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TimeSignature {
    pub beats: u32,
    pub beat_type: u32,
}

impl TimeSignature {
    pub fn new(beats: u32, beat_type: u32) -> Result<Self, ScoreError> {
        if beats == 0 || beat_type == 0 || beat_type > 1024 || beats > 1024 {
            return Err(ScoreError::InvalidTimeSignature(beats, beat_type));
        }
        Ok(Self { beats, beat_type })
    }

    pub fn capacity(&self) -> Duration {
        Duration(Rational64::new(self.beats as i64, self.beat_type as i64))
    }
}

impl Default for TimeSignature {
    fn default() -> Self {
        Self {
            beats: 4,
            beat_type: 4,
        }
    }
}

impl fmt::Display for TimeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.beats, self.beat_type)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Note,
    Rest,
    Chord,
}

/// Tie markers on an event. `start` ties into the following event,
/// `stop` continues the previous one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Tie {
    pub start: bool,
    pub stop: bool,
}

/// A note, rest or chord. The kind follows from the pitch list: empty for a
/// rest, one pitch for a note, two or more distinct pitches for a chord.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NoteEvent {
    pitches: Vec<Pitch>,
    pub duration: Duration,
    pub tie: Tie,
}

impl NoteEvent {
    pub fn note(pitch: Pitch, duration: Duration) -> Self {
        Self {
            pitches: vec![pitch],
            duration,
            tie: Tie::default(),
        }
    }

    pub fn rest(duration: Duration) -> Self {
        Self {
            pitches: Vec::new(),
            duration,
            tie: Tie::default(),
        }
    }

    pub fn chord(pitches: Vec<Pitch>, duration: Duration) -> Result<Self, ScoreError> {
        let ev = Self::from_pitches(pitches, duration);
        if ev.kind() != EventKind::Chord {
            return Err(ScoreError::DegenerateChord);
        }
        Ok(ev)
    }

    /// Builds whichever kind the pitches describe. Duplicate pitches are
    /// merged, keeping first-seen order.
    pub fn from_pitches(pitches: Vec<Pitch>, duration: Duration) -> Self {
        let mut distinct: Vec<Pitch> = Vec::with_capacity(pitches.len());
        for p in pitches {
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
        Self {
            pitches: distinct,
            duration,
            tie: Tie::default(),
        }
    }

    pub fn kind(&self) -> EventKind {
        match self.pitches.len() {
            0 => EventKind::Rest,
            1 => EventKind::Note,
            _ => EventKind::Chord,
        }
    }

    pub fn is_rest(&self) -> bool {
        self.pitches.is_empty()
    }

    pub fn pitches(&self) -> &[Pitch] {
        &self.pitches
    }

    pub fn with_duration(&self, duration: Duration) -> Self {
        Self {
            duration,
            ..self.clone()
        }
    }

    /// Same event with tie markers removed.
    pub fn untied(&self) -> Self {
        Self {
            tie: Tie::default(),
            ..self.clone()
        }
    }

    /// Applies `f` to every pitch; duplicates created by the mapping merge.
    pub fn map_pitches(&self, f: impl Fn(Pitch) -> Pitch) -> Self {
        let mut ev =
            Self::from_pitches(self.pitches.iter().copied().map(f).collect(), self.duration);
        ev.tie = self.tie;
        ev
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeySignature {
    pub fifths: i8,
    pub mode: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clef {
    pub sign: String,
    pub line: Option<i8>,
    pub octave_change: Option<i8>,
}

/// One bar. `key` and `clef` are set only where the source declared a change.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Measure {
    pub index: usize,
    pub time: TimeSignature,
    pub events: Vec<NoteEvent>,
    pub key: Option<KeySignature>,
    pub clef: Option<Clef>,
}

impl Measure {
    pub fn new(index: usize, time: TimeSignature, events: Vec<NoteEvent>) -> Self {
        Self {
            index,
            time,
            events,
            key: None,
            clef: None,
        }
    }

    /// A bar holding one rest that fills it.
    pub fn silent(index: usize, time: TimeSignature) -> Self {
        Self::new(index, time, vec![NoteEvent::rest(time.capacity())])
    }

    pub fn capacity(&self) -> Duration {
        measure_capacity(self)
    }

    pub fn content(&self) -> Duration {
        self.events.iter().map(|e| e.duration).sum()
    }

    pub fn is_full(&self) -> bool {
        self.content() == self.capacity()
    }

    pub fn is_all_rests(&self) -> bool {
        self.events.iter().all(NoteEvent::is_rest)
    }

    /// Content of this bar moved into a bar of a possibly different meter:
    /// trailing events are cut or a rest is appended until it fits exactly.
    pub fn refit(&self, index: usize, time: TimeSignature) -> Measure {
        let capacity = time.capacity();
        let mut events = Vec::with_capacity(self.events.len());
        let mut used: Option<Duration> = None;
        for ev in &self.events {
            let remaining = match used {
                None => capacity,
                Some(u) => match capacity.checked_sub(u) {
                    Some(r) => r,
                    None => break,
                },
            };
            if ev.duration <= remaining {
                events.push(ev.clone());
                used = Some(used.map_or(ev.duration, |u| u + ev.duration));
            } else {
                events.push(ev.with_duration(remaining).untied());
                used = Some(capacity);
                break;
            }
        }
        let used_total = used.unwrap_or(capacity);
        if events.is_empty() {
            events.push(NoteEvent::rest(capacity));
        } else if let Some(rest) = capacity.checked_sub(used_total) {
            events.push(NoteEvent::rest(rest));
        }
        Measure::new(index, time, events)
    }
}

/// Total length a bar must hold: beats × 1/beat_type whole notes.
pub fn measure_capacity(m: &Measure) -> Duration {
    m.time.capacity()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Part {
    pub id: String,
    pub name: String,
    pub instrument: String,
    pub measures: Vec<Measure>,
}

impl Part {
    pub fn check_measures(&self) -> Result<(), ScoreError> {
        for (slot, m) in self.measures.iter().enumerate() {
            if m.index != slot {
                return Err(ScoreError::NonContiguousMeasures {
                    part: self.id.clone(),
                    slot,
                    index: m.index,
                });
            }
            let actual = m.content();
            if actual != m.capacity() {
                return Err(ScoreError::CapacityMismatch {
                    part: self.id.clone(),
                    measure: slot,
                    actual,
                    capacity: m.capacity(),
                });
            }
        }
        Ok(())
    }

    /// Key and clef in force at measure `index`, looking back through
    /// earlier declarations.
    pub fn context_at(&self, index: usize) -> (Option<KeySignature>, Option<Clef>) {
        let upto = &self.measures[..=index.min(self.measures.len().saturating_sub(1))];
        let key = upto.iter().rev().find_map(|m| m.key.clone());
        let clef = upto.iter().rev().find_map(|m| m.clef.clone());
        (key, clef)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Score {
    pub title: Option<String>,
    pub parts: Vec<Part>,
    /// Divisions per quarter note seen in the source, reused on write when
    /// it can represent every duration.
    pub divisions_hint: u32,
}

impl Score {
    pub fn measure_count(&self) -> usize {
        self.parts.first().map_or(0, |p| p.measures.len())
    }

    pub fn part(&self, id: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.id == id)
    }

    /// Time signature of every measure slot, taken from the first part.
    pub fn timeline(&self) -> Vec<TimeSignature> {
        self.parts
            .first()
            .map(|p| p.measures.iter().map(|m| m.time).collect())
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        let first = self.parts.first().ok_or(ScoreError::Empty)?;
        let expected = first.measures.len();
        let timeline = self.timeline();
        let mut seen = std::collections::HashSet::new();
        for part in &self.parts {
            if !seen.insert(part.id.as_str()) {
                return Err(ScoreError::DuplicatePartId(part.id.clone()));
            }
            if part.measures.len() != expected {
                return Err(ScoreError::RaggedParts {
                    part: part.id.clone(),
                    actual: part.measures.len(),
                    expected,
                });
            }
            part.check_measures()?;
            for (m, ts) in part.measures.iter().zip(&timeline) {
                if m.time != *ts {
                    return Err(ScoreError::TimelineMismatch {
                        part: part.id.clone(),
                        measure: m.index,
                        found: m.time,
                        expected: *ts,
                    });
                }
            }
        }
        Ok(())
    }

    /// Removes tie markers that no longer connect two events of equal pitch.
    pub fn sanitize_ties(&mut self) {
        for part in &mut self.parts {
            sanitize_part_ties(part);
        }
    }
}

fn sanitize_part_ties(part: &mut Part) {
    let positions: Vec<(usize, usize)> = part
        .measures
        .iter()
        .enumerate()
        .flat_map(|(mi, m)| (0..m.events.len()).map(move |ei| (mi, ei)))
        .collect();
    let linked = |a: &NoteEvent, b: &NoteEvent| {
        a.tie.start && b.tie.stop && !a.is_rest() && a.pitches() == b.pitches()
    };
    let mut keep_start = vec![false; positions.len()];
    let mut keep_stop = vec![false; positions.len()];
    for w in 0..positions.len().saturating_sub(1) {
        let (am, ae) = positions[w];
        let (bm, be) = positions[w + 1];
        if linked(&part.measures[am].events[ae], &part.measures[bm].events[be]) {
            keep_start[w] = true;
            keep_stop[w + 1] = true;
        }
    }
    for (i, &(mi, ei)) in positions.iter().enumerate() {
        let tie = &mut part.measures[mi].events[ei].tie;
        tie.start &= keep_start[i];
        tie.stop &= keep_stop[i];
    }
}
