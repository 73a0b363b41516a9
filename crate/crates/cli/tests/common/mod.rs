#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use oncoscore::score::{Duration, Measure, NoteEvent, Part, Pitch, Score, TimeSignature};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/corpus")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn twinkle_path() -> PathBuf {
    corpus_dir().join("twinkle.musicxml")
}

pub fn twinkle() -> Score {
    let bytes = std::fs::read(twinkle_path()).expect("corpus file");
    oncoscore::parse_score(&bytes).expect("twinkle parses").0
}

pub fn oncoscore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oncoscore"))
        .args(args)
        .env_remove("ONCOSCORE_SEED")
        .output()
        .expect("binary runs")
}

/// A score of `parts` parts and `measures` bars of varied rhythm in 4/4,
/// with a 3/4 bar every seventh measure.
pub fn big_score(parts: usize, measures: usize) -> Score {
    let rhythms: [&[Duration]; 4] = [
        &[Duration::QUARTER; 4],
        &[
            Duration::HALF,
            Duration::EIGHTH,
            Duration::EIGHTH,
            Duration::QUARTER,
        ],
        &[Duration::EIGHTH; 8],
        &[Duration::WHOLE],
    ];
    let waltz: &[Duration] = &[Duration::HALF, Duration::QUARTER];
    Score {
        title: Some("Generated".into()),
        parts: (0..parts)
            .map(|p| Part {
                id: format!("P{}", p + 1),
                name: format!("Voice {}", p + 1),
                instrument: String::new(),
                measures: (0..measures)
                    .map(|m| {
                        let (time, rhythm) = if m % 7 == 6 {
                            (TimeSignature::new(3, 4).unwrap(), waltz)
                        } else {
                            (TimeSignature::default(), rhythms[(m + p) % rhythms.len()])
                        };
                        let events = rhythm
                            .iter()
                            .enumerate()
                            .map(|(k, d)| {
                                if (m + k) % 9 == 4 {
                                    NoteEvent::rest(*d)
                                } else {
                                    let base = 48 + 7 * p as i32;
                                    NoteEvent::note(
                                        Pitch::from_chromatic(base + ((m * 3 + k * 2) % 17) as i32),
                                        *d,
                                    )
                                }
                            })
                            .collect();
                        Measure::new(m, time, events)
                    })
                    .collect(),
            })
            .collect(),
        divisions_hint: 2,
    }
}
