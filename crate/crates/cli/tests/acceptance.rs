//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration as Elapsed, Instant};

use oncoscore::engine::{apply_therapy, initial_state, run, EngineParams, MutantPart};
use oncoscore::ops::{
    apply_detail, delete_span, insert_span, invert_span, op_deletion, op_insertion, op_inversion,
    op_translocation, op_transposition, transpose_event, DonorPool, MutationDetail,
    OperatorContext, Outcome,
};
use oncoscore::rng::DrawStream;
use oncoscore::score::{Duration, Measure, NoteEvent, Part, Pitch, Score, Step, TimeSignature};
use oncoscore::{parse_score, write_score};

use common::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("operator semantics", operator_semantics),
        ("capacity conservation", capacity_conservation),
        ("distribution checks", distribution_checks),
        ("boundary behavior", boundary_behavior),
        ("determinism", determinism),
        ("round-trip", round_trip),
        ("two children, one grandchild", lineage_shape),
        ("branching oracle", branching_oracle),
        ("end-to-end runtime", end_to_end_runtime),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let ms = t.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS  {name:<28} {detail} ({ms} ms)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<28} {why} ({ms} ms)");
            }
        }
    }
    let _ = panic::take_hook();
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown".into())
}

fn pitch(step: Step, octave: i8) -> Pitch {
    Pitch::new(step, 0, octave).unwrap()
}

fn note(step: Step, d: Duration) -> NoteEvent {
    NoteEvent::note(pitch(step, 4), d)
}

fn four_four(events: Vec<NoteEvent>) -> Measure {
    Measure::new(0, TimeSignature::default(), events)
}

// ---------------------------------------------------------------------------

fn operator_semantics() -> Check {
    let started = Instant::now();
    let q = Duration::QUARTER;
    let e = Duration::EIGHTH;
    let ctx = OperatorContext::default();

    // Insertion: A B C rest, span A B C.
    let abc = four_four(vec![
        note(Step::A, q),
        note(Step::B, q),
        note(Step::C, q),
        NoteEvent::rest(q),
    ]);
    let got = insert_span(&abc, 0, 3).map_err(|e| e.to_string())?;
    let want = vec![
        note(Step::A, e),
        note(Step::B, e),
        note(Step::C, e),
        note(Step::A, e),
        note(Step::B, e),
        note(Step::C, e),
        NoteEvent::rest(q),
    ];
    ensure!(got.events == want, "insertion ABC gave {:?}", got.events);
    let via_detail =
        apply_detail(&abc, &MutationDetail::Insertion { start: 0, len: 3 }, &ctx).unwrap();
    ensure!(via_detail == got, "insertion replay differs");
    let whole = four_four(vec![note(Step::C, Duration::WHOLE)]);
    let got = insert_span(&whole, 0, 1).unwrap();
    ensure!(
        got.events == vec![note(Step::C, Duration::HALF), note(Step::C, Duration::HALF)],
        "insertion of a whole note gave {:?}",
        got.events
    );

    // Inversion: C E G reversed; length one is identity; twice is identity.
    let ceg = Measure::new(
        0,
        TimeSignature::new(3, 4).unwrap(),
        vec![note(Step::C, q), note(Step::E, q), note(Step::G, q)],
    );
    let got = invert_span(&ceg, 0, 3).unwrap();
    ensure!(
        got.events == vec![note(Step::G, q), note(Step::E, q), note(Step::C, q)],
        "inversion CEG gave {:?}",
        got.events
    );
    ensure!(
        invert_span(&ceg, 1, 1).unwrap() == ceg,
        "length-one inversion changed the measure"
    );
    ensure!(
        invert_span(&got, 0, 3).unwrap() == ceg,
        "inversion is not an involution"
    );

    // Deletion: C E G(half), span E.
    let ceg2 = four_four(vec![
        note(Step::C, q),
        note(Step::E, q),
        note(Step::G, Duration::HALF),
    ]);
    let got = delete_span(&ceg2, 1, 1).unwrap();
    ensure!(
        got.events
            == vec![
                note(Step::C, q),
                NoteEvent::rest(q),
                note(Step::G, Duration::HALF)
            ],
        "deletion of E gave {:?}",
        got.events
    );
    let all = delete_span(&ceg2, 0, 3).unwrap();
    let durations: Vec<Duration> = all.events.iter().map(|e| e.duration).collect();
    ensure!(
        all.is_all_rests() && durations == vec![q, q, Duration::HALF],
        "total deletion gave {:?}",
        all.events
    );

    // Transposition: C4 + 7 = G4, C4 + 12 = C5 with durations unchanged.
    let c4 = four_four(vec![
        note(Step::C, q),
        note(Step::D, Duration::new(3, 4).unwrap()),
    ]);
    let got = transpose_event(&c4, 0, 7).unwrap();
    ensure!(
        got.events[0] == note(Step::G, q),
        "C4+7 gave {:?}",
        got.events[0]
    );
    let got = transpose_event(&c4, 0, 12).unwrap();
    ensure!(
        got.events[0] == NoteEvent::note(pitch(Step::C, 5), q) && got.events[1] == c4.events[1],
        "C4+12 gave {:?}",
        got.events
    );

    // Translocation: a 25-bar 4/4 piece, target bar 0; every other bar is
    // a candidate and only those.
    let piece = Score {
        title: None,
        parts: vec![Part {
            id: "P1".into(),
            name: "Solo".into(),
            instrument: String::new(),
            measures: (0..25)
                .map(|i| {
                    Measure::new(
                        i,
                        TimeSignature::default(),
                        vec![
                            NoteEvent::note(Pitch::from_chromatic(40 + i as i32), Duration::HALF),
                            NoteEvent::note(Pitch::from_chromatic(70 - i as i32), Duration::HALF),
                        ],
                    )
                })
                .collect(),
        }],
        divisions_hint: 1,
    };
    let target = piece.parts[0].measures[0].clone();
    let pool = DonorPool::new(&piece, Some(("P1", 0..1)));
    let mut seen = BTreeSet::new();
    for seed in 0..2000 {
        let out = op_translocation(&target, &pool, &mut DrawStream::from_seed(seed));
        let MutationDetail::Translocation { donor_measure, .. } = out.detail else {
            return Err(format!("translocation skipped: {:?}", out.detail));
        };
        ensure!(
            (1..25).contains(&donor_measure),
            "donor bar {donor_measure} is not one of the other 24"
        );
        ensure!(
            out.measure.events == piece.parts[0].measures[donor_measure].events
                && out.measure.index == 0,
            "translocated bar does not equal donor bar {donor_measure}"
        );
        seen.insert(donor_measure);
    }
    ensure!(
        seen.len() == 24,
        "only {} of 24 donors were ever chosen",
        seen.len()
    );
    let lonely = Score {
        parts: vec![Part {
            measures: vec![target.clone()],
            ..piece.parts[0].clone()
        }],
        ..piece.clone()
    };
    let out = op_translocation(
        &target,
        &DonorPool::new(&lonely, Some(("P1", 0..1))),
        &mut DrawStream::from_seed(1),
    );
    ensure!(
        out.detail.is_skipped(),
        "single-bar score should skip, got {:?}",
        out.detail
    );

    let elapsed = started.elapsed();
    ensure!(elapsed < Elapsed::from_secs(1), "took {elapsed:?}");
    Ok("insertion, deletion, inversion, translocation, transposition examples".into())
}

// ---------------------------------------------------------------------------

const METERS: [(u32, u32); 9] = [
    (2, 4),
    (3, 4),
    (4, 4),
    (5, 4),
    (6, 8),
    (3, 8),
    (7, 8),
    (2, 2),
    (12, 8),
];

fn random_measure(rng: &mut DrawStream, index: usize) -> Measure {
    let (b, t) = METERS[rng.below(METERS.len())];
    let time = TimeSignature::new(b, t).unwrap();
    // Whole-note fractions, including dotted values and a triplet eighth.
    let choices = [
        (1, 16),
        (1, 12),
        (1, 8),
        (3, 16),
        (1, 6),
        (1, 4),
        (3, 8),
        (1, 2),
        (3, 4),
        (1, 1),
    ];
    let all_rests = rng.chance(0.05);
    let mut left = Some(time.capacity());
    let mut events = Vec::new();
    while let Some(room) = left {
        let fitting: Vec<Duration> = choices
            .iter()
            .map(|&(n, d)| Duration::new(n, d).unwrap())
            .filter(|d| *d <= room)
            .collect();
        let d = if fitting.is_empty() {
            room
        } else {
            fitting[rng.below(fitting.len())]
        };
        let roll = rng.unit();
        let ev = if all_rests || roll < 0.2 {
            NoteEvent::rest(d)
        } else if roll < 0.35 {
            let root = 36 + rng.below(60) as i32;
            NoteEvent::from_pitches(
                vec![
                    Pitch::from_chromatic(root),
                    Pitch::from_chromatic(root + 4),
                    Pitch::from_chromatic(root + 7),
                ],
                d,
            )
        } else {
            NoteEvent::note(Pitch::from_chromatic(24 + rng.below(90) as i32), d)
        };
        events.push(ev);
        left = room.checked_sub(d);
    }
    Measure::new(index, time, events)
}

fn capacity_conservation() -> Check {
    let mut gen = DrawStream::from_seed(0x5eed);
    let donor_score = Score {
        title: None,
        parts: (0..2)
            .map(|p| Part {
                id: format!("D{p}"),
                name: String::new(),
                instrument: String::new(),
                measures: (0..60).map(|i| random_measure(&mut gen, i)).collect(),
            })
            .collect(),
        divisions_hint: 1,
    };
    let pool = oncoscore::ops::donors_from(&donor_score);
    let mut violations = 0;
    let mut skipped = 0;
    let mut exact_checks = 0;
    for i in 0..10_000 {
        let m = random_measure(&mut gen, i % 50);
        let mut rng = DrawStream::from_seed(i as u64);
        let out: Outcome = match i % 5 {
            0 => op_insertion(&m, &mut rng),
            1 => op_deletion(&m, &mut rng),
            2 => op_inversion(&m, &mut rng),
            3 => op_translocation(&m, &pool, &mut rng),
            _ => op_transposition(&m, &mut rng),
        };
        if out.detail.is_skipped() {
            skipped += 1;
        }
        // Independent recount in i128 fractions.
        let sum = out.measure.events.iter().fold((0i128, 1i128), |acc, e| {
            add_fraction(
                acc,
                (e.duration.numer() as i128, e.duration.denom() as i128),
            )
        });
        let cap = m.time.capacity();
        let want = reduce((cap.numer() as i128, cap.denom() as i128));
        let ok = sum == want
            && out.measure.time == m.time
            && out.measure.index == m.index
            && out.measure.events.iter().all(|e| e.duration.numer() > 0);
        exact_checks += 1;
        if !ok {
            violations += 1;
        }
    }
    ensure!(
        violations == 0,
        "{violations} capacity violations in {exact_checks} applications"
    );
    Ok(format!(
        "{exact_checks} applications, 0 violations, {skipped} skipped"
    ))
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn reduce((n, d): (i128, i128)) -> (i128, i128) {
    let g = gcd(n, d).max(1);
    (n / g, d / g)
}

fn add_fraction((a, b): (i128, i128), (c, d): (i128, i128)) -> (i128, i128) {
    reduce((a * d + c * b, b * d))
}

// ---------------------------------------------------------------------------

fn distribution_checks() -> Check {
    // Transposition deltas.
    let m = four_four(vec![note(Step::C, Duration::WHOLE)]);
    let mut counts = std::collections::BTreeMap::new();
    let mut rng = DrawStream::from_seed(2024);
    let draws = 10_000;
    for _ in 0..draws {
        match op_transposition(&m, &mut rng).detail {
            MutationDetail::Transposition { semitones, .. } => {
                *counts.entry(semitones).or_insert(0usize) += 1
            }
            other => return Err(format!("unexpected detail {other:?}")),
        }
    }
    let expected: BTreeSet<i32> = (-12..=12).filter(|k| *k != 0).collect();
    let keys: BTreeSet<i32> = counts.keys().copied().collect();
    ensure!(keys == expected, "deltas observed: {keys:?}");
    let worst = counts
        .values()
        .map(|&c| (c as f64 / draws as f64 - 1.0 / 24.0).abs())
        .fold(0.0, f64::max);
    let uniform = worst <= 0.01;
    ensure!(uniform, "largest frequency deviation {worst:.4}");

    // Survival at 0.5 over 200 runs of 100 living parts.
    let score = big_score(1, 20);
    let runs = 200;
    let mut survivors = 0usize;
    for seed in 0..runs {
        let params = EngineParams {
            seed,
            treatment_enabled: true,
            survival_rate: 0.5,
            therapy_start: 0.5,
            ..EngineParams::inert()
        };
        let mut state = initial_state(&score, &params).map_err(|e| e.to_string())?;
        let founder = state.nodes[0].clone();
        for i in 1..100 {
            state.nodes.push(MutantPart {
                part_id: format!("M{i}"),
                parent: Some(founder.part_id.clone()),
                ..founder.clone()
            });
        }
        apply_therapy(&mut state, &params);
        let t = state.therapy.as_ref().ok_or("therapy did not run")?;
        ensure!(
            t.killed.len() + t.survived.len() == 100,
            "therapy saw {} parts",
            t.killed.len() + t.survived.len()
        );
        survivors += t.survived.len();
    }
    let mean = survivors as f64 / runs as f64;
    ensure!(
        (45.0..=55.0).contains(&mean),
        "mean survivors {mean:.2} of 100"
    );
    Ok(format!(
        "max transposition deviation {worst:.4}; mean survivors {mean:.2}/100"
    ))
}

// ---------------------------------------------------------------------------

fn boundary_behavior() -> Check {
    let score = big_score(2, 40);
    let mut silenced = 0;
    for seed in 0..20 {
        let params = EngineParams {
            seed,
            p_reproduction: 0.8,
            treatment_enabled: true,
            survival_rate: 0.0,
            therapy_start: 0.6,
            ..EngineParams::default()
        };
        let (out, tree) = run(&score, &params).map_err(|e| e.to_string())?;
        let t = tree.therapy.as_ref().ok_or("no therapy record")?;
        ensure!(
            t.survived.is_empty(),
            "seed {seed}: {} survived at rate 0",
            t.survived.len()
        );
        for node in &tree.nodes {
            let part = out.part(&node.part_id).ok_or("missing part")?;
            ensure!(
                part.measures[t.start_measure..]
                    .iter()
                    .all(Measure::is_all_rests),
                "seed {seed}: {} still sounds after the therapy measure",
                node.part_id
            );
            silenced += 1;
        }

        let params = EngineParams {
            survival_rate: 1.0,
            ..params
        };
        let (_, tree) = run(&score, &params).map_err(|e| e.to_string())?;
        let t = tree.therapy.as_ref().ok_or("no therapy record")?;
        ensure!(
            t.killed.is_empty(),
            "seed {seed}: {} silenced at rate 1",
            t.killed.len()
        );
        ensure!(
            tree.nodes
                .iter()
                .all(|n| n.alive && n.death_measure.is_none()),
            "seed {seed}: a part died at rate 1"
        );
    }

    // All probabilities zero: input parts plus a repeating, unmutated leitmotif.
    for seed in 0..10 {
        let params = EngineParams {
            seed,
            ..EngineParams::inert()
        };
        let (out, tree) = run(&score, &params).map_err(|e| e.to_string())?;
        ensure!(
            tree.events.is_empty() && tree.nodes.len() == 1,
            "seed {seed}: inert run mutated or reproduced"
        );
        ensure!(
            out.parts.len() == score.parts.len(),
            "seed {seed}: part count changed"
        );
        let f = tree.founder();
        let n = params.leitmotif_length;
        for (before, after) in score.parts.iter().zip(&out.parts) {
            ensure!(before.id == after.id, "part order changed");
            if before.id != f.part_id {
                ensure!(before == after, "seed {seed}: {} changed", before.id);
                continue;
            }
            ensure!(
                before.measures[..f.spawn_measure] == after.measures[..f.spawn_measure],
                "prefix changed"
            );
            for m in f.spawn_measure..score.measure_count() {
                let src = &before.measures[f.spawn_measure + (m - f.spawn_measure) % n];
                let want = src.refit(m, before.measures[m].time);
                ensure!(
                    after.measures[m].events == want.events,
                    "seed {seed}: bar {m} is not the leitmotif"
                );
            }
        }
    }
    Ok(format!(
        "rate 0 silenced {silenced} parts; rate 1 silenced none; inert runs repeat the leitmotif"
    ))
}

// ---------------------------------------------------------------------------

const GOLDEN_FLAGS: [&str; 9] = [
    "--seed",
    "42",
    "--insertion",
    "0.3",
    "--treatment",
    "--survival",
    "0.2",
    "--therapy-start",
    "0.7",
];

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = twinkle_path();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let xml = dir.path().join(format!("run{run}.musicxml"));
        let json = dir.path().join(format!("run{run}.json"));
        let mut argv = vec![
            "--input".to_string(),
            input.display().to_string(),
            "--output".into(),
            xml.display().to_string(),
            "--report".into(),
            json.display().to_string(),
        ];
        argv.extend(GOLDEN_FLAGS.iter().map(|s| s.to_string()));
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = oncoscore(&argv);
        ensure!(
            out.status.success(),
            "run {run} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push((fs::read(&xml).unwrap(), fs::read(&json).unwrap()));
    }
    ensure!(
        outputs[0].0 == outputs[1].0,
        "MusicXML differs between runs"
    );
    ensure!(outputs[0].1 == outputs[1].1, "report differs between runs");

    let golden_xml = fs::read(golden_dir().join("twinkle-seed42.musicxml"))
        .map_err(|e| format!("golden score: {e}"))?;
    let golden_json = fs::read(golden_dir().join("twinkle-seed42.report.json"))
        .map_err(|e| format!("golden report: {e}"))?;
    ensure!(
        outputs[0].0 == golden_xml,
        "MusicXML differs from the checked-in golden file"
    );
    ensure!(
        outputs[0].1 == golden_json,
        "report differs from the checked-in golden file"
    );
    Ok(format!(
        "two runs and golden files byte-identical ({} + {} bytes)",
        golden_xml.len(),
        golden_json.len()
    ))
}

// ---------------------------------------------------------------------------

fn round_trip() -> Check {
    let mut files: Vec<_> = fs::read_dir(corpus_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "musicxml"))
        .collect();
    files.sort();
    ensure!(files.len() >= 10, "corpus has only {} files", files.len());
    ensure!(
        files.iter().any(|p| p.ends_with("twinkle.musicxml")),
        "corpus lacks the twinkle score"
    );
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy();
        let (first, _) =
            parse_score(&fs::read(path).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        let written = write_score(&first).map_err(|e| format!("{name}: {e}"))?;
        let (second, _) = parse_score(&written).map_err(|e| format!("{name} reparse: {e}"))?;
        let strip = |mut s: Score| {
            s.divisions_hint = 0;
            s
        };
        ensure!(
            strip(first) == strip(second.clone()),
            "{name}: parse-write-parse changed the score"
        );
        let again = write_score(&second).unwrap();
        ensure!(again == written, "{name}: second write differs");
    }
    Ok(format!("{} files are fixed points", files.len()))
}

// ---------------------------------------------------------------------------

fn lineage_shape() -> Check {
    let params = EngineParams {
        seed: 8,
        leitmotif_length: 3,
        ..EngineParams::default()
    };
    let (out, tree) = run(&twinkle(), &params).map_err(|e| e.to_string())?;
    let founder = tree.founder();
    let children: Vec<_> = tree.children_of(&founder.part_id).collect();
    ensure!(
        children.len() == 2,
        "founder has {} children",
        children.len()
    );
    let grandchildren: Vec<_> = children
        .iter()
        .flat_map(|c| tree.children_of(&c.part_id))
        .collect();
    ensure!(
        grandchildren.len() == 1,
        "{} grandchildren",
        grandchildren.len()
    );
    ensure!(
        tree.nodes.len() == 4,
        "{} cancer parts in total",
        tree.nodes.len()
    );
    let offsets: BTreeSet<usize> = tree.nodes[1..].iter().map(|n| n.offset).collect();
    ensure!(offsets.len() == 3, "offsets are not distinct: {offsets:?}");
    let g = grandchildren[0];
    let mutated = tree.events.iter().any(|e| {
        !e.detail.is_skipped() && (e.part == g.part_id || Some(&e.part) == g.parent.as_ref())
    });
    ensure!(mutated, "the grandchild's line never mutated");
    ensure!(out.parts.len() == 5, "output has {} parts", out.parts.len());
    Ok(format!(
        "{} -> {{{}, {}}}, {} -> {}; offsets {:?}",
        founder.part_id,
        children[0].part_id,
        children[1].part_id,
        g.parent.as_deref().unwrap_or("?"),
        g.part_id,
        offsets
    ))
}

// ---------------------------------------------------------------------------

fn branching_oracle() -> Check {
    let score = big_score(1, 8);
    let params = EngineParams {
        p_reproduction: 1.0,
        max_offspring: 1,
        cancer_start: Some(0.0),
        leitmotif_length: 2,
        seed: 3,
        ..EngineParams::default()
    };
    let (_, tree) = run(&score, &params).map_err(|e| e.to_string())?;
    // Boundaries 2, 4 and 6. Each cycle exactly one part is still under its cap:
    // the one born in the previous cycle.
    let expected: [(&str, Option<&str>, usize, u32, u32); 4] = [
        ("P1", None, 0, 0, 1),
        ("M1", Some("P1"), 2, 1, 1),
        ("M2", Some("M1"), 4, 2, 1),
        ("M3", Some("M2"), 6, 3, 0),
    ];
    ensure!(tree.nodes.len() == 4, "{} nodes", tree.nodes.len());
    for (node, (id, parent, spawn, cycle, kids)) in tree.nodes.iter().zip(expected) {
        let got = (
            node.part_id.as_str(),
            node.parent.as_deref(),
            node.spawn_measure,
            node.born_in_cycle,
            node.offspring_count,
        );
        ensure!(
            got == (id, parent, spawn, cycle, kids),
            "expected {:?}, got {got:?}",
            (id, parent, spawn, cycle, kids)
        );
    }
    Ok("P1 -> M1 -> M2 -> M3 at measures 2, 4, 6".into())
}

// ---------------------------------------------------------------------------

fn end_to_end_runtime() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("big.musicxml");
    fs::write(
        &input,
        write_score(&big_score(4, 100)).map_err(|e| e.to_string())?,
    )
    .unwrap();
    let started = Instant::now();
    let out = oncoscore(&[
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "1",
        "--reproduction",
        "0.9",
        "--cancer-parts",
        "3",
        "--treatment",
    ]);
    let elapsed = started.elapsed();
    ensure!(
        out.status.success(),
        "run failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let produced = fs::read(dir.path().join("big.mutant.musicxml")).map_err(|e| e.to_string())?;
    let (mutated, _) = parse_score(&produced).map_err(|e| e.to_string())?;
    ensure!(
        mutated.measure_count() == 100,
        "output has {} measures",
        mutated.measure_count()
    );
    ensure!(elapsed < Elapsed::from_secs(5), "took {elapsed:?}");
    Ok(format!(
        "100 measures x 4 parts -> {} parts in {elapsed:.2?}",
        mutated.parts.len()
    ))
}
