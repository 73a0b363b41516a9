use std::collections::HashMap;

use roxmltree::{Document, Node, ParsingOptions};

use super::{MusicXmlError, ParseDiagnostics};
use crate::score::{
    Clef, Duration, KeySignature, Measure, NoteEvent, Part, Pitch, Score, Step, Tie, TimeSignature,
};

/// Reads a partwise MusicXML document.
pub fn parse_score(xml: &[u8]) -> Result<(Score, ParseDiagnostics), MusicXmlError> {
    if xml.starts_with(b"PK\x03\x04") {
        return Err(MusicXmlError::UnsupportedFormat(
            "compressed .mxl archives are not supported; extract the score first".into(),
        ));
    }
    let text = std::str::from_utf8(xml).map_err(|e| MusicXmlError::Encoding {
        offset: e.valid_up_to(),
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let bom = xml.len() - text.len();

    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| {
        let pos = e.pos();
        MusicXmlError::Malformed {
            offset: bom + byte_offset(text, pos.row, pos.col),
            message: e.to_string(),
        }
    })?;

    let root = doc.root_element();
    match root.tag_name().name() {
        "score-partwise" => {}
        "score-timewise" => {
            return Err(MusicXmlError::UnsupportedFormat(
                "timewise scores are not supported; convert to partwise".into(),
            ))
        }
        other => {
            return Err(MusicXmlError::UnsupportedFormat(format!(
                "root element <{other}> is not score-partwise"
            )))
        }
    }

    let mut diag = ParseDiagnostics::default();
    match root.attribute("version") {
        Some(v) if v.starts_with("3.") || v == "3" => {}
        Some(v) => diag.warn(
            "score-partwise",
            format!("MusicXML version {v}, expected 3.x"),
        ),
        None => diag.warn("score-partwise", "no version attribute, assuming 3.x"),
    }

    let mut title = None;
    let mut movement_title = None;
    let mut part_info: HashMap<String, (String, String)> = HashMap::new();
    let mut part_nodes = Vec::new();
    for child in elements(root) {
        match child.tag_name().name() {
            "work" => {
                for w in elements(child) {
                    if w.has_tag_name("work-title") {
                        title = Some(text_of(w));
                    } else {
                        diag.skip(w.tag_name().name());
                    }
                }
            }
            "movement-title" => movement_title = Some(text_of(child)),
            "part-list" => read_part_list(child, &mut part_info, &mut diag),
            "part" => part_nodes.push(child),
            other => diag.skip(other),
        }
    }

    let mut parts = Vec::with_capacity(part_nodes.len());
    let mut divisions_hint = None;
    for node in part_nodes {
        let id = node
            .attribute("id")
            .ok_or_else(|| MusicXmlError::Invalid("<part> without id".into()))?
            .to_string();
        let (name, instrument) = part_info.remove(&id).ok_or_else(|| {
            MusicXmlError::Invalid(format!("part {id} is not declared in <part-list>"))
        })?;
        let (measures, divisions) = read_part(node, &id, &mut diag)?;
        divisions_hint.get_or_insert(divisions);
        parts.push(Part {
            id,
            name,
            instrument,
            measures,
        });
    }
    if parts.is_empty() {
        return Err(MusicXmlError::Invalid("score has no parts".into()));
    }
    for id in part_info.keys() {
        diag.warn(
            format!("part-list {id}"),
            "declared part has no <part> content",
        );
    }

    let score = Score {
        title: title.or(movement_title),
        parts,
        divisions_hint: divisions_hint.unwrap_or(1),
    };
    score
        .validate()
        .map_err(|e| MusicXmlError::Invalid(e.to_string()))?;
    Ok((score, diag))
}

fn read_part_list(
    node: Node,
    info: &mut HashMap<String, (String, String)>,
    diag: &mut ParseDiagnostics,
) {
    for sp in elements(node) {
        if !sp.has_tag_name("score-part") {
            diag.skip(sp.tag_name().name());
            continue;
        }
        let Some(id) = sp.attribute("id") else {
            diag.warn("part-list", "score-part without id ignored");
            diag.skip("score-part");
            continue;
        };
        let mut name = String::new();
        let mut instrument = String::new();
        for c in elements(sp) {
            match c.tag_name().name() {
                "part-name" => name = text_of(c),
                "score-instrument" if instrument.is_empty() => {
                    for ic in elements(c) {
                        if ic.has_tag_name("instrument-name") {
                            instrument = text_of(ic);
                        } else {
                            diag.skip(ic.tag_name().name());
                        }
                    }
                }
                other => diag.skip(other),
            }
        }
        info.insert(id.to_string(), (name, instrument));
    }
}

struct PartState {
    divisions: i64,
    time: Option<TimeSignature>,
    first_divisions: Option<i64>,
}

fn read_part(
    node: Node,
    part_id: &str,
    diag: &mut ParseDiagnostics,
) -> Result<(Vec<Measure>, u32), MusicXmlError> {
    let mut state = PartState {
        divisions: 1,
        time: None,
        first_divisions: None,
    };
    let mut measures = Vec::new();
    for m in elements(node) {
        if !m.has_tag_name("measure") {
            diag.skip(m.tag_name().name());
            continue;
        }
        let index = measures.len();
        measures.push(read_measure(m, index, part_id, &mut state, diag)?);
    }
    let divisions = state.first_divisions.unwrap_or(1).clamp(1, u32::MAX as i64) as u32;
    Ok((measures, divisions))
}

fn read_measure(
    node: Node,
    index: usize,
    part_id: &str,
    state: &mut PartState,
    diag: &mut ParseDiagnostics,
) -> Result<Measure, MusicXmlError> {
    let loc = format!("part {part_id}, measure {index}");
    let invalid = |message: String| MusicXmlError::Validation {
        part: part_id.to_string(),
        measure: index,
        message,
    };

    let mut key = None;
    let mut clef = None;
    let mut events: Vec<NoteEvent> = Vec::new();
    let mut other_voice = false;

    for el in elements(node) {
        match el.tag_name().name() {
            "attributes" if !other_voice => {
                for a in elements(el) {
                    match a.tag_name().name() {
                        "divisions" => {
                            let d = parse_int(a).filter(|d| *d > 0).ok_or_else(|| {
                                invalid("divisions must be a positive integer".into())
                            })?;
                            state.divisions = d;
                            state.first_divisions.get_or_insert(d);
                        }
                        "time" => match read_time(a) {
                            Some(ts) => state.time = Some(ts),
                            None => {
                                diag.warn(&loc, "unreadable time signature ignored");
                                diag.skip("time");
                            }
                        },
                        "key" if a.attribute("number").is_none_or(|n| n == "1") => {
                            match read_key(a) {
                                Some(k) => key = Some(k),
                                None => diag.skip("key"),
                            }
                        }
                        "clef" if a.attribute("number").is_none_or(|n| n == "1") => {
                            match read_clef(a) {
                                Some(c) => clef = Some(c),
                                None => diag.skip("clef"),
                            }
                        }
                        other => diag.skip(other),
                    }
                }
            }
            "note" if !other_voice => {
                read_note(el, &loc, state, &mut events, diag).map_err(invalid)?;
            }
            "forward" if !other_voice => {
                let dur = el
                    .children()
                    .find(|c| c.has_tag_name("duration"))
                    .and_then(parse_int)
                    .ok_or_else(|| invalid("<forward> without duration".into()))?;
                events.push(NoteEvent::rest(
                    to_duration(dur, state.divisions).map_err(invalid)?,
                ));
                diag.warn(&loc, "<forward> read as a rest");
            }
            "backup" => {
                if !other_voice {
                    diag.warn(&loc, "additional voices dropped");
                }
                other_voice = true;
                diag.skip("backup");
            }
            other => diag.skip(other),
        }
    }

    let time = match state.time {
        Some(t) => t,
        None => {
            diag.warn(&loc, "no time signature declared, assuming 4/4");
            state.time = Some(TimeSignature::default());
            TimeSignature::default()
        }
    };
    let capacity = time.capacity();
    let content: Duration = events.iter().map(|e| e.duration).sum();
    if content > capacity {
        return Err(invalid(format!(
            "events sum to {content} whole notes but {time} holds {capacity}"
        )));
    }
    if let Some(gap) = capacity.checked_sub(content) {
        if !events.is_empty() {
            diag.warn(&loc, format!("incomplete measure padded with a {gap} rest"));
        }
        events.push(NoteEvent::rest(gap));
    }

    Ok(Measure {
        index,
        time,
        events,
        key,
        clef,
    })
}

fn read_note(
    node: Node,
    loc: &str,
    state: &PartState,
    events: &mut Vec<NoteEvent>,
    diag: &mut ParseDiagnostics,
) -> Result<(), String> {
    if node
        .children()
        .any(|c| c.has_tag_name("grace") || c.has_tag_name("cue"))
    {
        diag.warn(loc, "grace or cue note dropped");
        diag.skip("note");
        return Ok(());
    }

    let mut pitch = None;
    let mut is_rest = false;
    let mut chord = false;
    let mut duration = None;
    let mut tie = Tie::default();
    for c in elements(node) {
        match c.tag_name().name() {
            "pitch" => pitch = Some(read_pitch(c).ok_or_else(|| "unreadable pitch".to_string())?),
            "rest" => is_rest = true,
            "unpitched" => {
                diag.warn(loc, "unpitched note read as a rest");
                diag.skip("unpitched");
                is_rest = true;
            }
            "chord" => chord = true,
            "duration" => duration = parse_int(c),
            "tie" => match c.attribute("type") {
                Some("start") => tie.start = true,
                Some("stop") => tie.stop = true,
                _ => {}
            },
            "notations" => {
                for n in elements(c) {
                    match n.tag_name().name() {
                        "tied" => match n.attribute("type") {
                            Some("start") => tie.start = true,
                            Some("stop") => tie.stop = true,
                            _ => diag.skip("tied"),
                        },
                        other => diag.skip(other),
                    }
                }
            }
            // Re-derived from duration and voice layout on write.
            "type" | "dot" | "voice" | "staff" => {}
            other => diag.skip(other),
        }
    }
    let dur = duration.ok_or_else(|| "note without duration".to_string())?;
    let dur = to_duration(dur, state.divisions)?;

    if chord {
        if let (Some(p), Some(prev)) = (pitch, events.last_mut()) {
            if !prev.is_rest() {
                let mut pitches = prev.pitches().to_vec();
                pitches.push(p);
                let mut merged = NoteEvent::from_pitches(pitches, prev.duration);
                merged.tie = Tie {
                    start: prev.tie.start && tie.start,
                    stop: prev.tie.stop && tie.stop,
                };
                *prev = merged;
                return Ok(());
            }
        }
        diag.warn(loc, "chord tone without a preceding note read as a note");
    }

    let mut ev = match (pitch, is_rest) {
        (Some(p), false) => NoteEvent::note(p, dur),
        _ => NoteEvent::rest(dur),
    };
    if !ev.is_rest() {
        ev.tie = tie;
    }
    events.push(ev);
    Ok(())
}

fn read_pitch(node: Node) -> Option<Pitch> {
    let mut step = None;
    let mut alter = 0i8;
    let mut octave = None;
    for c in elements(node) {
        match c.tag_name().name() {
            "step" => step = text_of(c).trim().chars().next().and_then(Step::from_letter),
            "alter" => {
                let a: f64 = text_of(c).trim().parse().ok()?;
                // Microtones are not modelled; round to the nearest semitone.
                alter = a.round() as i8;
            }
            "octave" => octave = parse_int(c),
            _ => {}
        }
    }
    Pitch::new(step?, alter, i8::try_from(octave?).ok()?).ok()
}

fn read_time(node: Node) -> Option<TimeSignature> {
    let beats_text = node
        .children()
        .find(|c| c.has_tag_name("beats"))
        .map(text_of)?;
    let beat_type: u32 = node
        .children()
        .find(|c| c.has_tag_name("beat-type"))
        .map(text_of)?
        .trim()
        .parse()
        .ok()?;
    // Additive meters such as 3+2 are summed.
    let beats = beats_text
        .split('+')
        .map(|b| b.trim().parse::<u32>().ok())
        .sum::<Option<u32>>()?;
    TimeSignature::new(beats, beat_type).ok()
}

fn read_key(node: Node) -> Option<KeySignature> {
    let fifths = node
        .children()
        .find(|c| c.has_tag_name("fifths"))
        .and_then(parse_int)?;
    let mode = node
        .children()
        .find(|c| c.has_tag_name("mode"))
        .map(text_of);
    Some(KeySignature {
        fifths: i8::try_from(fifths).ok()?,
        mode,
    })
}

fn read_clef(node: Node) -> Option<Clef> {
    let sign = node
        .children()
        .find(|c| c.has_tag_name("sign"))
        .map(text_of)?;
    let line = node
        .children()
        .find(|c| c.has_tag_name("line"))
        .and_then(parse_int)
        .and_then(|l| i8::try_from(l).ok());
    let octave_change = node
        .children()
        .find(|c| c.has_tag_name("clef-octave-change"))
        .and_then(parse_int)
        .and_then(|l| i8::try_from(l).ok());
    Some(Clef {
        sign: sign.trim().to_string(),
        line,
        octave_change,
    })
}

fn to_duration(divs: i64, divisions: i64) -> Result<Duration, String> {
    Duration::new(divs, divisions * 4).map_err(|e| e.to_string())
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(Node::is_element)
}

fn text_of(node: Node) -> String {
    node.text().unwrap_or("").to_string()
}

fn parse_int(node: Node) -> Option<i64> {
    node.text()?.trim().parse().ok()
}

/// Converts a 1-based row/column (in characters) to a byte offset.
fn byte_offset(text: &str, row: u32, col: u32) -> usize {
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if i + 1 == row as usize {
            let chars = line
                .char_indices()
                .nth(col.saturating_sub(1) as usize)
                .map_or(line.len(), |(b, _)| b);
            return offset + chars;
        }
        offset += line.len();
    }
    text.len()
}
