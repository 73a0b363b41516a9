use std::fmt::Write as _;

use num_integer::Integer;

use super::MusicXmlError;
use crate::score::{Duration, Measure, NoteEvent, Part, Score, TimeSignature, MAX_DENOMINATOR};

const DOCTYPE: &str = r#"<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 3.1 Partwise//EN" "http://www.musicxml.org/dtds/partwise.dtd">"#;

/// Serializes a score. Identical scores produce identical bytes.
pub fn write_score(score: &Score) -> Result<Vec<u8>, MusicXmlError> {
    score
        .validate()
        .map_err(|e| MusicXmlError::Invalid(e.to_string()))?;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    out.push_str(DOCTYPE);
    out.push('\n');
    out.push_str("<score-partwise version=\"3.1\">\n");
    if let Some(title) = &score.title {
        let _ = writeln!(
            out,
            "  <work>\n    <work-title>{}</work-title>\n  </work>",
            escape(title)
        );
    }
    out.push_str("  <part-list>\n");
    for part in &score.parts {
        let _ = writeln!(out, "    <score-part id=\"{}\">", escape(&part.id));
        let _ = writeln!(out, "      <part-name>{}</part-name>", escape(&part.name));
        if !part.instrument.is_empty() {
            let _ = writeln!(
                out,
                "      <score-instrument id=\"{}-I1\">",
                escape(&part.id)
            );
            let _ = writeln!(
                out,
                "        <instrument-name>{}</instrument-name>",
                escape(&part.instrument)
            );
            out.push_str("      </score-instrument>\n");
        }
        out.push_str("    </score-part>\n");
    }
    out.push_str("  </part-list>\n");
    for part in &score.parts {
        write_part(&mut out, part, score.divisions_hint)?;
    }
    out.push_str("</score-partwise>\n");
    Ok(out.into_bytes())
}

/// Smallest divisions-per-quarter that expresses every duration in the part
/// as an integer, merged with the source hint when that stays in bounds.
pub(crate) fn divisions_for(part: &Part, hint: u32) -> Result<i64, MusicXmlError> {
    let mut divisions: i64 = 1;
    for ev in part.measures.iter().flat_map(|m| &m.events) {
        // duration in quarters = 4n/d; need divisions * 4n/d integral.
        let (n, d) = (ev.duration.numer(), ev.duration.denom());
        let need = d / (4 * n).gcd(&d);
        divisions = divisions.lcm(&need);
        if divisions > MAX_DENOMINATOR {
            return Err(MusicXmlError::DivisionsOverflow {
                part: part.id.clone(),
                divisions,
                limit: MAX_DENOMINATOR,
            });
        }
    }
    let merged = divisions.lcm(&(hint.max(1) as i64));
    Ok(if merged <= MAX_DENOMINATOR {
        merged
    } else {
        divisions
    })
}

fn write_part(out: &mut String, part: &Part, hint: u32) -> Result<(), MusicXmlError> {
    let divisions = divisions_for(part, hint)?;
    let _ = writeln!(out, "  <part id=\"{}\">", escape(&part.id));
    let mut prev_time: Option<TimeSignature> = None;
    for m in &part.measures {
        let _ = writeln!(out, "    <measure number=\"{}\">", m.index + 1);
        write_attributes(out, m, prev_time, divisions);
        prev_time = Some(m.time);
        for ev in &m.events {
            write_event(out, ev, divisions);
        }
        out.push_str("    </measure>\n");
    }
    out.push_str("  </part>\n");
    Ok(())
}

fn write_attributes(
    out: &mut String,
    m: &Measure,
    prev_time: Option<TimeSignature>,
    divisions: i64,
) {
    let first = prev_time.is_none();
    let time_changed = prev_time != Some(m.time);
    if !first && !time_changed && m.key.is_none() && m.clef.is_none() {
        return;
    }
    out.push_str("      <attributes>\n");
    if first {
        let _ = writeln!(out, "        <divisions>{divisions}</divisions>");
    }
    if let Some(key) = &m.key {
        out.push_str("        <key>\n");
        let _ = writeln!(out, "          <fifths>{}</fifths>", key.fifths);
        if let Some(mode) = &key.mode {
            let _ = writeln!(out, "          <mode>{}</mode>", escape(mode));
        }
        out.push_str("        </key>\n");
    }
    if time_changed {
        let _ = writeln!(
            out,
            "        <time>\n          <beats>{}</beats>\n          <beat-type>{}</beat-type>\n        </time>",
            m.time.beats, m.time.beat_type
        );
    }
    if let Some(clef) = &m.clef {
        out.push_str("        <clef>\n");
        let _ = writeln!(out, "          <sign>{}</sign>", escape(&clef.sign));
        if let Some(line) = clef.line {
            let _ = writeln!(out, "          <line>{line}</line>");
        }
        if let Some(oc) = clef.octave_change {
            let _ = writeln!(
                out,
                "          <clef-octave-change>{oc}</clef-octave-change>"
            );
        }
        out.push_str("        </clef>\n");
    }
    out.push_str("      </attributes>\n");
}

fn write_event(out: &mut String, ev: &NoteEvent, divisions: i64) {
    let ticks = ev.duration.numer() * 4 * divisions / ev.duration.denom();
    let notated = note_type(ev.duration);
    if ev.is_rest() {
        out.push_str("      <note>\n        <rest/>\n");
        let _ = writeln!(out, "        <duration>{ticks}</duration>");
        out.push_str("        <voice>1</voice>\n");
        write_type(out, notated);
        out.push_str("      </note>\n");
        return;
    }
    for (i, p) in ev.pitches().iter().enumerate() {
        out.push_str("      <note>\n");
        if i > 0 {
            out.push_str("        <chord/>\n");
        }
        let _ = writeln!(out, "        <pitch>\n          <step>{}</step>", p.step());
        if p.alter() != 0 {
            let _ = writeln!(out, "          <alter>{}</alter>", p.alter());
        }
        let _ = writeln!(
            out,
            "          <octave>{}</octave>\n        </pitch>",
            p.octave()
        );
        let _ = writeln!(out, "        <duration>{ticks}</duration>");
        if ev.tie.stop {
            out.push_str("        <tie type=\"stop\"/>\n");
        }
        if ev.tie.start {
            out.push_str("        <tie type=\"start\"/>\n");
        }
        out.push_str("        <voice>1</voice>\n");
        write_type(out, notated);
        if ev.tie.start || ev.tie.stop {
            out.push_str("        <notations>\n");
            if ev.tie.stop {
                out.push_str("          <tied type=\"stop\"/>\n");
            }
            if ev.tie.start {
                out.push_str("          <tied type=\"start\"/>\n");
            }
            out.push_str("        </notations>\n");
        }
        out.push_str("      </note>\n");
    }
}

fn write_type(out: &mut String, notated: Option<(&str, usize)>) {
    if let Some((name, dots)) = notated {
        let _ = writeln!(out, "        <type>{name}</type>");
        for _ in 0..dots {
            out.push_str("        <dot/>\n");
        }
    }
}

/// Note type name and dot count for a duration, if it is a plain or
/// dotted power-of-two value.
fn note_type(d: Duration) -> Option<(&'static str, usize)> {
    const NAMES: [(i64, i64, &str); 13] = [
        (4, 1, "long"),
        (2, 1, "breve"),
        (1, 1, "whole"),
        (1, 2, "half"),
        (1, 4, "quarter"),
        (1, 8, "eighth"),
        (1, 16, "16th"),
        (1, 32, "32nd"),
        (1, 64, "64th"),
        (1, 128, "128th"),
        (1, 256, "256th"),
        (1, 512, "512th"),
        (1, 1024, "1024th"),
    ];
    let r = d.as_ratio();
    for (n, den, name) in NAMES {
        let base = num_rational::Rational64::new(n, den);
        let mut total = base;
        let mut add = base;
        for dots in 0..=3 {
            if total == r {
                return Some((name, dots));
            }
            add /= 2;
            total += add;
        }
    }
    None
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
