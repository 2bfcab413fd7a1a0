//! Plain-text music frames.
//!
//! Grammar (whitespace separates tokens, newlines are insignificant):
//!
//! ```text
//! stream  := token*
//! token   := bar | frame
//! bar     := "|"
//! frame   := note+                      notes in strictly ascending pitch
//! note    := letter accidental? octave
//! letter  := "A" .. "G"
//! accidental := "#" | "b"
//! octave  := digit
//! ```
//!
//! `A3 C4 E4` is three single-note frames; `A3C4E4` is one chord. A bar closes
//! the current measure; the end of input closes a final non-empty measure.
//!
//! Note events in JSON can be converted to frame text with
//! [`frames_from_events`]:
//!
//! ```json
//! { "ticks_per_measure": 4,
//!   "events": [ { "tick": 0, "pitch": "C4" }, { "tick": 0, "pitch": "E4" },
//!               { "tick": 1, "pitch": "G4" } ] }
//! ```
//!
//! Events sharing a tick form one frame; a bar is written whenever a
//! measure boundary is crossed, including empty measures.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::tokenize::TokenStream;
use super::CorpusError;
use crate::pattern::Primitive;

/// MIDI-style pitch number of a single note, C4 = 60.
fn parse_note(s: &[u8]) -> Option<(i32, usize)> {
    let semitone = match s.first()? {
        b'C' => 0,
        b'D' => 2,
        b'E' => 4,
        b'F' => 5,
        b'G' => 7,
        b'A' => 9,
        b'B' => 11,
        _ => return None,
    };
    let mut i = 1;
    let mut pitch = semitone;
    match s.get(i) {
        Some(b'#') => {
            pitch += 1;
            i += 1;
        }
        Some(b'b') => {
            pitch -= 1;
            i += 1;
        }
        _ => {}
    }
    let octave = s.get(i).filter(|c| c.is_ascii_digit())?;
    Some(((i32::from(octave - b'0') + 1) * 12 + pitch, i + 1))
}

/// Pitches of a frame token, or a message describing the first problem.
pub fn parse_frame(token: &str) -> Result<Vec<i32>, String> {
    let bytes = token.as_bytes();
    let mut pitches = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (p, used) = parse_note(&bytes[i..]).ok_or_else(|| format!("malformed note at offset {i} in {token:?}"))?;
        if let Some(&prev) = pitches.last() {
            if p <= prev {
                return Err(format!("notes in {token:?} are not in ascending pitch order"));
            }
        }
        pitches.push(p);
        i += used;
    }
    if pitches.is_empty() {
        return Err("empty frame".into());
    }
    Ok(pitches)
}

pub fn tokenize_music_frames(text: &str) -> Result<TokenStream, CorpusError> {
    let mut out = TokenStream::default();
    let mut measure_start = 0;
    for (ln, line) in text.lines().enumerate() {
        let line_start = out.tokens.len();
        let mut col = 0;
        for piece in line.split_inclusive(char::is_whitespace) {
            let token = piece.trim_end();
            let here = col + 1;
            col += piece.chars().count();
            if token.is_empty() {
                continue;
            }
            if token == "|" {
                out.measure_ends.push(out.tokens.len());
                measure_start = out.tokens.len();
                continue;
            }
            parse_frame(token).map_err(|msg| CorpusError::syntax(ln + 1, here, msg))?;
            out.tokens.push(Primitive::new(token).expect("frames contain no whitespace"));
        }
        if out.tokens.len() > line_start {
            out.line_ends.push(out.tokens.len());
        }
    }
    if out.tokens.len() > measure_start {
        out.measure_ends.push(out.tokens.len());
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
pub struct NoteEvent {
    pub tick: u64,
    pub pitch: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NoteEvents {
    pub ticks_per_measure: u64,
    pub events: Vec<NoteEvent>,
}

/// Converts JSON note events into frame text, one measure per line.
pub fn frames_from_events(json: &str) -> Result<String, CorpusError> {
    let doc: NoteEvents = serde_json::from_str(json).map_err(|e| CorpusError::Manifest(format!("note events: {e}")))?;
    if doc.ticks_per_measure == 0 {
        return Err(CorpusError::Manifest("ticks_per_measure must be positive".into()));
    }
    let mut frames: BTreeMap<u64, Vec<(i32, String)>> = BTreeMap::new();
    for ev in &doc.events {
        let pitch = match parse_note(ev.pitch.as_bytes()) {
            Some((p, used)) if used == ev.pitch.len() => p,
            _ => return Err(CorpusError::Manifest(format!("bad pitch {:?} at tick {}", ev.pitch, ev.tick))),
        };
        let notes = frames.entry(ev.tick).or_default();
        if !notes.iter().any(|(q, _)| *q == pitch) {
            notes.push((pitch, ev.pitch.clone()));
        }
    }
    let mut out = String::new();
    let mut measure = 0;
    let mut line = Vec::new();
    for (tick, mut notes) in frames {
        while tick / doc.ticks_per_measure > measure {
            line.push("|".to_string());
            out.push_str(&line.join(" "));
            out.push('\n');
            line.clear();
            measure += 1;
        }
        notes.sort();
        line.push(notes.into_iter().map(|(_, n)| n).collect());
    }
    if !line.is_empty() {
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(ts: &TokenStream) -> Vec<&str> {
        ts.tokens.iter().map(Primitive::as_str).collect()
    }

    #[test]
    fn single_notes_and_chords() {
        let ts = tokenize_music_frames("A3 | C4 | E4").unwrap();
        assert_eq!(strs(&ts), ["A3", "C4", "E4"]);
        assert_eq!(ts.measure_ends, [1, 2, 3]);
        let ts = tokenize_music_frames("A3C4E4").unwrap();
        assert_eq!(strs(&ts), ["A3C4E4"]);
        assert_eq!(ts.measure_ends, [1]);
    }

    #[test]
    fn empty_measure_counts() {
        let ts = tokenize_music_frames("|").unwrap();
        assert!(ts.tokens.is_empty());
        assert_eq!(ts.measure_ends.len(), 1);
        let ts = tokenize_music_frames("C4 | | D4").unwrap();
        assert_eq!(ts.measure_ends, [1, 1, 2]);
    }

    #[test]
    fn errors_carry_position() {
        let err = tokenize_music_frames("C4 D4\nE4 H4").unwrap_err();
        assert_eq!(err.to_string(), "line 2, column 4: malformed note at offset 0 in \"H4\"");
        let err = tokenize_music_frames("E4C4").unwrap_err();
        assert!(err.to_string().contains("ascending"), "{err}");
        assert!(tokenize_music_frames("C#4Eb4").is_ok());
        assert!(tokenize_music_frames("C").is_err());
    }

    #[test]
    fn pitch_numbers() {
        assert_eq!(parse_frame("C4").unwrap(), [60]);
        assert_eq!(parse_frame("A3C4E4").unwrap(), [57, 60, 64]);
        assert!(parse_frame("C4C4").is_err());
    }

    #[test]
    fn events_to_frames() {
        let json = r#"{"ticks_per_measure": 2, "events": [
            {"tick": 1, "pitch": "E4"}, {"tick": 0, "pitch": "C4"}, {"tick": 1, "pitch": "C4"},
            {"tick": 6, "pitch": "G4"}]}"#;
        let text = frames_from_events(json).unwrap();
        assert_eq!(text, "C4 C4E4 |\n|\n|\nG4\n");
        let ts = tokenize_music_frames(&text).unwrap();
        assert_eq!(strs(&ts), ["C4", "C4E4", "G4"]);
        assert_eq!(ts.measure_ends, [2, 2, 2, 3]);
        assert!(frames_from_events(r#"{"ticks_per_measure": 2, "events": [{"tick": 0, "pitch": "X9"}]}"#).is_err());
    }
}
