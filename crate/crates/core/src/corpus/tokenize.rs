//! Tokenizers for text, characters, binary features and chess rows.
//!
//! Every tokenizer returns a [`TokenStream`]: the primitives plus the token
//! indices at which lines (and, for music, measures) end, so the stream can
//! later be split into samples without re-reading the source.

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::pattern::Primitive;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Primitive>,
    /// Exclusive end index of every non-empty line.
    pub line_ends: Vec<usize>,
    /// Exclusive end index of every measure (music only).
    pub measure_ends: Vec<usize>,
}

impl TokenStream {
    fn push_line(&mut self, start: usize) {
        if self.tokens.len() > start {
            self.line_ends.push(self.tokens.len());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tokenizer {
    Words,
    Chars,
    LogicBits,
    MusicFrames,
    ChessRows,
}

impl Tokenizer {
    pub fn tokenize(self, text: &str, lowercase: bool) -> Result<TokenStream, CorpusError> {
        match self {
            Tokenizer::Words => Ok(tokenize_words(text, lowercase)),
            Tokenizer::Chars => Ok(tokenize_chars(text, lowercase)),
            Tokenizer::LogicBits => tokenize_logic_bits(text),
            Tokenizer::MusicFrames => super::music::tokenize_music_frames(text),
            Tokenizer::ChessRows => tokenize_chess_rows(text),
        }
    }
}

fn prim(token: &str) -> Primitive {
    Primitive::new(token).expect("tokenizers only emit non-empty, whitespace-free tokens")
}

/// Whitespace-delimited words; punctuation stays attached.
pub fn tokenize_words(text: &str, lowercase: bool) -> TokenStream {
    let mut out = TokenStream::default();
    for line in text.lines() {
        let start = out.tokens.len();
        for w in line.split_whitespace() {
            if lowercase {
                out.tokens.push(prim(&w.to_lowercase()));
            } else {
                out.tokens.push(prim(w));
            }
        }
        out.push_line(start);
    }
    out
}

/// One primitive per non-whitespace character.
pub fn tokenize_chars(text: &str, lowercase: bool) -> TokenStream {
    let mut out = TokenStream::default();
    let mut buf = [0u8; 4];
    for line in text.lines() {
        let start = out.tokens.len();
        for c in line.chars().filter(|c| !c.is_whitespace()) {
            if lowercase {
                for l in c.to_lowercase() {
                    out.tokens.push(prim(l.encode_utf8(&mut buf)));
                }
            } else {
                out.tokens.push(prim(c.encode_utf8(&mut buf)));
            }
        }
        out.push_line(start);
    }
    out
}

/// Binary feature vectors such as `1 0 1 1` or `1011`.
pub fn tokenize_logic_bits(text: &str) -> Result<TokenStream, CorpusError> {
    let mut out = TokenStream::default();
    for (ln, line) in text.lines().enumerate() {
        let start = out.tokens.len();
        for (col, c) in line.chars().enumerate() {
            match c {
                '0' => out.tokens.push(prim("0")),
                '1' => out.tokens.push(prim("1")),
                c if c.is_whitespace() => {}
                c => {
                    return Err(CorpusError::syntax(ln + 1, col + 1, format!("expected 0 or 1, found {c:?}")));
                }
            }
        }
        out.push_line(start);
    }
    Ok(out)
}

pub const CHESS_PIECES: &str = "KQRBNPkqrbnp";

/// Boards as 8 lines of 8 symbols each, rank 8 first. White pieces are
/// upper case, black lower case, `.` an empty square. Blank lines separate
/// positions. Each row is one primitive.
pub fn tokenize_chess_rows(text: &str) -> Result<TokenStream, CorpusError> {
    let mut out = TokenStream::default();
    let mut rows_in_position = 0;
    let mut position_start = 1;
    let mut last = 0;
    for (ln, line) in text.lines().enumerate() {
        let row = line.trim_end();
        if row.is_empty() {
            if rows_in_position != 0 && rows_in_position != 8 {
                return Err(CorpusError::syntax(
                    position_start,
                    1,
                    format!("position has {rows_in_position} rows, expected 8"),
                ));
            }
            rows_in_position = 0;
            continue;
        }
        if rows_in_position == 0 {
            position_start = ln + 1;
        }
        if rows_in_position == 8 {
            return Err(CorpusError::syntax(ln + 1, 1, "more than 8 rows without a blank line".into()));
        }
        let n = row.chars().count();
        if n != 8 {
            return Err(CorpusError::syntax(ln + 1, 1, format!("row has {n} symbols, expected 8")));
        }
        if let Some((col, c)) = row.chars().enumerate().find(|(_, c)| *c != '.' && !CHESS_PIECES.contains(*c)) {
            return Err(CorpusError::syntax(ln + 1, col + 1, format!("unknown chess symbol {c:?}")));
        }
        out.tokens.push(prim(row));
        out.line_ends.push(out.tokens.len());
        rows_in_position += 1;
        last = ln + 1;
    }
    if rows_in_position != 0 && rows_in_position != 8 {
        return Err(CorpusError::syntax(last, 1, format!("position has {rows_in_position} rows, expected 8")));
    }
    Ok(out)
}
