mod common;

use chunkcat::corpus::{split_samples, SplitUnit, Tokenizer};

fn check(input: &str, tokenizer: Tokenizer, unit: &str, golden: &str) {
    let dir = common::fixtures().join("tokenizers");
    let text = std::fs::read_to_string(dir.join(input)).unwrap();
    let want = std::fs::read_to_string(dir.join(golden)).unwrap();
    let unit: SplitUnit = unit.parse().unwrap();
    let stream = tokenizer.tokenize(&text, false).unwrap();
    let got: String = split_samples(&stream, unit)
        .iter()
        .map(|s| s.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(" ") + "\n")
        .collect();
    assert_eq!(got, want, "{input}");
    // same bytes, same tokens
    assert_eq!(tokenizer.tokenize(&text, false).unwrap(), stream);
    let joined: Vec<_> = split_samples(&stream, unit).concat();
    assert_eq!(joined, stream.tokens);
}

#[test]
fn words_golden() {
    check("words.txt", Tokenizer::Words, "n_words:5", "words.n_words_5.golden");
}

#[test]
fn music_golden() {
    check("music.txt", Tokenizer::MusicFrames, "n_measures:2", "music.n_measures_2.golden");
}

#[test]
fn chess_golden() {
    check("chess.txt", Tokenizer::ChessRows, "n_rows:8", "chess.n_rows_8.golden");
}
