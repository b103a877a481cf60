//! Sentence splitting and word tokenization shared by every phase.

use serde::{Deserialize, Serialize};

/// A word token with its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

pub type Sentence = Vec<Token>;

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Splits `text` into sentences of word tokens.
///
/// Tokens are maximal runs of letters and digits; a hyphen or apostrophe is
/// kept when it sits between two word characters. A sentence ends at `.`,
/// `?` or `!` followed by whitespace and an uppercase letter, and at blank
/// lines. Empty sentences are never emitted.
pub fn tokenize(text: &str) -> Vec<Sentence> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut current: Sentence = Vec::new();
    let mut i = 0;

    let flush = |current: &mut Sentence, sentences: &mut Vec<Sentence>| {
        if !current.is_empty() {
            sentences.push(std::mem::take(current));
        }
    };

    while i < chars.len() {
        let (pos, c) = chars[i];
        if is_word_char(c) {
            let start = pos;
            let mut j = i + 1;
            while j < chars.len() {
                let cj = chars[j].1;
                if is_word_char(cj) {
                    j += 1;
                } else if is_joiner(cj) && j + 1 < chars.len() && is_word_char(chars[j + 1].1) {
                    j += 2;
                } else {
                    break;
                }
            }
            let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
            current.push(Token {
                text: text[start..end].to_string(),
                start,
                end,
            });
            i = j;
            continue;
        }

        match c {
            '.' | '?' | '!' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_whitespace() {
                    j += 1;
                }
                if j > i + 1 && j < chars.len() && chars[j].1.is_uppercase() {
                    flush(&mut current, &mut sentences);
                }
            }
            '\n' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_whitespace() && chars[j].1 != '\n' {
                    j += 1;
                }
                if j < chars.len() && chars[j].1 == '\n' {
                    flush(&mut current, &mut sentences);
                }
            }
            _ => {}
        }
        i += 1;
    }
    flush(&mut current, &mut sentences);
    sentences
}

/// Tokenizes and lowercases, dropping spans.
pub fn tokenize_lower(text: &str) -> Vec<Vec<String>> {
    tokenize(text)
        .into_iter()
        .map(|s| s.iter().map(Token::lower).collect())
        .collect()
}

/// Reduces a plural English noun to its singular by suffix rules.
///
/// | suffix            | rule          | example              |
/// |-------------------|---------------|----------------------|
/// | `ss`, `us`, `is`  | unchanged     | process, analysis    |
/// | `ies`             | `-ies` → `-y` | properties → property|
/// | `sses`            | `-es` dropped | processes → process  |
/// | `xes` `ches` `shes` `zes` | `-es` dropped | boxes → box |
/// | `s`               | dropped       | chemicals → chemical |
///
/// Words of three letters or fewer are returned unchanged.
pub fn singularize(word: &str) -> String {
    let lower = word.to_lowercase();
    if lower.chars().count() <= 3 || !lower.ends_with('s') {
        return lower;
    }
    if lower.ends_with("ss") || lower.ends_with("us") || lower.ends_with("is") {
        return lower;
    }
    if let Some(stem) = lower.strip_suffix("ies") {
        return format!("{stem}y");
    }
    for suffix in ["sses", "xes", "ches", "shes", "zes"] {
        if lower.ends_with(suffix) {
            return lower[..lower.len() - 2].to_string();
        }
    }
    lower[..lower.len() - 1].to_string()
}
