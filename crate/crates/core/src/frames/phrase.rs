use serde::{Deserialize, Serialize};

use super::conllu::{ParseToken, ParsedSentence};
use crate::corpus::{singularize, tokenize};

const LEADING_DETERMINERS: [&str; 3] = ["the", "a", "an"];

/// A contiguous noun phrase inside one parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounPhrase {
    /// 1-based index of the first token.
    pub start: usize,
    /// 1-based index of the last token, inclusive.
    pub end: usize,
    pub head_index: usize,
    pub tokens: Vec<ParseToken>,
    pub normalized: String,
}

impl NounPhrase {
    /// Builds the phrase covering `start..=end`, picking as head the token
    /// whose governor lies outside the span (the last such noun when the
    /// span has several).
    pub fn from_span(sentence: &ParsedSentence, start: usize, end: usize) -> NounPhrase {
        let tokens: Vec<ParseToken> = sentence.tokens[start - 1..end].to_vec();
        let inside = |i: usize| i >= start && i <= end;
        let head_index = tokens
            .iter()
            .rev()
            .find(|t| t.is_noun() && !inside(t.head))
            .or_else(|| tokens.iter().rev().find(|t| t.is_noun()))
            .map_or(end, |t| t.index);
        let mut np = NounPhrase {
            start,
            end,
            head_index,
            tokens,
            normalized: String::new(),
        };
        np.normalized = normalize_phrase(&np);
        np
    }

    pub fn head(&self) -> &ParseToken {
        &self.tokens[self.head_index - self.start]
    }

    pub fn contains(&self, index: usize) -> bool {
        index >= self.start && index <= self.end
    }

    pub fn surface(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Lowercased words of the normalized form.
    pub fn words(&self) -> Vec<String> {
        self.normalized.split(' ').map(str::to_string).collect()
    }
}

/// Lowercases, singularizes the head noun, strips leading `the`/`a`/`an`
/// and collapses whitespace. Non-head plurals are kept.
pub fn normalize_phrase(np: &NounPhrase) -> String {
    let mut words: Vec<String> = Vec::new();
    for t in &np.tokens {
        let mut pieces: Vec<String> = tokenize(&t.form)
            .concat()
            .into_iter()
            .map(|tok| tok.lower())
            .collect();
        if t.index == np.head_index {
            if let Some(last) = pieces.last_mut() {
                *last = singularize(last);
            }
        }
        words.extend(pieces);
    }
    let skip = words
        .iter()
        .take_while(|w| LEADING_DETERMINERS.contains(&w.as_str()))
        .count();
    words[skip..].join(" ")
}
