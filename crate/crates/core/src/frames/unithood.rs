//! Collocation strength of adjacent phrases and the noun-phrase chunker
//! that uses it.

use serde::{Deserialize, Serialize};

use super::conllu::ParsedSentence;
use super::phrase::NounPhrase;
use crate::corpus::{split_phrase, FrequencyIndex, PhraseIndex};
use crate::error::{Error, Result};

const EPSILON: f64 = 1e-6;

/// `UH = log2(P(ab) / (P(a) P(b))) + log2(f(ab) + 1)`, or `-inf` when the
/// pair was never seen.
pub fn unithood_score(f_a: u64, f_b: u64, f_ab: u64, total: u64) -> f64 {
    if f_ab == 0 || f_a == 0 || f_b == 0 || total == 0 {
        return f64::NEG_INFINITY;
    }
    let mi = ((f_ab as f64) * (total as f64) / ((f_a as f64) * (f_b as f64))).log2();
    mi + ((f_ab + 1) as f64).log2()
}

/// Unithood from window counts of the two head words.
pub fn unithood(a: &NounPhrase, b: &NounPhrase, index: &FrequencyIndex) -> f64 {
    let ha = a.head().form.to_lowercase();
    let hb = b.head().form.to_lowercase();
    unithood_score(index.unigram(&ha), index.unigram(&hb), index.pair(&ha, &hb), index.total_tokens)
}

/// Log-odds that the two parts form one unit:
/// `ln(e1 / (1 - e1 + eps)) + ln(e2 / (1 - e2 + eps))` with
/// `e1 = f(ab)/f(a)` and `e2 = f(ab)/f(b)`, both capped at 1.
pub fn odds_of_unithood_score(f_a: u64, f_b: u64, f_ab: u64) -> Result<f64> {
    if f_a == 0 || f_b == 0 {
        return Err(Error::UndefinedEvidence(format!(
            "f(a) = {f_a}, f(b) = {f_b}"
        )));
    }
    let term = |f_x: u64| {
        let e = (f_ab as f64 / f_x as f64).min(1.0);
        (e / (1.0 - e + EPSILON)).ln()
    };
    Ok(term(f_a) + term(f_b))
}

/// Phrase-level evidence for joining `a` and `b` across `connector`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitEvidence {
    pub f_a: u64,
    pub f_b: u64,
    pub f_ab: u64,
}

impl UnitEvidence {
    pub fn gather(a: &NounPhrase, b: &NounPhrase, joined: &NounPhrase, phrases: &PhraseIndex) -> Self {
        UnitEvidence {
            f_a: phrases.count(&split_phrase(&a.normalized)),
            f_b: phrases.count(&split_phrase(&b.normalized)),
            f_ab: phrases.count(&split_phrase(&joined.normalized)),
        }
    }
}

pub fn odds_of_unithood(a: &NounPhrase, b: &NounPhrase, joined: &NounPhrase, phrases: &PhraseIndex) -> Result<f64> {
    let ev = UnitEvidence::gather(a, b, joined, phrases);
    odds_of_unithood_score(ev.f_a, ev.f_b, ev.f_ab)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChunkParams {
    /// Merge threshold on the odds of unithood.
    pub theta_ou: f64,
    /// Joined span must occur at least this often in the corpus.
    pub min_unit_freq: u64,
}

impl Default for ChunkParams {
    fn default() -> Self {
        ChunkParams {
            theta_ou: 0.0,
            min_unit_freq: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeDecision {
    pub left: String,
    pub connector: String,
    pub right: String,
    pub evidence: UnitEvidence,
    /// `None` when the evidence was undefined.
    pub odds: Option<f64>,
    pub merged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Chunking {
    pub phrases: Vec<NounPhrase>,
    pub decisions: Vec<MergeDecision>,
}

fn chunkable(upos: &str) -> bool {
    matches!(upos, "DET" | "ADJ" | "NOUN" | "PROPN" | "NUM")
}

/// Base chunks: maximal runs of determiners, adjectives, numerals and
/// nouns, cut before a determiner that follows a noun and trimmed so they
/// end on a noun.
pub fn base_chunks(sentence: &ParsedSentence) -> Vec<NounPhrase> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    let close = |run: &mut Vec<usize>, spans: &mut Vec<(usize, usize)>| {
        let last_noun = run
            .iter()
            .rposition(|&i| sentence.token(i).is_some_and(|t| t.is_noun()));
        if let Some(pos) = last_noun {
            spans.push((run[0], run[pos]));
        }
        run.clear();
    };
    for t in &sentence.tokens {
        if !chunkable(&t.upos) {
            close(&mut run, &mut spans);
            continue;
        }
        let has_noun = run
            .iter()
            .any(|&i| sentence.token(i).is_some_and(|t| t.is_noun()));
        if t.upos == "DET" && has_noun {
            close(&mut run, &mut spans);
        }
        run.push(t.index);
    }
    close(&mut run, &mut spans);
    spans
        .into_iter()
        .map(|(s, e)| NounPhrase::from_span(sentence, s, e))
        .collect()
}

/// Chunks noun phrases, joining neighbours separated by a single
/// preposition or coordinating conjunction when the joined span recurs at
/// least `min_unit_freq` times and its odds of unithood reach `theta_ou`.
pub fn chunk_noun_phrases(sentence: &ParsedSentence, phrases: &PhraseIndex, params: &ChunkParams) -> Chunking {
    let base = base_chunks(sentence);
    let mut out = Chunking::default();
    let mut iter = base.into_iter();
    let Some(mut current) = iter.next() else {
        return out;
    };
    for next in iter {
        let between = sentence.token(current.end + 1);
        let joinable = next.start == current.end + 2
            && between.is_some_and(|t| matches!(t.upos.as_str(), "ADP" | "CCONJ"));
        if !joinable {
            out.phrases.push(std::mem::replace(&mut current, next));
            continue;
        }
        let connector = between.map(|t| t.form.to_lowercase()).unwrap_or_default();
        let joined = NounPhrase::from_span(sentence, current.start, next.end);
        let evidence = UnitEvidence::gather(&current, &next, &joined, phrases);
        let odds = odds_of_unithood_score(evidence.f_a, evidence.f_b, evidence.f_ab).ok();
        let merged = evidence.f_ab >= params.min_unit_freq
            && odds.is_some_and(|o| o >= params.theta_ou);
        out.decisions.push(MergeDecision {
            left: current.normalized.clone(),
            connector,
            right: next.normalized.clone(),
            evidence,
            odds,
            merged,
        });
        if merged {
            current = joined;
        } else {
            out.phrases.push(std::mem::replace(&mut current, next));
        }
    }
    out.phrases.push(current);
    out
}
