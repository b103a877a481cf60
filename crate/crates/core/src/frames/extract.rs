use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::conllu::{ParseToken, ParsedSentence};
use super::phrase::NounPhrase;
use crate::error::{Error, Result};

/// Which extraction rule produced a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Subject and direct object of a verb.
    R1,
    /// Core argument of a verb and its prepositional complement.
    R2,
    /// Noun phrase modified by a prepositional phrase.
    R3,
    /// Copula or apposition.
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
        };
        f.write_str(s)
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        match s {
            "R1" => Ok(Rule::R1),
            "R2" => Ok(Rule::R2),
            "R3" => Ok(Rule::R3),
            "R4" => Ok(Rule::R4),
            other => Err(Error::Usage(format!("unknown rule `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TernaryFrame {
    pub arg1: NounPhrase,
    pub connector: String,
    pub arg2: NounPhrase,
    pub doc: String,
    /// 1-based sentence number within the document.
    pub sent: usize,
    pub rule: Rule,
}

impl TernaryFrame {
    pub fn record(&self) -> FrameRecord {
        FrameRecord {
            arg1: self.arg1.normalized.clone(),
            connector: self.connector.clone(),
            arg2: self.arg2.normalized.clone(),
            doc: self.doc.clone(),
            sent: self.sent,
            rule: self.rule,
        }
    }
}

/// Flat form of a frame, one JSON object per line in `frames.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrameRecord {
    pub arg1: String,
    pub connector: String,
    pub arg2: String,
    pub doc: String,
    pub sent: usize,
    pub rule: Rule,
}

pub fn write_jsonl(records: &[FrameRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("frame record serializes"));
        out.push('\n');
    }
    out
}

pub fn read_jsonl(text: &str, source_name: &str) -> Result<Vec<FrameRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

struct Ctx<'a> {
    sentence: &'a ParsedSentence,
    chunks: &'a [NounPhrase],
}

impl<'a> Ctx<'a> {
    fn chunk_of(&self, index: usize) -> Option<usize> {
        self.chunks.iter().position(|c| c.contains(index))
    }

    fn child_chunk(&self, head: usize, rel: &str) -> Option<usize> {
        self.sentence
            .children(head)
            .find(|t| t.base_rel() == rel)
            .and_then(|t| self.chunk_of(t.index))
    }

    fn preposition(&self, index: usize) -> Option<String> {
        let words: Vec<String> = self
            .sentence
            .children(index)
            .filter(|t| t.base_rel() == "case")
            .map(|t| t.form.to_lowercase())
            .collect();
        (!words.is_empty()).then(|| words.join("_"))
    }

    fn is_parenthesized_acronym(&self, host: usize, appos: &ParseToken) -> bool {
        let Some(a) = self.chunk_of(appos.index) else {
            return false;
        };
        let span = &self.chunks[a];
        let before = self.sentence.token(span.start.wrapping_sub(1));
        let after = self.sentence.token(span.end + 1);
        if before.map(|t| t.form.as_str()) != Some("(") || after.map(|t| t.form.as_str()) != Some(")") {
            return false;
        }
        let acronym: String = span.tokens.iter().map(|t| t.form.as_str()).collect();
        let initials: String = self.chunks[host]
            .tokens
            .iter()
            .filter(|t| t.is_noun() || t.upos == "ADJ")
            .filter_map(|t| t.form.chars().next())
            .collect();
        !acronym.is_empty() && acronym.to_uppercase() == initials.to_uppercase()
    }
}

/// Applies rules R1–R4 to one parsed sentence.
///
/// * R1 `<subject, verb, object>`
/// * R2 `<subject, verb_prep, oblique>`, and `<object, verb_prep, oblique>`
///   when the verb also has a direct object
/// * R3 `<np, prep, np>` for a prepositional noun modifier in another chunk
/// * R4 `<subject, be, predicate>` for copular clauses and `<np, be, np>`
///   for appositions; a parenthesized acronym of its host is not a frame
///
/// Frames are deduplicated and ordered by anchor token, then rule.
pub fn extract_frames(sentence: &ParsedSentence, chunks: &[NounPhrase], doc: &str, sent: usize) -> Vec<TernaryFrame> {
    let ctx = Ctx { sentence, chunks };
    let mut found: Vec<(usize, Rule, usize, String, usize)> = Vec::new();

    for tok in &sentence.tokens {
        if tok.upos == "VERB" {
            let subj = ctx.child_chunk(tok.index, "nsubj");
            let obj = ctx.child_chunk(tok.index, "obj");
            let verb = tok.lemma_or_form();
            if let (Some(s), Some(o)) = (subj, obj) {
                found.push((tok.index, Rule::R1, s, verb.clone(), o));
            }
            for obl in sentence.children(tok.index).filter(|t| t.base_rel() == "obl") {
                let (Some(target), Some(prep)) = (ctx.chunk_of(obl.index), ctx.preposition(obl.index)) else {
                    continue;
                };
                let connector = format!("{verb}_{prep}");
                for core in [subj, obj].into_iter().flatten() {
                    found.push((tok.index, Rule::R2, core, connector.clone(), target));
                }
            }
        }

        if let Some(host) = ctx.chunk_of(tok.index) {
            for m in sentence.children(tok.index).filter(|t| t.base_rel() == "nmod") {
                let (Some(target), Some(prep)) = (ctx.chunk_of(m.index), ctx.preposition(m.index)) else {
                    continue;
                };
                found.push((tok.index, Rule::R3, host, prep, target));
            }
            if tok.is_noun() && sentence.children(tok.index).any(|t| t.base_rel() == "cop") {
                if let Some(s) = ctx.child_chunk(tok.index, "nsubj") {
                    found.push((tok.index, Rule::R4, s, "be".into(), host));
                }
            }
            for ap in sentence.children(tok.index).filter(|t| t.base_rel() == "appos") {
                let Some(target) = ctx.chunk_of(ap.index) else {
                    continue;
                };
                if !ctx.is_parenthesized_acronym(host, ap) {
                    found.push((tok.index, Rule::R4, host, "be".into(), target));
                }
            }
        }
    }

    found.sort_by(|a, b| (a.0, a.1, a.2, a.4, &a.3).cmp(&(b.0, b.1, b.2, b.4, &b.3)));
    let mut seen = HashSet::new();
    found
        .into_iter()
        .filter(|(_, _, a1, conn, a2)| a1 != a2 && !conn.is_empty())
        .filter(|(_, _, a1, conn, a2)| seen.insert((*a1, conn.clone(), *a2)))
        .map(|(_, rule, a1, connector, a2)| TernaryFrame {
            arg1: chunks[a1].clone(),
            connector,
            arg2: chunks[a2].clone(),
            doc: doc.to_string(),
            sent,
            rule,
        })
        .collect()
}
