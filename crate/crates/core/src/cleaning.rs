//! Optional text cleaning: spelling correction, abbreviation expansion and
//! case restoration decided together by one weighted score per candidate.
//!
//! The four evidence sources are combined as a convex sum. The weights are
//! a reconstruction and can be overridden through [`CleaningWeights`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Document, FrequencyIndex, SourceKind, Token};
use crate::error::{Error, Result};

/// Unit-cost Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub expansion: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AbbreviationDictionary {
    pub entries: BTreeMap<String, Vec<Expansion>>,
}

impl AbbreviationDictionary {
    /// Parses `abbrev<TAB>expansion<TAB>weight` lines; `#` starts a comment.
    pub fn from_tsv(text: &str, source_name: &str) -> Result<Self> {
        let mut dict = AbbreviationDictionary::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |reason: String| Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                reason,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let weight: f64 = cols[2]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad weight `{}`", cols[2])))?;
            if !(0.0..=1.0).contains(&weight) {
                return Err(err(format!("weight {weight} outside [0, 1]")));
            }
            dict.insert(cols[0].trim(), cols[1].trim(), weight);
        }
        Ok(dict)
    }

    pub fn insert(&mut self, abbrev: &str, expansion: &str, weight: f64) {
        self.entries
            .entry(abbrev.to_lowercase())
            .or_default()
            .push(Expansion {
                expansion: expansion.to_string(),
                weight,
            });
    }

    pub fn expansions(&self, token: &str) -> &[Expansion] {
        self.entries
            .get(&token.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(&token.to_lowercase())
    }

    fn weight_for(&self, token: &str, candidate: &str) -> f64 {
        self.expansions(token)
            .iter()
            .filter(|e| e.expansion.eq_ignore_ascii_case(candidate))
            .map(|e| e.weight)
            .fold(0.0, f64::max)
    }
}

/// Known words with their observed casings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub words: BTreeSet<String>,
    /// lowercase form → surface form → count, sentence-initial occurrences
    /// excluded.
    pub casings: BTreeMap<String, BTreeMap<String, u64>>,
}

impl Lexicon {
    /// Words occurring at least `min_count` times in `docs`, plus `extra`.
    pub fn from_documents(docs: &[Document], min_count: u64, extra: &[String]) -> Result<Self> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut inner: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for doc in docs {
            for sentence in doc.sentences()? {
                for (i, tok) in sentence.iter().enumerate() {
                    let lower = tok.lower();
                    *counts.entry(lower.clone()).or_default() += 1;
                    if i > 0 {
                        *inner.entry(lower).or_default().entry(tok.text.clone()).or_default() += 1;
                    }
                }
            }
        }
        let mut lex = Lexicon::default();
        for (w, c) in counts {
            if c >= min_count {
                lex.words.insert(w);
            }
        }
        for w in extra {
            lex.words.insert(w.to_lowercase());
        }
        lex.casings = inner;
        Ok(lex)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    /// Most frequent surface form; ties go to the lexicographically
    /// smallest. Falls back to the lowercase form.
    pub fn majority_casing(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        self.casings
            .get(&lower)
            .and_then(|forms| {
                forms
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                    .map(|(f, _)| f.clone())
            })
            .unwrap_or(lower)
    }

    /// Share of the word's occurrences written exactly as `surface`.
    pub fn case_share(&self, surface: &str) -> f64 {
        let Some(forms) = self.casings.get(&surface.to_lowercase()) else {
            return 0.0;
        };
        let total: u64 = forms.values().sum();
        if total == 0 {
            return 0.0;
        }
        forms.get(surface).copied().unwrap_or(0) as f64 / total as f64
    }

    /// Rewrites each known word of `phrase` in its majority casing.
    pub fn canonical_casing(&self, phrase: &str) -> String {
        phrase
            .split_whitespace()
            .map(|w| {
                if self.casings.contains_key(&w.to_lowercase()) {
                    self.majority_casing(w)
                } else {
                    w.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseClass {
    Spelling,
    Abbreviation,
    Casing,
}

impl fmt::Display for NoiseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseClass::Spelling => "spelling",
            NoiseClass::Abbreviation => "abbreviation",
            NoiseClass::Casing => "casing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlaggedToken {
    /// Token offset within the document.
    pub offset: usize,
    pub token: Token,
    pub class: NoiseClass,
    /// Lowercased neighbours, up to two on each side, same sentence.
    pub window: Vec<String>,
}

pub fn detect_noise_tokens(doc: &Document, lexicon: &Lexicon, abbrevs: &AbbreviationDictionary) -> Vec<FlaggedToken> {
    let mut flagged = Vec::new();
    let mut offset = 0;
    for sentence in tokenize(&doc.text) {
        for (i, tok) in sentence.iter().enumerate() {
            let here = offset + i;
            if tok.text.chars().any(|c| c.is_numeric()) {
                continue;
            }
            let class = if abbrevs.contains(&tok.text) {
                Some(NoiseClass::Abbreviation)
            } else if !lexicon.contains(&tok.text) {
                Some(NoiseClass::Spelling)
            } else if i > 0 && tok.text != lexicon.majority_casing(&tok.text) {
                Some(NoiseClass::Casing)
            } else {
                None
            };
            if let Some(class) = class {
                let lo = i.saturating_sub(2);
                let hi = (i + 3).min(sentence.len());
                let window = (lo..hi)
                    .filter(|&j| j != i)
                    .map(|j| sentence[j].lower())
                    .collect();
                flagged.push(FlaggedToken {
                    offset: here,
                    token: tok.clone(),
                    class,
                    window,
                });
            }
        }
        offset += sentence.len();
    }
    flagged
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningWeights {
    pub edit: f64,
    pub abbrev: f64,
    pub context: f64,
    pub case: f64,
}

impl Default for CleaningWeights {
    fn default() -> Self {
        CleaningWeights {
            edit: 0.4,
            abbrev: 0.2,
            context: 0.3,
            case: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplacementCandidate {
    pub surface: String,
    pub edit_sim: f64,
    pub abbrev_evidence: f64,
    pub context_fit: f64,
    pub case_prior: f64,
    pub score: f64,
}

impl ReplacementCandidate {
    pub fn recompute(&self, w: &CleaningWeights) -> f64 {
        w.edit * self.edit_sim
            + w.abbrev * self.abbrev_evidence
            + w.context * self.context_fit
            + w.case * self.case_prior
    }
}

/// Read-only resources shared by every document being cleaned.
#[derive(Debug, Clone)]
pub struct CleaningModel {
    pub lexicon: Lexicon,
    pub index: FrequencyIndex,
    pub abbrevs: AbbreviationDictionary,
    pub weights: CleaningWeights,
    /// Minimum top score for a replacement to be applied.
    pub threshold: f64,
    /// Largest edit distance for lexicon candidates.
    pub max_edit: usize,
}

impl CleaningModel {
    pub fn new(lexicon: Lexicon, index: FrequencyIndex, abbrevs: AbbreviationDictionary) -> Self {
        CleaningModel {
            lexicon,
            index,
            abbrevs,
            weights: CleaningWeights::default(),
            threshold: 0.5,
            max_edit: 2,
        }
    }

    /// Lexicon words within `max_edit` of a spelling suspect, dictionary
    /// expansions, and the majority casing of a casing suspect.
    pub fn candidates(&self, flag: &FlaggedToken) -> Vec<String> {
        let lower = flag.token.lower();
        let mut out = BTreeSet::new();
        match flag.class {
            NoiseClass::Spelling => {
                let len = lower.chars().count();
                for w in &self.lexicon.words {
                    if w.chars().count().abs_diff(len) <= self.max_edit
                        && edit_distance(&lower, w) <= self.max_edit
                    {
                        out.insert(self.lexicon.majority_casing(w));
                    }
                }
            }
            NoiseClass::Casing => {
                out.insert(self.lexicon.majority_casing(&lower));
            }
            NoiseClass::Abbreviation => {}
        }
        for e in self.abbrevs.expansions(&lower) {
            out.insert(self.lexicon.canonical_casing(&e.expansion));
        }
        out.remove(&flag.token.text);
        out.into_iter().collect()
    }
}

/// Scores every candidate replacement for `token` and ranks them by
/// score, ties broken by corpus frequency and then surface form.
///
/// * `edit_sim = 1 / (1 + edit_distance)` on lowercased strings
/// * `abbrev_evidence` is the dictionary weight when the candidate expands
///   the token
/// * `context_fit` is the share of window words that co-occur with the
///   candidate's last word
/// * `case_prior` is the corpus share of the candidate's exact casing,
///   averaged over its words
pub fn issac_score(token: &str, window: &[String], candidates: &[String], model: &CleaningModel) -> Vec<ReplacementCandidate> {
    let lower = token.to_lowercase();
    let w = &model.weights;
    let mut scored: Vec<ReplacementCandidate> = candidates
        .iter()
        .map(|cand| {
            let edit_sim = 1.0 / (1.0 + edit_distance(&lower, &cand.to_lowercase()) as f64);
            let abbrev_evidence = model.abbrevs.weight_for(token, cand);
            let head = cand
                .split_whitespace()
                .last()
                .unwrap_or_default()
                .to_lowercase();
            let context_fit = if window.is_empty() {
                0.0
            } else {
                window
                    .iter()
                    .filter(|n| model.index.pair(n, &head) > 0)
                    .count() as f64
                    / window.len() as f64
            };
            let words: Vec<&str> = cand.split_whitespace().collect();
            let case_prior = if words.is_empty() {
                0.0
            } else {
                words.iter().map(|x| model.lexicon.case_share(x)).sum::<f64>() / words.len() as f64
            };
            let mut c = ReplacementCandidate {
                surface: cand.clone(),
                edit_sim,
                abbrev_evidence,
                context_fit,
                case_prior,
                score: 0.0,
            };
            c.score = c.recompute(w);
            c
        })
        .collect();
    // Equal scores go to the more frequent candidate, then the smaller surface.
    let freq = |c: &ReplacementCandidate| model.index.unigram(&c.surface.to_lowercase());
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| freq(b).cmp(&freq(a)))
            .then_with(|| a.surface.cmp(&b.surface))
    });
    scored
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replacement {
    pub doc: String,
    pub offset: usize,
    pub original: String,
    pub chosen: String,
    pub score: f64,
    pub class: NoiseClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unresolved {
    pub doc: String,
    pub offset: usize,
    pub original: String,
    pub class: NoiseClass,
    pub best: Option<ReplacementCandidate>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub replacements: Vec<Replacement>,
    pub unresolved: Vec<Unresolved>,
    pub counts: BTreeMap<NoiseClass, usize>,
}

impl CleaningReport {
    pub fn merge(&mut self, other: CleaningReport) {
        self.replacements.extend(other.replacements);
        self.unresolved.extend(other.unresolved);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
    }

    /// One JSON object per replacement.
    /// One line per replacement, then one per unresolved token, each tagged
    /// with a `status` field.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        #[serde(tag = "status", rename_all = "lowercase")]
        enum Line<'a> {
            Replaced(&'a Replacement),
            Unresolved(&'a Unresolved),
        }
        let lines = self
            .replacements
            .iter()
            .map(Line::Replaced)
            .chain(self.unresolved.iter().map(Line::Unresolved));
        let mut out = String::new();
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("report line serializes"));
            out.push('\n');
        }
        out
    }
}

/// Replaces each flagged token whose best candidate reaches the model
/// threshold. Text outside replaced spans is copied unchanged.
pub fn clean_document(doc: &Document, model: &CleaningModel) -> Result<(Document, CleaningReport)> {
    if doc.source_kind != SourceKind::Plain {
        return Err(Error::Usage(format!(
            "document `{}` is not plain text; only plain documents can be cleaned",
            doc.id
        )));
    }
    // Replacements change neighbouring windows, so repeat until nothing moves.
    let mut current = doc.clone();
    let mut report = CleaningReport::default();
    for _ in 0..MAX_CLEAN_PASSES {
        let (next, pass) = clean_pass(&current, model);
        let changed = !pass.replacements.is_empty();
        for (class, n) in pass.counts {
            *report.counts.entry(class).or_default() += n;
        }
        report.replacements.extend(pass.replacements);
        report.unresolved = pass.unresolved;
        current = next;
        if !changed {
            break;
        }
    }
    Ok((current, report))
}

const MAX_CLEAN_PASSES: usize = 4;

fn clean_pass(doc: &Document, model: &CleaningModel) -> (Document, CleaningReport) {
    let mut report = CleaningReport::default();
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    for flag in detect_noise_tokens(doc, &model.lexicon, &model.abbrevs) {
        let candidates = model.candidates(&flag);
        let ranked = issac_score(&flag.token.text, &flag.window, &candidates, model);
        match ranked.into_iter().next() {
            Some(best) if best.score >= model.threshold => {
                edits.push((flag.token.start, flag.token.end, best.surface.clone()));
                *report.counts.entry(flag.class).or_default() += 1;
                report.replacements.push(Replacement {
                    doc: doc.id.clone(),
                    offset: flag.offset,
                    original: flag.token.text,
                    chosen: best.surface,
                    score: best.score,
                    class: flag.class,
                });
            }
            best => report.unresolved.push(Unresolved {
                doc: doc.id.clone(),
                offset: flag.offset,
                original: flag.token.text,
                class: flag.class,
                best,
            }),
        }
    }
    let mut text = String::with_capacity(doc.text.len());
    let mut last = 0;
    for (start, end, replacement) in &edits {
        text.push_str(&doc.text[last..*start]);
        text.push_str(replacement);
        last = *end;
    }
    text.push_str(&doc.text[last..]);
    let cleaned = Document {
        text,
        ..doc.clone()
    };
    (cleaned, report)
}
