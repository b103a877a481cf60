//! Term recognition: candidates come from frame arguments and are ranked by
//! one of four measures. TH and OT weigh domain against contrastive
//! evidence; CW and NCV are the baselines.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{split_phrase, PhraseIndex};
use crate::error::{Error, Result};
use crate::frames::FrameRecord;

const PREPOSITIONS: &[&str] = &["of", "in", "for", "on", "with", "to", "at", "by", "from"];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermCandidate {
    pub normalized: String,
    pub words: Vec<String>,
    pub head: String,
    pub modifiers: Vec<String>,
}

impl TermCandidate {
    /// The head is the word before the first preposition, or the last word.
    /// Modifiers are the other words, prepositions excluded.
    pub fn from_normalized(phrase: &str) -> Option<TermCandidate> {
        let words = split_phrase(phrase);
        if words.is_empty() {
            return None;
        }
        let head_at = words
            .iter()
            .position(|w| PREPOSITIONS.contains(&w.as_str()))
            .filter(|&p| p > 0)
            .map_or(words.len() - 1, |p| p - 1);
        let modifiers = words
            .iter()
            .enumerate()
            .filter(|(i, w)| *i != head_at && !PREPOSITIONS.contains(&w.as_str()))
            .map(|(_, w)| w.clone())
            .collect();
        Some(TermCandidate {
            normalized: words.join(" "),
            head: words[head_at].clone(),
            words,
            modifiers,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// True when `other` is a strictly longer phrase containing this one.
    pub fn nested_in(&self, other: &TermCandidate) -> bool {
        other.len() > self.len() && other.words.windows(self.len()).any(|w| w == self.words.as_slice())
    }
}

/// Distinct normalized arguments of `frames`, sorted.
pub fn collect_candidates(frames: &[FrameRecord]) -> Vec<TermCandidate> {
    let set: BTreeSet<&str> = frames
        .iter()
        .flat_map(|f| [f.arg1.as_str(), f.arg2.as_str()])
        .collect();
    set.into_iter().filter_map(TermCandidate::from_normalized).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    pub f_d: u64,
    pub f_dbar: u64,
    pub context_words: BTreeSet<String>,
}

/// Connector pieces plus the other argument's head, for every frame in
/// which `c` is an argument.
fn context_of(c: &TermCandidate, frames: &[FrameRecord]) -> BTreeMap<String, u64> {
    let mut out: BTreeMap<String, u64> = BTreeMap::new();
    for f in frames {
        let other = if f.arg1 == c.normalized {
            &f.arg2
        } else if f.arg2 == c.normalized {
            &f.arg1
        } else {
            continue;
        };
        let mut words: BTreeSet<String> = f
            .connector
            .split(['_', ' '])
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        if let Some(o) = TermCandidate::from_normalized(other) {
            words.insert(o.head);
        }
        for w in words {
            *out.entry(w).or_default() += 1;
        }
    }
    out
}

pub fn compute_stats(c: &TermCandidate, domain: &PhraseIndex, contrastive: &PhraseIndex, frames: &[FrameRecord]) -> TermStats {
    TermStats {
        f_d: domain.count(&c.words),
        f_dbar: contrastive.count(&c.words),
        context_words: context_of(c, frames).into_keys().collect(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStats {
    pub f_d: u64,
    pub f_dbar: u64,
}

/// Occurrence mass per corpus, for candidate phrases and for single words.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub phrase_d: u64,
    pub phrase_dbar: u64,
    pub word_d: u64,
    pub word_dbar: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TermParams {
    /// Weight of the modifier component of TH.
    pub alpha: f64,
    /// Weight of the context component of TH.
    pub beta: f64,
}

impl Default for TermParams {
    fn default() -> Self {
        TermParams { alpha: 0.5, beta: 0.25 }
    }
}

/// Everything the measures read, computed once per run.
#[derive(Debug, Clone, Default)]
pub struct TermInputs {
    pub candidates: Vec<TermCandidate>,
    pub stats: BTreeMap<String, TermStats>,
    pub word_stats: BTreeMap<String, WordStats>,
    pub totals: Totals,
    /// candidate → candidates properly containing it.
    pub nesting: BTreeMap<String, Vec<String>>,
    /// candidate → context word → number of frames sharing it.
    pub context_counts: BTreeMap<String, BTreeMap<String, u64>>,
    /// context word → distinct candidates it occurs with.
    pub context_spread: BTreeMap<String, u64>,
    pub params: TermParams,
}

impl TermInputs {
    pub fn build(frames: &[FrameRecord], domain: &PhraseIndex, contrastive: &PhraseIndex, params: TermParams) -> TermInputs {
        let candidates = collect_candidates(frames);
        let per: Vec<(TermStats, BTreeMap<String, u64>)> = candidates
            .par_iter()
            .map(|c| {
                let ctx = context_of(c, frames);
                let stats = TermStats {
                    f_d: domain.count(&c.words),
                    f_dbar: contrastive.count(&c.words),
                    context_words: ctx.keys().cloned().collect(),
                };
                (stats, ctx)
            })
            .collect();
        let mut inputs = TermInputs {
            params,
            ..TermInputs::default()
        };
        let mut words = BTreeSet::new();
        for (c, (stats, ctx)) in candidates.iter().zip(per) {
            inputs.totals.phrase_d += stats.f_d;
            inputs.totals.phrase_dbar += stats.f_dbar;
            words.extend(c.words.iter().cloned());
            words.extend(stats.context_words.iter().cloned());
            for w in ctx.keys() {
                *inputs.context_spread.entry(w.clone()).or_default() += 1;
            }
            inputs.stats.insert(c.normalized.clone(), stats);
            inputs.context_counts.insert(c.normalized.clone(), ctx);
        }
        inputs.word_stats = words
            .into_par_iter()
            .map(|w| {
                let one = [w.clone()];
                let s = WordStats {
                    f_d: domain.count(&one),
                    f_dbar: contrastive.count(&one),
                };
                (w, s)
            })
            .collect();
        inputs.totals.word_d = domain.total_tokens();
        inputs.totals.word_dbar = contrastive.total_tokens();
        for a in &candidates {
            let containers: Vec<String> = candidates
                .iter()
                .filter(|b| a.nested_in(b))
                .map(|b| b.normalized.clone())
                .collect();
            if !containers.is_empty() {
                inputs.nesting.insert(a.normalized.clone(), containers);
            }
        }
        inputs.candidates = candidates;
        inputs
    }

    fn stats_of(&self, c: &TermCandidate) -> TermStats {
        self.stats.get(&c.normalized).cloned().unwrap_or_default()
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn domain_tendency(f_d: u64, f_dbar: u64) -> f64 {
    ((f_d as f64 + 1.0) / (f_dbar as f64 + 1.0) + 1.0).log2()
}

pub fn domain_prevalence(f_d: u64, f_dbar: u64) -> f64 {
    (f_d as f64 + 10.0).log10() * domain_tendency(f_d, f_dbar)
}

pub fn score_th(c: &TermCandidate, stats: &TermStats, word_stats: &BTreeMap<String, WordStats>, params: &TermParams) -> f64 {
    let word = |w: &str| word_stats.get(w).copied().unwrap_or_default();
    let modifiers = mean(c.modifiers.iter().map(|m| {
        let s = word(m);
        domain_prevalence(s.f_d, s.f_dbar)
    }));
    let context = mean(stats.context_words.iter().map(|w| {
        let s = word(w);
        domain_tendency(s.f_d, s.f_dbar)
    }));
    domain_prevalence(stats.f_d, stats.f_dbar) + params.alpha * modifiers + params.beta * context
}

/// Log odds ratio of domain against contrastive occurrence.
pub fn odds_base(f_d: u64, f_dbar: u64, total_d: u64, total_dbar: u64) -> Result<f64> {
    if f_d > total_d || f_dbar > total_dbar {
        return Err(Error::Inconsistent(format!(
            "frequency exceeds total: f_d={f_d}/{total_d}, f_dbar={f_dbar}/{total_dbar}"
        )));
    }
    let odds = |f: u64, t: u64| (f as f64 + 0.5) / ((t - f) as f64 + 0.5);
    Ok((odds(f_d, total_d) / odds(f_dbar, total_dbar)).ln())
}

pub fn score_ot(c: &TermCandidate, stats: &TermStats, word_stats: &BTreeMap<String, WordStats>, totals: &Totals) -> Result<f64> {
    let word_base = |w: &String| {
        let s = word_stats.get(w).copied().unwrap_or_default();
        odds_base(s.f_d, s.f_dbar, totals.word_d, totals.word_dbar)
    };
    let modifiers = c.modifiers.iter().map(word_base).collect::<Result<Vec<_>>>()?;
    let context = stats.context_words.iter().map(word_base).collect::<Result<Vec<_>>>()?;
    Ok(odds_base(stats.f_d, stats.f_dbar, totals.phrase_d, totals.phrase_dbar)?
        + mean(modifiers.into_iter())
        + mean(context.into_iter()))
}

fn cw_simple(f_d: u64, f_all: u64, total_all: u64) -> f64 {
    (f_d as f64 + 1.0).ln() * (total_all as f64 / (f_all as f64 + 1.0) + 1.0).ln()
}

pub fn score_cw(c: &TermCandidate, stats: &TermStats, word_stats: &BTreeMap<String, WordStats>, totals: &Totals) -> f64 {
    if c.len() == 1 {
        cw_simple(stats.f_d, stats.f_d + stats.f_dbar, totals.phrase_d + totals.phrase_dbar)
    } else {
        let h = word_stats.get(&c.head).copied().unwrap_or_default();
        let head_cw = cw_simple(h.f_d, h.f_d + h.f_dbar, totals.word_d + totals.word_dbar);
        stats.f_d as f64 * head_cw
    }
}

/// `containers` holds the domain frequencies of the candidates properly
/// containing `c`; `context` pairs each context word's co-occurrence count
/// with the share of all candidates that word occurs with.
pub fn score_ncv(c: &TermCandidate, stats: &TermStats, containers: &[u64], context: &[(u64, f64)]) -> f64 {
    let weight = (c.len() as f64 + 1.0).log2();
    let cval = if containers.is_empty() {
        weight * stats.f_d as f64
    } else {
        let m = containers.iter().sum::<u64>() as f64 / containers.len() as f64;
        weight * (stats.f_d as f64 - m)
    };
    let ctx: f64 = context.iter().map(|(n, share)| *n as f64 * share).sum();
    0.8 * cval + 0.2 * ctx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "TH")]
    Th,
    #[serde(rename = "OT")]
    Ot,
    #[serde(rename = "CW")]
    Cw,
    #[serde(rename = "NCV")]
    Ncv,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::Th, Measure::Ot, Measure::Cw, Measure::Ncv];

    pub fn file_name(self) -> String {
        format!("terms_{}.tsv", self.to_string().to_lowercase())
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Th => "TH",
            Measure::Ot => "OT",
            Measure::Cw => "CW",
            Measure::Ncv => "NCV",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TH" => Ok(Measure::Th),
            "OT" => Ok(Measure::Ot),
            "CW" => Ok(Measure::Cw),
            "NCV" => Ok(Measure::Ncv),
            _ => Err(Error::Usage(format!("unknown measure `{s}` (expected TH, OT, CW or NCV)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub term: String,
    pub score: f64,
    pub f_d: u64,
    pub f_dbar: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTermList {
    pub measure: Measure,
    pub entries: Vec<RankedEntry>,
}

impl RankedTermList {
    /// Sorts by score descending, ties by term.
    pub fn new(measure: Measure, mut entries: Vec<RankedEntry>) -> RankedTermList {
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.term.cmp(&b.term)));
        RankedTermList { measure, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("rank\tterm\tscore\tf_d\tf_dbar\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", i + 1, e.term, e.score, e.f_d, e.f_dbar));
        }
        out
    }

    pub fn from_tsv(measure: Measure, text: &str, source_name: &str) -> Result<RankedTermList> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 && line.starts_with("rank\t") || line.trim().is_empty() {
                continue;
            }
            let err = |reason: String| Error::Parse {
                source_name: source_name.to_string(),
                line: i + 1,
                reason,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(err(format!("expected 5 columns, found {}", cols.len())));
            }
            let num = |s: &str| s.parse::<u64>().map_err(|_| err(format!("bad count `{s}`")));
            entries.push(RankedEntry {
                term: cols[1].to_string(),
                score: cols[2].parse().map_err(|_| err(format!("bad score `{}`", cols[2])))?,
                f_d: num(cols[3])?,
                f_dbar: num(cols[4])?,
            });
        }
        Ok(RankedTermList::new(measure, entries))
    }
}

pub fn score_candidate(c: &TermCandidate, measure: Measure, inputs: &TermInputs) -> Result<f64> {
    let stats = inputs.stats_of(c);
    Ok(match measure {
        Measure::Th => score_th(c, &stats, &inputs.word_stats, &inputs.params),
        Measure::Ot => score_ot(c, &stats, &inputs.word_stats, &inputs.totals)?,
        Measure::Cw => score_cw(c, &stats, &inputs.word_stats, &inputs.totals),
        Measure::Ncv => {
            let containers: Vec<u64> = inputs
                .nesting
                .get(&c.normalized)
                .into_iter()
                .flatten()
                .map(|b| inputs.stats.get(b).map_or(0, |s| s.f_d))
                .collect();
            let total = inputs.candidates.len().max(1) as f64;
            let context: Vec<(u64, f64)> = inputs
                .context_counts
                .get(&c.normalized)
                .into_iter()
                .flatten()
                .map(|(w, n)| (*n, inputs.context_spread.get(w).copied().unwrap_or(0) as f64 / total))
                .collect();
            score_ncv(c, &stats, &containers, &context)
        }
    })
}

pub fn rank_terms(inputs: &TermInputs, measure: Measure) -> Result<RankedTermList> {
    let entries = inputs
        .candidates
        .par_iter()
        .map(|c| {
            let stats = inputs.stats_of(c);
            Ok(RankedEntry {
                term: c.normalized.clone(),
                score: score_candidate(c, measure, inputs)?,
                f_d: stats.f_d,
                f_dbar: stats.f_dbar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankedTermList::new(measure, entries))
}

pub fn select_top_n(list: &RankedTermList, n: usize) -> Result<Vec<TermCandidate>> {
    if n == 0 {
        return Err(Error::Usage("top-n must be at least 1".into()));
    }
    Ok(list
        .entries
        .iter()
        .take(n)
        .filter_map(|e| TermCandidate::from_normalized(&e.term))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize_documents, CorpusTag, Document};
    use proptest::prelude::*;

    fn frame(a: &str, c: &str, b: &str) -> FrameRecord {
        FrameRecord {
            arg1: a.into(),
            connector: c.into(),
            arg2: b.into(),
            doc: "d".into(),
            sent: 1,
            rule: crate::frames::Rule::R1,
        }
    }

    fn team_frames() -> Vec<FrameRecord> {
        vec![
            frame("team", "identify", "several hazardous chemical"),
            frame("team", "identify_through", "process hazards analysis"),
            frame("several hazardous chemical", "identify_through", "process hazards analysis"),
            frame("several hazardous chemical", "in", "new process"),
        ]
    }

    fn index(texts: &[&str]) -> PhraseIndex {
        let docs: Vec<Document> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::plain(format!("d{i}"), CorpusTag::Domain, *t))
            .collect();
        PhraseIndex::new(&tokenize_documents(&docs).unwrap())
    }

    fn stats(f_d: u64, f_dbar: u64) -> TermStats {
        TermStats {
            f_d,
            f_dbar,
            context_words: BTreeSet::new(),
        }
    }

    fn cand(s: &str) -> TermCandidate {
        TermCandidate::from_normalized(s).unwrap()
    }

    #[test]
    fn candidate_structure() {
        let c = cand("several hazardous chemical");
        assert_eq!(c.head, "chemical");
        assert_eq!(c.modifiers, vec!["several", "hazardous"]);
        let c = cand("hazard of operation");
        assert_eq!(c.head, "hazard");
        assert_eq!(c.modifiers, vec!["operation"]);
        assert!(cand("process").nested_in(&cand("new process")));
        assert!(!cand("new process").nested_in(&cand("new process")));
    }

    #[test]
    fn candidates_from_frames() {
        let got: Vec<String> = collect_candidates(&team_frames()).into_iter().map(|c| c.normalized).collect();
        assert_eq!(got, vec!["new process", "process hazards analysis", "several hazardous chemical", "team"]);
        assert!(collect_candidates(&[]).is_empty());
        let dup = vec![frame("a", "x", "b"), frame("b", "y", "a")];
        assert_eq!(collect_candidates(&dup).len(), 2);
    }

    #[test]
    fn stats_count_phrases_and_harvest_context() {
        let dom = index(&[
            "The new process started. A new process failed.",
            "Every new process needs review.",
        ]);
        let con = index(&["Nothing here."]);
        let frames = vec![frame("team", "identified", "several hazardous chemical")];
        let s = compute_stats(&cand("new process"), &dom, &con, &frames);
        assert_eq!((s.f_d, s.f_dbar), (3, 0));
        let s = compute_stats(&cand("absent thing"), &dom, &con, &frames);
        assert_eq!((s.f_d, s.f_dbar), (0, 0));
        let s = compute_stats(&cand("team"), &dom, &con, &frames);
        assert!(s.context_words.contains("identified") && s.context_words.contains("chemical"));
    }

    #[test]
    fn th_reference_values() {
        let p = TermParams::default();
        let none = BTreeMap::new();
        assert!((score_th(&cand("x"), &stats(0, 0), &none, &p) - 1.0).abs() < 1e-12);
        let expected = 110f64.log10() * 102f64.log2();
        let got = score_th(&cand("x"), &stats(100, 0), &none, &p);
        assert!((got - expected).abs() < 1e-9);
        assert!((got - 13.62).abs() < 0.01);
        assert!(got > score_th(&cand("x"), &stats(10, 0), &none, &p));
    }

    #[test]
    fn th_uses_modifiers_and_context() {
        let p = TermParams::default();
        let mut ws = BTreeMap::new();
        ws.insert("big".to_string(), WordStats { f_d: 90, f_dbar: 0 });
        ws.insert("run".to_string(), WordStats { f_d: 0, f_dbar: 0 });
        let mut s = stats(0, 0);
        s.context_words.insert("run".into());
        let modifier = 100f64.log10() * 92f64.log2();
        let expected = 1.0 + 0.5 * modifier + 0.25 * 1.0;
        assert!((score_th(&cand("big tank"), &s, &ws, &p) - expected).abs() < 1e-9);
    }

    #[test]
    fn ot_reference_values() {
        let t = Totals { phrase_d: 1000, phrase_dbar: 1000, word_d: 1, word_dbar: 1 };
        let none = BTreeMap::new();
        let got = score_ot(&cand("x"), &stats(100, 1), &none, &t).unwrap();
        let expected = ((100.5f64 / 900.5) / (1.5 / 999.5)).ln();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 4.31).abs() < 0.01);
        assert_eq!(score_ot(&cand("x"), &stats(7, 7), &none, &t).unwrap(), 0.0);
        assert!(score_ot(&cand("x"), &stats(1001, 0), &none, &t).is_err());
    }

    #[test]
    fn cw_rules() {
        let t = Totals { phrase_d: 50, phrase_dbar: 50, word_d: 100, word_dbar: 100 };
        let none = BTreeMap::new();
        assert_eq!(score_cw(&cand("x"), &stats(0, 3), &none, &t), 0.0);
        let simple = score_cw(&cand("x"), &stats(4, 1), &none, &t);
        assert!((simple - 5f64.ln() * (100.0 / 6.0 + 1.0f64).ln()).abs() < 1e-12);
        let mut ws = BTreeMap::new();
        ws.insert("tank".to_string(), WordStats { f_d: 9, f_dbar: 0 });
        let head_cw = 10f64.ln() * (200.0 / 10.0 + 1.0f64).ln();
        let complex = score_cw(&cand("big tank"), &stats(5, 0), &ws, &t);
        assert!((complex - 5.0 * head_cw).abs() < 1e-12);
    }

    #[test]
    fn ncv_reference_values() {
        let c = cand("new process");
        let got = score_ncv(&c, &stats(10, 0), &[], &[]);
        assert!((got - 0.8 * 3f64.log2() * 10.0).abs() < 1e-12);
        assert!((got - 12.68).abs() < 0.01);
        assert_eq!(score_ncv(&cand("x"), &stats(0, 0), &[], &[]), 0.0);
        assert_eq!(score_ncv(&c, &stats(10, 0), &[], &[]), score_ncv(&c, &stats(10, 999), &[], &[]));
        let nested = score_ncv(&cand("x"), &stats(10, 0), &[4, 6], &[(2, 0.5)]);
        assert!((nested - (0.8 * 1.0 * 5.0 + 0.2 * 1.0)).abs() < 1e-12);
    }

    #[test]
    fn ranking_order_and_ties() {
        let list = RankedTermList::new(
            Measure::Th,
            vec![
                RankedEntry { term: "b".into(), score: 3.0, f_d: 0, f_dbar: 0 },
                RankedEntry { term: "c".into(), score: 5.0, f_d: 0, f_dbar: 0 },
                RankedEntry { term: "a".into(), score: 3.0, f_d: 0, f_dbar: 0 },
            ],
        );
        let order: Vec<&str> = list.entries.iter().map(|e| e.term.as_str()).collect();
        assert_eq!(order, vec!["c", "a", "b"]);
        let back = RankedTermList::from_tsv(Measure::Th, &list.to_tsv(), "t").unwrap();
        assert_eq!(back, list);
        assert_eq!(select_top_n(&list, 2).unwrap().len(), 2);
        assert_eq!(select_top_n(&list, 10).unwrap().len(), 3);
        assert!(select_top_n(&list, 0).is_err());
    }

    #[test]
    fn measure_names() {
        assert_eq!("ncv".parse::<Measure>().unwrap(), Measure::Ncv);
        assert!(matches!("XX".parse::<Measure>(), Err(Error::Usage(_))));
        assert_eq!(Measure::Ot.file_name(), "terms_ot.tsv");
    }

    #[test]
    fn rank_is_independent_of_frame_order() {
        let dom = index(&["The team found a new process. The new process hazards analysis ran."]);
        let con = index(&["The team won the game."]);
        let mut frames = team_frames();
        let a = TermInputs::build(&frames, &dom, &con, TermParams::default());
        frames.reverse();
        let b = TermInputs::build(&frames, &dom, &con, TermParams::default());
        for m in Measure::ALL {
            assert_eq!(rank_terms(&a, m).unwrap(), rank_terms(&b, m).unwrap());
        }
    }

    proptest! {
        #[test]
        fn th_and_ot_monotone(f_d in 0u64..500, f_dbar in 0u64..500) {
            let p = TermParams::default();
            let t = Totals { phrase_d: 1000, phrase_dbar: 1000, word_d: 1, word_dbar: 1 };
            let none = BTreeMap::new();
            let c = cand("x");
            let th = score_th(&c, &stats(f_d, f_dbar), &none, &p);
            prop_assert!(score_th(&c, &stats(f_d + 1, f_dbar), &none, &p) > th);
            prop_assert!(score_th(&c, &stats(f_d, f_dbar + 1), &none, &p) < th);
            let ot = score_ot(&c, &stats(f_d, f_dbar), &none, &t).unwrap();
            prop_assert!(score_ot(&c, &stats(f_d + 1, f_dbar), &none, &t).unwrap() > ot);
            prop_assert!(score_ot(&c, &stats(f_d, f_dbar + 1), &none, &t).unwrap() < ot);
        }
    }
}
