//! Evaluation: contingency-table metrics, lexical overlap and ontological
//! loss against a benchmark concept set, and the ranked frequency report.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::corpus::singularize;
use crate::error::{Error, Result};
use crate::ontology::{ConceptKind, OntologyGraph};
use crate::termhood::{Measure, RankedTermList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: Option<u64>,
    pub tn: Option<u64>,
}

impl ContingencyTable {
    /// Precision-only table: without a gold standard FN and TN are unknown.
    pub fn judged(tp: u64, fp: u64) -> Self {
        ContingencyTable { tp, fp, fn_: None, tn: None }
    }

    pub fn full(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ContingencyTable {
            tp,
            fp,
            fn_: Some(fn_),
            tn: Some(tn),
        }
    }

    /// Checks `TP + FP + FN + TN = |TC|`.
    pub fn check_total(&self, candidates: u64) -> Result<()> {
        let (Some(fn_), Some(tn)) = (self.fn_, self.tn) else {
            return Err(Error::MetricUnavailable("FN and TN are needed for the total"));
        };
        let sum = self.tp + self.fp + fn_ + tn;
        if sum != candidates {
            return Err(Error::Inconsistent(format!("TP+FP+FN+TN = {sum} but |TC| = {candidates}")));
        }
        Ok(())
    }
}

fn ratio(num: u64, den: u64, what: &'static str) -> Result<f64> {
    if den == 0 {
        Err(Error::MetricUnavailable(what))
    } else {
        Ok(num as f64 / den as f64)
    }
}

pub fn precision(t: &ContingencyTable) -> Result<f64> {
    ratio(t.tp, t.tp + t.fp, "precision: no positive predictions")
}

pub fn recall(t: &ContingencyTable) -> Result<f64> {
    let fn_ = t.fn_.ok_or(Error::MetricUnavailable("recall: FN unavailable"))?;
    ratio(t.tp, t.tp + fn_, "recall: no positive cases")
}

pub fn f1(t: &ContingencyTable) -> Result<f64> {
    let (p, r) = (precision(t)?, recall(t)?);
    Ok(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) })
}

pub fn accuracy(t: &ContingencyTable) -> Result<f64> {
    let fn_ = t.fn_.ok_or(Error::MetricUnavailable("accuracy: FN unavailable"))?;
    let tn = t.tn.ok_or(Error::MetricUnavailable("accuracy: TN unavailable"))?;
    ratio(t.tp + tn, t.tp + t.fp + fn_ + tn, "accuracy: empty table")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConcept {
    pub id: String,
    pub label: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub seed_terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConceptSet {
    pub concepts: Vec<BenchmarkConcept>,
    #[serde(default)]
    pub excluded: Vec<Exclusion>,
}

impl BenchmarkConceptSet {
    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        let set: BenchmarkConceptSet = serde_json::from_str(text).map_err(|e| Error::json(source_name, e))?;
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut ids = BTreeSet::new();
        for c in &self.concepts {
            if !ids.insert(c.id.as_str()) {
                problems.push(format!("duplicate concept id `{}`", c.id));
            }
        }
        for e in &self.excluded {
            if !ids.contains(e.id.as_str()) {
                problems.push(format!("excluded id `{}` is not a concept", e.id));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Concepts that count towards |C_m|.
    pub fn active(&self) -> Vec<&BenchmarkConcept> {
        let excluded: BTreeSet<&str> = self.excluded.iter().map(|e| e.id.as_str()).collect();
        self.concepts.iter().filter(|c| !excluded.contains(c.id.as_str())).collect()
    }
}

/// Lowercased words, each singularized.
pub fn normalize_label(s: &str) -> String {
    s.split_whitespace()
        .map(|w| singularize(&w.to_lowercase()))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveredConcept {
    pub id: String,
    pub label: String,
    pub members: BTreeSet<String>,
}

impl DiscoveredConcept {
    /// Regular concepts of `g`; outlier groups are not concepts.
    pub fn from_graph(g: &OntologyGraph) -> Vec<DiscoveredConcept> {
        g.concepts
            .iter()
            .filter(|c| c.kind == ConceptKind::Concept)
            .map(|c| DiscoveredConcept {
                id: c.id.clone(),
                label: c.label.clone(),
                members: c.member_terms.iter().cloned().collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    Label,
    MemberOverlap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptMatch {
    pub benchmark: String,
    pub concept: String,
    pub kind: MatchKind,
    /// Share of the benchmark concept's seed terms among the members.
    pub overlap: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overlap {
    pub lo: Ratio<u64>,
    pub matched: Vec<ConceptMatch>,
    pub missed: Vec<String>,
}

pub fn lo_ratio(matched: u64, total: u64) -> Result<Ratio<u64>> {
    if total == 0 || matched > total {
        return Err(Error::Usage(format!("need 0 < |C_m| and matches ≤ |C_m|, got {matched}/{total}")));
    }
    Ok(Ratio::new(matched, total))
}

pub fn ol_ratio(missed: u64, total: u64) -> Result<Ratio<u64>> {
    lo_ratio(missed, total)
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Matches benchmark concepts to discovered ones, one to one.
///
/// A pair is eligible when the discovered label equals the benchmark label
/// or a synonym, or when at least `tau` of the benchmark seed terms are
/// members and at least `tau` of the members that are seed terms of any
/// benchmark concept belong to this one. Pairs are taken greedily: label
/// matches first, then higher overlap, fewer members, concept id.
pub fn lexical_overlap(discovered: &[DiscoveredConcept], benchmark: &BenchmarkConceptSet, tau: f64) -> Result<Overlap> {
    let active = benchmark.active();
    if active.is_empty() {
        return Err(Error::Usage("benchmark has no active concepts".into()));
    }
    let seeds: Vec<BTreeSet<String>> = active
        .iter()
        .map(|m| m.seed_terms.iter().map(|s| normalize_label(s)).collect())
        .collect();
    let any_seed: BTreeSet<&String> = seeds.iter().flatten().collect();
    let members: Vec<BTreeSet<String>> = discovered
        .iter()
        .map(|d| d.members.iter().map(|s| normalize_label(s)).collect())
        .collect();
    // (label match, overlap, member count, concept id, benchmark index, concept index)
    type Pair<'a> = (bool, Ratio<u64>, usize, &'a str, usize, usize);
    let mut pairs: Vec<Pair> = Vec::new();
    for (mi, m) in active.iter().enumerate() {
        let names: BTreeSet<String> = std::iter::once(&m.label)
            .chain(&m.synonyms)
            .map(|s| normalize_label(s))
            .collect();
        for (di, d) in discovered.iter().enumerate() {
            let label = names.contains(&normalize_label(&d.label));
            let hits = seeds[mi].intersection(&members[di]).count() as u64;
            let overlap = if seeds[mi].is_empty() {
                Ratio::from_integer(0)
            } else {
                Ratio::new(hits, seeds[mi].len() as u64)
            };
            let seeded = members[di].iter().filter(|s| any_seed.contains(s)).count() as u64;
            let pure = seeded > 0 && hits as f64 >= tau * seeded as f64;
            let by_members = hits > 0 && ratio_to_f64(overlap) >= tau && pure;
            if label || by_members {
                pairs.push((label, overlap, d.members.len(), &d.id, mi, di));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(b.1.cmp(&a.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(b.3))
            .then(active[a.4].id.cmp(&active[b.4].id))
    });
    let mut used_m = BTreeSet::new();
    let mut used_d = BTreeSet::new();
    let mut matched = Vec::new();
    for (label, overlap, _, _, mi, di) in pairs {
        if used_m.contains(&mi) || used_d.contains(&di) {
            continue;
        }
        used_m.insert(mi);
        used_d.insert(di);
        matched.push(ConceptMatch {
            benchmark: active[mi].id.clone(),
            concept: discovered[di].id.clone(),
            kind: if label { MatchKind::Label } else { MatchKind::MemberOverlap },
            overlap: overlap.to_string(),
        });
    }
    matched.sort_by(|a, b| a.benchmark.cmp(&b.benchmark));
    let missed: Vec<String> = active
        .iter()
        .enumerate()
        .filter(|(i, _)| !used_m.contains(i))
        .map(|(_, m)| m.id.clone())
        .collect();
    Ok(Overlap {
        lo: lo_ratio(matched.len() as u64, active.len() as u64)?,
        matched,
        missed,
    })
}

pub fn ontological_loss(overlap: &Overlap) -> Ratio<u64> {
    Ratio::new(overlap.missed.len() as u64, (overlap.matched.len() + overlap.missed.len()) as u64)
}

/// Relevance judgments: `term<TAB>0|1` per line.
pub fn load_judgments(text: &str, source_name: &str) -> Result<BTreeMap<String, bool>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (term, flag) = line.split_once('\t').ok_or_else(|| Error::Parse {
            source_name: source_name.to_string(),
            line: i + 1,
            reason: "expected term<TAB>0|1".into(),
        })?;
        let relevant = match flag.trim() {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    line: i + 1,
                    reason: format!("bad judgment `{other}`"),
                })
            }
        };
        out.insert(normalize_label(term), relevant);
    }
    Ok(out)
}

/// Contingency table over the top `n` entries; unjudged terms count as
/// not relevant.
pub fn judge_top_n(list: &RankedTermList, n: usize, judgments: &BTreeMap<String, bool>) -> ContingencyTable {
    let mut t = ContingencyTable::judged(0, 0);
    for e in list.entries.iter().take(n) {
        if judgments.get(&normalize_label(&e.term)).copied().unwrap_or(false) {
            t.tp += 1;
        } else {
            t.fp += 1;
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecileSummary {
    pub decile: usize,
    pub from_rank: usize,
    pub to_rank: usize,
    pub mean_f_d: f64,
    pub mean_f_dbar: f64,
}

/// Decile `k` covers ranks `ceil(k·n/10)+1 ..= ceil((k+1)·n/10)`; empty
/// deciles are omitted.
pub fn decile_summary(list: &RankedTermList) -> Vec<DecileSummary> {
    let n = list.len();
    let start = |k: usize| (k * n).div_ceil(10);
    (0..10)
        .filter(|&k| start(k) < start(k + 1))
        .map(|k| {
            let part = &list.entries[start(k)..start(k + 1)];
            let len = part.len() as f64;
            DecileSummary {
                decile: k + 1,
                from_rank: start(k) + 1,
                to_rank: start(k + 1),
                mean_f_d: part.iter().map(|e| e.f_d as f64).sum::<f64>() / len,
                mean_f_dbar: part.iter().map(|e| e.f_dbar as f64).sum::<f64>() / len,
            }
        })
        .collect()
}

/// Ranked rows, a blank line, then the decile summary.
pub fn frequency_distribution_report(list: &RankedTermList) -> Result<String> {
    if list.is_empty() {
        return Err(Error::EmptyInput("ranked term list"));
    }
    let csv_err = |e: csv::Error| Error::Inconsistent(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "term", "score", "f_d", "f_dbar"]).map_err(csv_err)?;
    for (i, e) in list.entries.iter().enumerate() {
        w.write_record([(i + 1).to_string(), e.term.clone(), e.score.to_string(), e.f_d.to_string(), e.f_dbar.to_string()])
            .map_err(csv_err)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| Error::Inconsistent(e.to_string()))?).expect("csv is utf-8");
    out.push('\n');
    out.push_str("decile,from_rank,to_rank,mean_f_d,mean_f_dbar\n");
    for d in decile_summary(list) {
        out.push_str(&format!("{},{},{},{},{}\n", d.decile, d.from_rank, d.to_rank, d.mean_f_d, d.mean_f_dbar));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub measure: Measure,
    pub top_n: usize,
    pub precision_at_n: Option<f64>,
    pub benchmark_concepts: usize,
    pub discovered_concepts: usize,
    pub lo: String,
    pub lo_value: f64,
    pub ol: String,
    pub ol_value: f64,
    pub matched: Vec<ConceptMatch>,
    pub missed: Vec<String>,
}

impl EvalReport {
    pub fn build(
        measure: Measure,
        top_n: usize,
        precision_at_n: Option<f64>,
        discovered: &[DiscoveredConcept],
        benchmark: &BenchmarkConceptSet,
        tau: f64,
    ) -> Result<EvalReport> {
        let overlap = lexical_overlap(discovered, benchmark, tau)?;
        let ol = ontological_loss(&overlap);
        Ok(EvalReport {
            measure,
            top_n,
            precision_at_n,
            benchmark_concepts: benchmark.active().len(),
            discovered_concepts: discovered.len(),
            lo: overlap.lo.to_string(),
            lo_value: ratio_to_f64(overlap.lo),
            ol: ol.to_string(),
            ol_value: ratio_to_f64(ol),
            matched: overlap.matched,
            missed: overlap.missed,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termhood::RankedEntry;
    use proptest::prelude::*;

    #[test]
    fn contingency_metrics() {
        let t = ContingencyTable::judged(210, 90);
        assert!((precision(&t).unwrap() - 0.70).abs() < 1e-12);
        assert_eq!(precision(&ContingencyTable::judged(0, 300)).unwrap(), 0.0);
        assert!(matches!(recall(&t), Err(Error::MetricUnavailable(_))));
        assert!(matches!(accuracy(&t), Err(Error::MetricUnavailable(_))));
        let half = ContingencyTable::full(1, 1, 1, 0);
        assert!((f1(&half).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(f1(&ContingencyTable::full(0, 3, 3, 0)).unwrap(), 0.0);
        half.check_total(3).unwrap();
        assert!(half.check_total(4).is_err());
    }

    #[test]
    fn overlap_ratios_are_exact() {
        assert_eq!(lo_ratio(11, 16).unwrap(), Ratio::new(11, 16));
        assert_eq!(ratio_to_f64(lo_ratio(11, 16).unwrap()), 0.6875);
        assert_eq!(ratio_to_f64(ol_ratio(5, 16).unwrap()), 0.3125);
        let v = ratio_to_f64(lo_ratio(11, 12).unwrap());
        assert!((0.9166..=0.9167).contains(&v));
        assert!(lo_ratio(1, 0).is_err());
    }

    fn bench(concepts: &[(&str, &str, &[&str])]) -> BenchmarkConceptSet {
        BenchmarkConceptSet {
            concepts: concepts
                .iter()
                .map(|(id, label, seeds)| BenchmarkConcept {
                    id: id.to_string(),
                    label: label.to_string(),
                    synonyms: vec![],
                    seed_terms: seeds.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
            excluded: vec![],
        }
    }

    fn found(id: &str, label: &str, members: &[&str]) -> DiscoveredConcept {
        DiscoveredConcept {
            id: id.into(),
            label: label.into(),
            members: members.iter().map(|m| m.to_string()).collect(),
        }
    }

    #[test]
    fn matching_by_label_and_members() {
        let b = bench(&[
            ("m1", "Checklists", &["checklist"]),
            ("m2", "HAZOP", &["guide word", "deviation", "node"]),
            ("m3", "FMEA", &["failure mode"]),
        ]);
        let d = vec![
            found("d1", "checklist", &["checklist", "audit"]),
            found("d2", "deviation", &["deviation", "guide words"]),
            found("root", "checklist", &["checklist", "audit", "deviation", "guide word", "failure mode"]),
        ];
        let o = lexical_overlap(&d, &b, 0.5).unwrap();
        let pairs: Vec<(&str, &str, MatchKind)> = o.matched.iter().map(|m| (m.benchmark.as_str(), m.concept.as_str(), m.kind)).collect();
        assert_eq!(pairs, vec![("m1", "d1", MatchKind::Label), ("m2", "d2", MatchKind::MemberOverlap)]);
        assert_eq!(o.missed, vec!["m3".to_string()]);
        assert_eq!(o.lo, Ratio::new(2, 3));
        assert_eq!(ontological_loss(&o), Ratio::new(1, 3));
    }

    #[test]
    fn nothing_discovered() {
        let b = bench(&[("m1", "a", &["a"])]);
        let o = lexical_overlap(&[], &b, 0.5).unwrap();
        assert_eq!(o.lo, Ratio::from_integer(0));
        assert_eq!(ontological_loss(&o), Ratio::from_integer(1));
        assert!(lexical_overlap(&[], &BenchmarkConceptSet::default(), 0.5).is_err());
    }

    #[test]
    fn exclusions_shrink_the_benchmark() {
        let mut b = bench(&[("m1", "a", &[]), ("m2", "b", &[])]);
        b.excluded.push(Exclusion { id: "m2".into(), reason: "r".into() });
        assert_eq!(b.active().len(), 1);
        let text = serde_json::to_string(&b).unwrap();
        assert_eq!(BenchmarkConceptSet::from_json(&text, "t").unwrap(), b);
        b.excluded.push(Exclusion { id: "zz".into(), reason: "r".into() });
        assert!(b.validate().is_err());
    }

    fn list(n: usize) -> RankedTermList {
        RankedTermList::new(
            Measure::Ot,
            (0..n)
                .map(|i| RankedEntry { term: format!("t{i:02}"), score: (n - i) as f64, f_d: (n - i) as u64, f_dbar: i as u64 })
                .collect(),
        )
    }

    #[test]
    fn frequency_report_layout() {
        let text = frequency_distribution_report(&list(10)).unwrap();
        let (rows, summary) = text.split_once("\n\n").unwrap();
        assert_eq!(rows.lines().count(), 11);
        assert_eq!(summary.lines().count(), 11);
        let scores: Vec<f64> = rows.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
        assert!(scores.windows(2).all(|w| w[0] > w[1]));
        assert!(frequency_distribution_report(&list(0)).is_err());
        let deciles = decile_summary(&list(25));
        assert_eq!(deciles.iter().map(|d| d.to_rank - d.from_rank + 1).sum::<usize>(), 25);
        assert_eq!(deciles[0].from_rank, 1);
    }

    #[test]
    fn judgments_feed_precision() {
        let j = load_judgments("t00\t1\nt01\t0\n", "j").unwrap();
        let t = judge_top_n(&list(5), 3, &j);
        assert_eq!((t.tp, t.fp), (1, 2));
        assert!(load_judgments("t00\tyes\n", "j").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn lo_plus_ol_is_one(nm in 1usize..20, nd in 0usize..20, seed_bits in prop::collection::vec(any::<u32>(), 40)) {
            let pool: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
            let pick = |bits: u32| -> Vec<String> { pool.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, w)| w.clone()).collect() };
            let b = BenchmarkConceptSet {
                concepts: (0..nm).map(|i| BenchmarkConcept { id: format!("m{i}"), label: format!("w{}", i % 12), synonyms: vec![], seed_terms: pick(seed_bits[i]) }).collect(),
                excluded: vec![],
            };
            let d: Vec<DiscoveredConcept> = (0..nd).map(|i| DiscoveredConcept { id: format!("d{i}"), label: format!("w{}", (i * 7) % 12), members: pick(seed_bits[20 + i]).into_iter().collect() }).collect();
            let o = lexical_overlap(&d, &b, 0.5).unwrap();
            prop_assert_eq!(o.lo + ontological_loss(&o), Ratio::from_integer(1));
            prop_assert!(o.matched.len() <= nd.min(nm));
            let concepts: BTreeSet<&String> = o.matched.iter().map(|m| &m.concept).collect();
            prop_assert_eq!(concepts.len(), o.matched.len());
        }

        #[test]
        fn metric_bounds(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500, tn in 0u64..500) {
            let t = ContingencyTable::full(tp, fp, fn_, tn);
            t.check_total(tp + fp + fn_ + tn).unwrap();
            if let (Ok(p), Ok(r)) = (precision(&t), recall(&t)) {
                let f = f1(&t).unwrap();
                prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r));
                prop_assert!(f <= p.max(r) + 1e-12 && f >= 0.0);
            }
            if let Ok(a) = accuracy(&t) {
                prop_assert!((0.0..=1.0).contains(&a));
            }
        }
    }
}
