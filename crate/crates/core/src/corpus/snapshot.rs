use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::index::pair_key;
use super::phrase::PhraseIndex;
use crate::error::{Error, Result};

/// Offline hit counts: `f(x)`, `f(x, y)` and the universe size `N`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HitCountSnapshot {
    #[serde(rename = "N")]
    pub n: u64,
    pub unigram: BTreeMap<String, u64>,
    /// Keyed `x||y` with the two phrases in lexicographic order.
    pub pair: BTreeMap<String, u64>,
}

impl HitCountSnapshot {
    pub fn from_json(text: &str, source_name: &str) -> Result<HitCountSnapshot> {
        let snap: HitCountSnapshot =
            serde_json::from_str(text).map_err(|e| Error::json(source_name, e))?;
        snap.validate()?;
        Ok(snap)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serializes");
        s.push('\n');
        s
    }

    /// Checks `N >= f(x)`, `f(x,y) <= min(f(x), f(y))` and key shape,
    /// reporting every offending key.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (k, &v) in &self.unigram {
            if v > self.n {
                problems.push(format!("unigram `{k}` = {v} exceeds N = {}", self.n));
            }
        }
        for (k, &v) in &self.pair {
            let Some((x, y)) = k.split_once("||") else {
                problems.push(format!("pair key `{k}` lacks the `||` separator"));
                continue;
            };
            if x > y {
                problems.push(format!("pair key `{k}` is not lexicographically ordered"));
                continue;
            }
            let fx = self.unigram_count(x);
            let fy = self.unigram_count(y);
            if v > fx.min(fy) {
                problems.push(format!(
                    "pair `{k}` = {v} exceeds min(f({x}) = {fx}, f({y}) = {fy})"
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn unigram_count(&self, x: &str) -> u64 {
        self.unigram.get(x).copied().unwrap_or(0)
    }

    pub fn pair_count(&self, x: &str, y: &str) -> u64 {
        self.pair.get(&pair_key(x, y)).copied().unwrap_or(0)
    }

    /// Document-frequency fallback: `f(x)` is the number of documents that
    /// contain phrase `x`, `f(x, y)` the number containing both, and `N` the
    /// number of documents.
    pub fn from_documents(index: &PhraseIndex, phrases: &[String]) -> HitCountSnapshot {
        let sets: Vec<_> = phrases
            .iter()
            .map(|p| (p.clone(), index.documents_containing(p)))
            .collect();
        let mut snap = HitCountSnapshot {
            n: index.doc_count() as u64,
            ..Default::default()
        };
        for (p, docs) in &sets {
            if !docs.is_empty() {
                snap.unigram.insert(p.clone(), docs.len() as u64);
            }
        }
        for (i, (p, a)) in sets.iter().enumerate() {
            for (q, b) in &sets[i + 1..] {
                if p == q {
                    continue;
                }
                let both = a.intersection(b).count() as u64;
                if both > 0 {
                    snap.pair.insert(pair_key(p, q), both);
                }
            }
        }
        snap
    }
}

pub fn load_hit_count_snapshot(path: &Path) -> Result<HitCountSnapshot> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    HitCountSnapshot::from_json(&text, &path.display().to_string())
}
