use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::document::{CorpusTag, Document};
use crate::error::Result;

pub const DEFAULT_WINDOW: usize = 5;

/// A document reduced to lowercased word sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub id: String,
    pub tag: CorpusTag,
    pub sentences: Vec<Vec<String>>,
}

pub fn tokenize_documents(docs: &[Document]) -> Result<Vec<TokenizedDoc>> {
    docs.par_iter()
        .map(|d| {
            let sentences = d
                .sentences()?
                .into_iter()
                .map(|s| s.iter().map(|t| t.lower()).collect())
                .collect();
            Ok(TokenizedDoc {
                id: d.id.clone(),
                tag: d.corpus_tag,
                sentences,
            })
        })
        .collect()
}

/// Joins an unordered word pair into its canonical `a||b` key.
pub fn pair_key(a: &str, b: &str) -> String {
    if a <= b {
        format!("{a}||{b}")
    } else {
        format!("{b}||{a}")
    }
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Token and window co-occurrence counts over one corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyIndex {
    pub window: usize,
    pub unigram_counts: BTreeMap<String, u64>,
    /// Keyed by `a||b` with `a <= b`.
    pub pair_window_counts: BTreeMap<String, u64>,
    pub doc_frequency: BTreeMap<String, u64>,
    pub total_tokens: u64,
    pub total_docs: u64,
}

#[derive(Default)]
struct Partial {
    unigram: HashMap<String, u64>,
    pair: HashMap<(String, String), u64>,
    docs: HashMap<String, u64>,
    tokens: u64,
    nonempty_docs: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (k, v) in other.unigram {
            *self.unigram.entry(k).or_default() += v;
        }
        for (k, v) in other.pair {
            *self.pair.entry(k).or_default() += v;
        }
        for (k, v) in other.docs {
            *self.docs.entry(k).or_default() += v;
        }
        self.tokens += other.tokens;
        self.nonempty_docs += other.nonempty_docs;
        self
    }
}

fn count_doc(doc: &TokenizedDoc, window: usize) -> Partial {
    let mut p = Partial::default();
    let mut seen = BTreeSet::new();
    for sentence in &doc.sentences {
        for (i, word) in sentence.iter().enumerate() {
            *p.unigram.entry(word.clone()).or_default() += 1;
            p.tokens += 1;
            seen.insert(word.as_str());
            // Each anchor contributes at most once per partner word, so a
            // pair count never exceeds the token total.
            let upper = (i + window).min(sentence.len() - 1);
            let partners: BTreeSet<&str> = sentence[i + 1..=upper]
                .iter()
                .map(String::as_str)
                .filter(|w| *w != word)
                .collect();
            for partner in partners {
                let (a, b) = ordered(word, partner);
                *p.pair.entry((a.to_string(), b.to_string())).or_default() += 1;
            }
        }
    }
    if !seen.is_empty() {
        p.nonempty_docs = 1;
    }
    for w in seen {
        p.docs.insert(w.to_string(), 1);
    }
    p
}

impl FrequencyIndex {
    /// Builds the index from already tokenized documents.
    ///
    /// Pairs are unordered, sentence-bounded, and formed between an anchor
    /// token and each distinct different word among the next `window`
    /// tokens. The merge is order independent, so the result does not
    /// depend on thread scheduling.
    pub fn from_tokenized(docs: &[TokenizedDoc], window: usize) -> FrequencyIndex {
        let window = window.max(1);
        let merged = docs
            .par_iter()
            .map(|d| count_doc(d, window))
            .reduce(Partial::default, Partial::merge);
        FrequencyIndex {
            window,
            unigram_counts: merged.unigram.into_iter().collect(),
            pair_window_counts: merged
                .pair
                .into_iter()
                .map(|((a, b), v)| (format!("{a}||{b}"), v))
                .collect(),
            doc_frequency: merged.docs.into_iter().collect(),
            total_tokens: merged.tokens,
            total_docs: merged.nonempty_docs,
        }
    }

    pub fn unigram(&self, word: &str) -> u64 {
        self.unigram_counts.get(word).copied().unwrap_or(0)
    }

    pub fn pair(&self, a: &str, b: &str) -> u64 {
        self.pair_window_counts
            .get(&pair_key(a, b))
            .copied()
            .unwrap_or(0)
    }

    pub fn doc_freq(&self, word: &str) -> u64 {
        self.doc_frequency.get(word).copied().unwrap_or(0)
    }

    /// Iterates pair entries as `(a, b, count)` with `a <= b`.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.pair_window_counts.iter().filter_map(|(k, &v)| {
            let (a, b) = k.split_once("||")?;
            Some((a, b, v))
        })
    }
}

/// Tokenizes `docs` and counts them.
pub fn build_frequency_index(docs: &[Document], window: usize) -> Result<FrequencyIndex> {
    let tokenized = tokenize_documents(docs)?;
    Ok(FrequencyIndex::from_tokenized(&tokenized, window))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plain(texts: &[&str]) -> Vec<Document> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::plain(format!("d{i}"), CorpusTag::Domain, *t))
            .collect()
    }

    #[test]
    fn hand_counted_pairs() {
        let idx = build_frequency_index(&plain(&["a b a"]), 5).unwrap();
        assert_eq!(idx.unigram("a"), 2);
        assert_eq!(idx.unigram("b"), 1);
        assert_eq!(idx.pair("a", "b"), 2);
        assert_eq!(idx.pair("b", "a"), 2);
        assert_eq!(idx.pair_window_counts.len(), 1);
        assert_eq!(idx.total_tokens, 3);
        assert_eq!(idx.doc_freq("a"), 1);
    }

    #[test]
    fn empty_doc_gives_zero_index() {
        let idx = build_frequency_index(&plain(&[""]), 5).unwrap();
        assert_eq!(idx.total_tokens, 0);
        assert_eq!(idx.total_docs, 0);
        assert!(idx.unigram_counts.is_empty());
        assert!(idx.pair_window_counts.is_empty());
    }

    #[test]
    fn window_and_sentence_bounds() {
        let idx = build_frequency_index(&plain(&["a b c. D e"]), 1).unwrap();
        assert_eq!(idx.pair("a", "b"), 1);
        assert_eq!(idx.pair("a", "c"), 0);
        assert_eq!(idx.pair("c", "d"), 0);
        assert_eq!(idx.pair("d", "e"), 1);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let docs = plain(&["risk of fire", "fire and explosion risk", "the risk", "x y z x y"]);
        let tok = tokenize_documents(&docs).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| FrequencyIndex::from_tokenized(&tok, 3));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| FrequencyIndex::from_tokenized(&tok, 3));
        assert_eq!(
            serde_json::to_string(&single).unwrap(),
            serde_json::to_string(&many).unwrap()
        );
    }

    proptest! {
        #[test]
        fn count_consistency(
            docs in prop::collection::vec("[abcde ]{0,30}", 1..6),
            window in 1usize..7,
        ) {
            let refs: Vec<&str> = docs.iter().map(String::as_str).collect();
            let idx = build_frequency_index(&plain(&refs), window).unwrap();
            prop_assert_eq!(idx.unigram_counts.values().sum::<u64>(), idx.total_tokens);
            for (a, b, n) in idx.pairs() {
                prop_assert!(idx.unigram_counts.contains_key(a));
                prop_assert!(idx.unigram_counts.contains_key(b));
                prop_assert!(n <= idx.total_tokens);
            }
            for &df in idx.doc_frequency.values() {
                prop_assert!(df <= idx.total_docs);
            }
            let again = build_frequency_index(&plain(&refs), window).unwrap();
            prop_assert_eq!(idx, again);
        }
    }
}
