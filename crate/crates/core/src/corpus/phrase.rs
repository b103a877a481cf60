use std::collections::{BTreeSet, HashMap};

use super::index::TokenizedDoc;
use super::tokenize::singularize;

/// Positional index answering contiguous phrase-occurrence queries.
///
/// A phrase word matches a corpus token when the token equals it or the
/// token's singular form equals it, so `several hazardous chemical`
/// matches `several hazardous chemicals`.
#[derive(Debug, Clone, Default)]
pub struct PhraseIndex {
    sentences: Vec<Vec<String>>,
    sentence_doc: Vec<u32>,
    doc_ids: Vec<String>,
    postings: HashMap<String, Vec<(u32, u32)>>,
}

fn matches(phrase_word: &str, token: &str) -> bool {
    token == phrase_word || singularize(token) == phrase_word
}

impl PhraseIndex {
    pub fn new(docs: &[TokenizedDoc]) -> PhraseIndex {
        let mut index = PhraseIndex::default();
        for (d, doc) in docs.iter().enumerate() {
            index.doc_ids.push(doc.id.clone());
            for sentence in &doc.sentences {
                let s = index.sentences.len() as u32;
                for (p, tok) in sentence.iter().enumerate() {
                    let p = p as u32;
                    index.postings.entry(tok.clone()).or_default().push((s, p));
                    let single = singularize(tok);
                    if single != *tok {
                        index.postings.entry(single).or_default().push((s, p));
                    }
                }
                index.sentences.push(sentence.clone());
                index.sentence_doc.push(d as u32);
            }
        }
        index
    }

    fn occurrences<'a>(&'a self, words: &'a [String]) -> impl Iterator<Item = (u32, u32)> + 'a {
        let first = words.first().and_then(|w| self.postings.get(w));
        first.into_iter().flatten().copied().filter(move |&(s, p)| {
            let sentence = &self.sentences[s as usize];
            let p = p as usize;
            p + words.len() <= sentence.len()
                && words
                    .iter()
                    .zip(&sentence[p..p + words.len()])
                    .all(|(w, t)| matches(w, t))
        })
    }

    /// Number of contiguous occurrences of `words` (lowercased).
    pub fn count(&self, words: &[String]) -> u64 {
        if words.is_empty() {
            return 0;
        }
        self.occurrences(words).count() as u64
    }

    pub fn count_phrase(&self, phrase: &str) -> u64 {
        self.count(&split_phrase(phrase))
    }

    /// Indices of documents containing the phrase at least once.
    pub fn documents_containing(&self, phrase: &str) -> BTreeSet<u32> {
        let words = split_phrase(phrase);
        if words.is_empty() {
            return BTreeSet::new();
        }
        self.occurrences(&words)
            .map(|(s, _)| self.sentence_doc[s as usize])
            .collect()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.sentences.iter().map(|s| s.len() as u64).sum()
    }
}

pub fn split_phrase(phrase: &str) -> Vec<String> {
    phrase.split_whitespace().map(str::to_lowercase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{tokenize_documents, CorpusTag, Document};

    fn index(texts: &[&str]) -> PhraseIndex {
        let docs: Vec<_> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::plain(format!("d{i}"), CorpusTag::Domain, *t))
            .collect();
        PhraseIndex::new(&tokenize_documents(&docs).unwrap())
    }

    #[test]
    fn counts_contiguous_occurrences() {
        let idx = index(&[
            "The new process is safe. A new process was built.",
            "The new process failed. Process new.",
        ]);
        assert_eq!(idx.count_phrase("new process"), 3);
        assert_eq!(idx.count_phrase("process"), 4);
        assert_eq!(idx.count_phrase("absent phrase"), 0);
        assert_eq!(idx.documents_containing("new process").len(), 2);
    }

    #[test]
    fn plural_tokens_match_singular_words() {
        let idx = index(&["Several hazardous chemicals were stored with one hazardous chemical."]);
        assert_eq!(idx.count_phrase("several hazardous chemical"), 1);
        assert_eq!(idx.count_phrase("hazardous chemical"), 2);
        assert_eq!(idx.count_phrase("hazardous chemicals"), 1);
    }

    #[test]
    fn does_not_cross_sentences() {
        let idx = index(&["It was new. Process control matters."]);
        assert_eq!(idx.count_phrase("new process"), 0);
    }
}
