//! Text processing: parsed sentences in, noun-phrase chunks and
//! `<arg1, connector, arg2>` frames out.

pub mod conllu;
mod extract;
mod phrase;
mod unithood;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use conllu::{load_conllu, parse_str, ParseToken, ParsedSentence};
pub use extract::{extract_frames, read_jsonl, write_jsonl, FrameRecord, Rule, TernaryFrame};
pub use phrase::{normalize_phrase, NounPhrase};
pub use unithood::{
    base_chunks, chunk_noun_phrases, odds_of_unithood, odds_of_unithood_score, unithood,
    unithood_score, ChunkParams, Chunking, MergeDecision, UnitEvidence,
};

use crate::corpus::{Document, PhraseIndex, SourceKind};
use crate::error::Result;

#[derive(Debug, Clone, Default)]
pub struct DocumentFrames {
    pub frames: Vec<TernaryFrame>,
    pub decisions: Vec<MergeDecision>,
}

/// Chunks and extracts frames from every sentence of a CoNLL-U document.
pub fn process_document(doc: &Document, phrases: &PhraseIndex, params: &ChunkParams) -> Result<DocumentFrames> {
    let sentences = load_conllu(doc)?;
    let mut out = DocumentFrames::default();
    for (i, sentence) in sentences.iter().enumerate() {
        let chunking = chunk_noun_phrases(sentence, phrases, params);
        out.frames
            .extend(extract_frames(sentence, &chunking.phrases, &doc.id, i + 1));
        out.decisions.extend(chunking.decisions);
    }
    Ok(out)
}

/// Frames from all CoNLL-U documents in `docs`, in document then sentence
/// order. Plain documents are ignored.
pub fn process_corpus(docs: &[Document], phrases: &PhraseIndex, params: &ChunkParams) -> Result<DocumentFrames> {
    let parts: Vec<DocumentFrames> = docs
        .par_iter()
        .filter(|d| d.source_kind == SourceKind::Conllu)
        .map(|d| process_document(d, phrases, params))
        .collect::<Result<_>>()?;
    let mut all = DocumentFrames::default();
    for p in parts {
        all.frames.extend(p.frames);
        all.decisions.extend(p.decisions);
    }
    Ok(all)
}

/// Uniform sample of `k` records without replacement, kept in input order.
/// Returns everything when `k >= records.len()`.
pub fn sample_frames(records: &[FrameRecord], k: usize, seed: u64) -> Vec<FrameRecord> {
    if k >= records.len() {
        return records.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, records.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| records[i].clone()).collect()
}
