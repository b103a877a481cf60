//! Corpus ingestion, tokenization, and the frequency indices every phase
//! reads from.

mod document;
mod index;
mod phrase;
mod snapshot;
mod tokenize;

pub use document::{ingest_directory, CorpusTag, Document, Ingested, Skipped, SourceKind};
pub use index::{
    build_frequency_index, pair_key, tokenize_documents, FrequencyIndex, TokenizedDoc,
    DEFAULT_WINDOW,
};
pub use phrase::{split_phrase, PhraseIndex};
pub use snapshot::{load_hit_count_snapshot, HitCountSnapshot};
pub use tokenize::{singularize, tokenize, tokenize_lower, Sentence, Token};
