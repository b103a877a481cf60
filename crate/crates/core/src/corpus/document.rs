use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::tokenize::{tokenize, Token};
use crate::error::{Error, Result};
use crate::frames::conllu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusTag {
    Domain,
    Contrastive,
}

impl fmt::Display for CorpusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusTag::Domain => f.write_str("domain"),
            CorpusTag::Contrastive => f.write_str("contrastive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Plain,
    Conllu,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Relative path without extension, `/`-separated.
    pub id: String,
    pub corpus_tag: CorpusTag,
    pub text: String,
    pub source_kind: SourceKind,
}

impl Document {
    pub fn plain(id: impl Into<String>, tag: CorpusTag, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            corpus_tag: tag,
            text: text.into(),
            source_kind: SourceKind::Plain,
        }
    }

    pub fn conllu(id: impl Into<String>, tag: CorpusTag, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            corpus_tag: tag,
            text: text.into(),
            source_kind: SourceKind::Conllu,
        }
    }

    /// Word tokens per sentence, original casing.
    ///
    /// CoNLL-U forms are passed through the plain tokenizer so punctuation
    /// rows vanish the same way they do in running text.
    pub fn sentences(&self) -> Result<Vec<Vec<Token>>> {
        match self.source_kind {
            SourceKind::Plain => Ok(tokenize(&self.text)),
            SourceKind::Conllu => {
                let parsed = conllu::parse_str(&self.text, &self.id)?;
                Ok(parsed
                    .iter()
                    .map(|sent| {
                        sent.tokens
                            .iter()
                            .flat_map(|t| tokenize(&t.form).concat())
                            .collect::<Vec<_>>()
                    })
                    .filter(|s| !s.is_empty())
                    .collect())
            }
        }
    }
}

/// A file that was not turned into a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Ingested {
    pub documents: Vec<Document>,
    pub skipped: Vec<Skipped>,
}

impl Ingested {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Reads every `.txt` and `.conllu` file below `path` into documents.
pub fn ingest_directory(path: &Path, tag: CorpusTag) -> Result<Ingested> {
    let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if !meta.is_dir() {
        return Err(Error::Ingest {
            path: path.to_path_buf(),
            reason: "not a directory".into(),
        });
    }

    let mut files = Vec::new();
    let mut skipped = Vec::new();
    for entry in WalkDir::new(path).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Ingest {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let file = entry.into_path();
        let kind = match file.extension().and_then(|e| e.to_str()) {
            Some("txt") => SourceKind::Plain,
            Some("conllu") => SourceKind::Conllu,
            _ => {
                skipped.push(Skipped {
                    path: file,
                    reason: "unsupported extension".into(),
                });
                continue;
            }
        };
        files.push((file, kind));
    }

    let loaded: Vec<Result<(Document, PathBuf)>> = files
        .into_par_iter()
        .map(|(file, kind)| {
            let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let id = document_id(path, &file);
            let doc = Document {
                id,
                corpus_tag: tag,
                text,
                source_kind: kind,
            };
            Ok((doc, file))
        })
        .collect();

    let mut documents = Vec::new();
    for item in loaded {
        let (doc, file) = item?;
        if doc.source_kind == SourceKind::Plain && doc.text.trim().is_empty() {
            skipped.push(Skipped {
                path: file,
                reason: "empty plain-text document".into(),
            });
            continue;
        }
        documents.push(doc);
    }
    documents.sort_by(|a, b| a.id.cmp(&b.id));
    for pair in documents.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(Error::Ingest {
                path: path.to_path_buf(),
                reason: format!("duplicate document id `{}`", pair[0].id),
            });
        }
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(path.to_path_buf()));
    }
    skipped.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(Ingested { documents, skipped })
}

fn document_id(root: &Path, file: &Path) -> String {
    let rel = file.strip_prefix(root).unwrap_or(file).with_extension("");
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn txt_and_conllu_become_documents() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.conllu"), "1\tRisk\trisk\tNOUN\t_\t_\t0\troot\t_\t_\n").unwrap();
        fs::write(dir.path().join("a.txt"), "Risk is real.").unwrap();
        let got = ingest_directory(dir.path(), CorpusTag::Domain).unwrap();
        let ids: Vec<_> = got.documents.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);
        assert_eq!(got.documents[1].source_kind, SourceKind::Conllu);
        assert_eq!(got.skipped_count(), 0);
    }

    #[test]
    fn empty_dir_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = ingest_directory(dir.path(), CorpusTag::Domain).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus(_)));
    }

    #[test]
    fn other_extensions_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "Some text.").unwrap();
        fs::write(dir.path().join("a.pdf"), "%PDF").unwrap();
        let got = ingest_directory(dir.path(), CorpusTag::Contrastive).unwrap();
        assert_eq!(got.documents.len(), 1);
        assert_eq!(got.skipped_count(), 1);
        assert!(got.skipped[0].path.ends_with("a.pdf"));
    }

    #[test]
    fn nested_ids_use_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("news")).unwrap();
        fs::write(dir.path().join("news/x.txt"), "Text.").unwrap();
        let got = ingest_directory(dir.path(), CorpusTag::Contrastive).unwrap();
        assert_eq!(got.documents[0].id, "news/x");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "Text.").unwrap();
        fs::write(dir.path().join("a.conllu"), "1\tText\ttext\tNOUN\t_\t_\t0\troot\t_\t_\n").unwrap();
        assert!(matches!(
            ingest_directory(dir.path(), CorpusTag::Domain),
            Err(Error::Ingest { .. })
        ));
    }

    #[test]
    fn missing_path_is_io_error() {
        let err = ingest_directory(Path::new("/definitely/not/here"), CorpusTag::Domain).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
