//! Minimal CoNLL-U reader: ten tab-separated columns, `#` comments, blank
//! lines between sentences. Multiword-token ranges (`3-4`) and empty nodes
//! (`5.1`) are skipped.

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, SourceKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseToken {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    /// Governor index, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl ParseToken {
    pub fn is_noun(&self) -> bool {
        matches!(self.upos.as_str(), "NOUN" | "PROPN")
    }

    /// Relation label without its subtype (`nsubj:pass` → `nsubj`).
    pub fn base_rel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    pub fn lemma_or_form(&self) -> String {
        if self.lemma.is_empty() || self.lemma == "_" {
            self.form.to_lowercase()
        } else {
            self.lemma.to_lowercase()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub tokens: Vec<ParseToken>,
}

impl ParsedSentence {
    pub fn token(&self, index: usize) -> Option<&ParseToken> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Dependents of `index`, in sentence order.
    pub fn children(&self, index: usize) -> impl Iterator<Item = &ParseToken> {
        self.tokens.iter().filter(move |t| t.head == index)
    }
}

pub fn load_conllu(doc: &Document) -> Result<Vec<ParsedSentence>> {
    if doc.source_kind != SourceKind::Conllu {
        return Err(Error::Usage(format!(
            "document `{}` is not a CoNLL-U document",
            doc.id
        )));
    }
    parse_str(&doc.text, &doc.id)
}

pub fn parse_str(text: &str, source_name: &str) -> Result<Vec<ParsedSentence>> {
    let err = |line: usize, reason: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        reason,
    };

    let mut sentences = Vec::new();
    let mut current = ParsedSentence::default();
    let mut start_line = 1;

    let mut finish = |current: &mut ParsedSentence, start_line: usize| -> Result<()> {
        if current.tokens.is_empty() {
            return Ok(());
        }
        let n = current.tokens.len();
        for (i, t) in current.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(err(start_line, format!("token ids not sequential at id {}", t.index)));
            }
            if t.head > n {
                return Err(err(start_line, format!("head {} out of range for token {}", t.head, t.index)));
            }
        }
        let roots = current.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(err(start_line, format!("sentence has {roots} roots, expected 1")));
        }
        sentences.push(std::mem::take(current));
        Ok(())
    };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut current, start_line)?;
            start_line = lineno + 1;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(lineno, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| err(lineno, format!("non-numeric id `{}`", cols[0])))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(lineno, format!("non-numeric head `{}`", cols[6])))?;
        if current.tokens.is_empty() {
            start_line = lineno;
        }
        current.tokens.push(ParseToken {
            index,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    finish(&mut current, start_line)?;
    Ok(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = "# text = Risk is real.\n\
1\tRisk\trisk\tNOUN\t_\t_\t3\tnsubj\t_\t_\n\
2\tis\tbe\tAUX\t_\t_\t3\tcop\t_\t_\n\
3\treal\treal\tADJ\t_\t_\t0\troot\t_\t_\n";

    #[test]
    fn three_rows_one_sentence() {
        let s = parse_str(THREE, "t").unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), 3);
        assert_eq!(s[0].token(3).unwrap().deprel, "root");
        assert_eq!(s[0].children(3).count(), 2);
    }

    #[test]
    fn non_numeric_head_reports_line() {
        let bad = "# c\n1\tRisk\trisk\tNOUN\t_\t_\tx\troot\t_\t_\n";
        match parse_str(bad, "t").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_column_count() {
        let bad = "1\tRisk\trisk\tNOUN\n";
        assert!(matches!(parse_str(bad, "t"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn two_blocks_two_sentences() {
        let text = format!("{THREE}\n{THREE}\n");
        assert_eq!(parse_str(&text, "t").unwrap().len(), 2);
    }

    #[test]
    fn multiword_and_empty_nodes_skipped() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n\
2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_\n\
2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n";
        let s = parse_str(text, "t").unwrap();
        assert_eq!(s[0].len(), 2);
    }

    #[test]
    fn two_roots_rejected() {
        let text = "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n";
        assert!(matches!(parse_str(text, "t"), Err(Error::Parse { .. })));
    }

    #[test]
    fn plain_document_rejected() {
        let doc = Document::plain("a", crate::corpus::CorpusTag::Domain, "text");
        assert!(matches!(load_conllu(&doc), Err(Error::Usage(_))));
    }
}
