//! Parallel-corpus loading, vocabulary counting, BPE, and domain statistics.

mod bpe;
mod stats;

pub use bpe::{
    apply_bpe, apply_bpe_corpus, de_bpe, de_bpe_with_marker, learn_bpe, load_bpe, save_bpe,
    BpeModel, CONTINUATION_MARKER,
};
pub use stats::{domain_stats, DomainStats};

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::error::{Error, Result};

/// A whitespace-tokenized sentence. Tokens are non-empty and contain no
/// whitespace; the token list itself may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Sentence {
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Self {
        Sentence { tokens }
    }

    /// Tokenizes a line on whitespace.
    pub fn from_line(line: &str) -> Self {
        Sentence {
            tokens: line.split_whitespace().map(str::to_string).collect(),
        }
    }

    /// Joins the tokens back into a single space-separated line.
    pub fn as_line(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl From<Vec<String>> for Sentence {
    fn from(tokens: Vec<String>) -> Self {
        Sentence { tokens }
    }
}

impl<'a> FromIterator<&'a str> for Sentence {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        Sentence {
            tokens: iter.into_iter().map(str::to_string).collect(),
        }
    }
}

/// An ordered list of (source, target) sentence pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParallelCorpus {
    pub pairs: Vec<(Sentence, Sentence)>,
}

impl ParallelCorpus {
    pub fn new(pairs: Vec<(Sentence, Sentence)>) -> Self {
        ParallelCorpus { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Token counts thresholded at construction time: every retained token
/// occurred at least `min_count` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub entries: BTreeMap<String, u64>,
    pub min_count: u64,
}

impl Vocabulary {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn count(&self, token: &str) -> u64 {
        self.entries.get(token).copied().unwrap_or(0)
    }
}

/// Reads a UTF-8 text file into lines, reporting the 1-based line number of
/// the first undecodable line. A trailing newline does not produce an empty
/// final line; `\r\n` endings are tolerated.
pub(crate) fn read_lines(path: &Path) -> Result<Vec<String>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut chunks: Vec<&[u8]> = bytes.split(|&b| b == b'\n').collect();
    if let Some(last) = chunks.last() {
        if last.is_empty() {
            chunks.pop();
        }
    }
    let mut lines = Vec::with_capacity(chunks.len());
    for (idx, chunk) in chunks.iter().enumerate() {
        let chunk = chunk.strip_suffix(b"\r").unwrap_or(chunk);
        match std::str::from_utf8(chunk) {
            Ok(s) => lines.push(s.to_string()),
            Err(_) => return Err(Error::parse(path, idx + 1, "invalid UTF-8")),
        }
    }
    Ok(lines)
}

/// Loads one side of a corpus, one whitespace-tokenized sentence per line.
pub fn load_sentences(path: &Path) -> Result<Vec<Sentence>> {
    Ok(read_lines(path)?
        .iter()
        .map(|l| Sentence::from_line(l))
        .collect())
}

/// Loads a parallel corpus from two line-aligned files. Empty lines become
/// zero-token sentences and are retained.
pub fn load_parallel(source_path: &Path, target_path: &Path) -> Result<ParallelCorpus> {
    let src = load_sentences(source_path)?;
    let tgt = load_sentences(target_path)?;
    if src.len() != tgt.len() {
        return Err(Error::LengthMismatch {
            left: src.len(),
            right: tgt.len(),
        });
    }
    Ok(ParallelCorpus {
        pairs: src.into_iter().zip(tgt).collect(),
    })
}

/// Counts tokens over `sentences` and keeps those with count >= `min_count`.
pub fn build_vocab(sentences: &[Sentence], min_count: u64) -> Vocabulary {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for s in sentences {
        for t in &s.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let entries = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_count)
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    Vocabulary { entries, min_count }
}

/// Number of token types the two vocabularies share. Symmetric.
pub fn vocab_overlap(a: &Vocabulary, b: &Vocabulary) -> usize {
    let (small, large) = if a.size() <= b.size() { (a, b) } else { (b, a) };
    small
        .entries
        .keys()
        .filter(|t| large.contains(t))
        .count()
}
