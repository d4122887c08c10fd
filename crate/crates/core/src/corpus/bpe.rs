//! Byte-pair encoding: learning merge rules, applying them, and undoing the
//! segmentation.
//!
//! Learning counts adjacent symbol pairs inside words only; merges never
//! cross or absorb the end-of-word boundary, so the boundary itself needs no
//! explicit symbol. Ties on pair frequency break lexicographically on
//! (left, right) for cross-platform determinism.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{read_lines, Sentence};
use crate::error::{Error, Result};

/// Marker appended to every non-final sub-token of a split word.
pub const CONTINUATION_MARKER: &str = "@@";

/// An ordered list of merge rules plus the continuation marker used when
/// emitting split words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    pub merges: Vec<(String, String)>,
    pub continuation_marker: String,
}

impl BpeModel {
    pub fn new(merges: Vec<(String, String)>) -> Self {
        BpeModel {
            merges,
            continuation_marker: CONTINUATION_MARKER.to_string(),
        }
    }
}

/// One distinct training word: its current symbol sequence and corpus
/// frequency.
struct Word {
    syms: Vec<String>,
    freq: u64,
}

/// Multiset of adjacent symbol pairs in a symbol sequence.
fn pair_multiset(syms: &[String]) -> HashMap<(String, String), u64> {
    let mut m = HashMap::new();
    for w in syms.windows(2) {
        *m.entry((w[0].clone(), w[1].clone())).or_insert(0) += 1;
    }
    m
}

/// Replaces every left-to-right occurrence of `pair` in `syms` by the fused
/// symbol.
fn merge_ltr(syms: &[String], pair: &(String, String)) -> Vec<String> {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && syms[i] == pair.0 && syms[i + 1] == pair.1 {
            out.push(format!("{}{}", pair.0, pair.1));
            i += 2;
        } else {
            out.push(syms[i].clone());
            i += 1;
        }
    }
    out
}

/// Learns `num_merges` greedy most-frequent-pair merges from whitespace
/// words. Returns the model and, for the self-consistency check, the final
/// training-time segmentation of every distinct word.
fn learn_bpe_inner(
    sentences: &[Sentence],
    num_merges: usize,
) -> Result<(BpeModel, HashMap<String, Vec<String>>)> {
    // Distinct words in first-seen order so word indices are deterministic.
    let mut words: Vec<Word> = Vec::new();
    let mut index_of: HashMap<&str, usize> = HashMap::new();
    for s in sentences {
        for tok in &s.tokens {
            match index_of.get(tok.as_str()) {
                Some(&i) => words[i].freq += 1,
                None => {
                    index_of.insert(tok, words.len());
                    words.push(Word {
                        syms: tok.chars().map(String::from).collect(),
                        freq: 1,
                    });
                }
            }
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut pair_counts: HashMap<(String, String), u64> = HashMap::new();
    let mut occurrences: HashMap<(String, String), BTreeSet<usize>> = HashMap::new();
    for (idx, w) in words.iter().enumerate() {
        for (pair, n) in pair_multiset(&w.syms) {
            *pair_counts.entry(pair.clone()).or_insert(0) += n * w.freq;
            occurrences.entry(pair).or_default().insert(idx);
        }
    }

    let mut merges = Vec::with_capacity(num_merges);
    for _ in 0..num_merges {
        // Highest count wins; equal counts break toward the lexicographically
        // smaller (left, right). The scan order over the map does not matter
        // because the comparison is a total order.
        let best = pair_counts
            .iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)))
            .map(|(p, _)| p.clone());
        let Some(best) = best else { break };

        let touched: Vec<usize> = occurrences
            .get(&best)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for idx in touched {
            let old = pair_multiset(&words[idx].syms);
            let new_syms = merge_ltr(&words[idx].syms, &best);
            let new = pair_multiset(&new_syms);
            let freq = words[idx].freq;
            for (pair, n) in &old {
                let delta = n * freq;
                let e = pair_counts.get_mut(pair).expect("counted pair");
                *e -= delta;
                if *e == 0 {
                    pair_counts.remove(pair);
                }
                if !new.contains_key(pair) {
                    if let Some(set) = occurrences.get_mut(pair) {
                        set.remove(&idx);
                        if set.is_empty() {
                            occurrences.remove(pair);
                        }
                    }
                }
            }
            for (pair, n) in new {
                *pair_counts.entry(pair.clone()).or_insert(0) += n * freq;
                occurrences.entry(pair).or_default().insert(idx);
            }
            words[idx].syms = new_syms;
        }
        merges.push(best);
    }

    let segmentation = index_of
        .into_iter()
        .map(|(tok, idx)| (tok.to_string(), words[idx].syms.clone()))
        .collect();
    Ok((BpeModel::new(merges), segmentation))
}

/// Learns `num_merges` merge rules from the given sentences. Errors when the
/// input contains no words. Fewer rules are returned when the corpus runs out
/// of adjacent pairs first.
pub fn learn_bpe(sentences: &[Sentence], num_merges: usize) -> Result<BpeModel> {
    learn_bpe_inner(sentences, num_merges).map(|(model, _)| model)
}

/// Reusable application state: merge ranks keyed by pair for O(1) lookup.
struct Segmenter<'a> {
    ranks: HashMap<(&'a str, &'a str), usize>,
    merges: &'a [(String, String)],
    marker: &'a str,
}

impl<'a> Segmenter<'a> {
    fn new(model: &'a BpeModel) -> Self {
        let ranks = model
            .merges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| ((a.as_str(), b.as_str()), i))
            .collect();
        Segmenter {
            ranks,
            merges: &model.merges,
            marker: &model.continuation_marker,
        }
    }

    /// Splits a word to characters and repeatedly applies the present merge
    /// rule with the smallest rank, which replays the rules in model order.
    fn word(&self, word: &str) -> Vec<String> {
        let mut syms: Vec<String> = word.chars().map(String::from).collect();
        while syms.len() > 1 {
            let best = syms
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].as_str(), w[1].as_str())))
                .min()
                .copied();
            let Some(rank) = best else { break };
            syms = merge_ltr(&syms, &self.merges[rank]);
        }
        syms
    }

    fn sentence(&self, s: &Sentence, cache: &mut HashMap<String, Vec<String>>) -> Sentence {
        let mut out = Vec::with_capacity(s.tokens.len());
        for tok in &s.tokens {
            if !cache.contains_key(tok.as_str()) {
                cache.insert(tok.clone(), self.word(tok));
            }
            let syms = &cache[tok.as_str()];
            let last = syms.len() - 1;
            for (i, sym) in syms.iter().enumerate() {
                if i == last {
                    out.push(sym.clone());
                } else {
                    out.push(format!("{sym}{}", self.marker));
                }
            }
        }
        Sentence::new(out)
    }
}

/// Applies the model's merges to every word of `s`: each word is split to
/// characters, merges are replayed in model order, and every sub-token except
/// the word-final one carries the continuation marker.
pub fn apply_bpe(model: &BpeModel, s: &Sentence) -> Sentence {
    let seg = Segmenter::new(model);
    seg.sentence(s, &mut HashMap::new())
}

/// Applies the model to a batch of sentences in parallel. Output order
/// matches input order and is independent of thread count.
pub fn apply_bpe_corpus(model: &BpeModel, sentences: &[Sentence]) -> Vec<Sentence> {
    let seg = Segmenter::new(model);
    // Segment each distinct word once, then map sentences over the results.
    let distinct: Vec<&str> = {
        let mut seen = BTreeSet::new();
        for s in sentences {
            for t in &s.tokens {
                seen.insert(t.as_str());
            }
        }
        seen.into_iter().collect()
    };
    let segmented: HashMap<&str, Vec<String>> = distinct
        .par_iter()
        .map(|w| (*w, seg.word(w)))
        .collect();
    sentences
        .par_iter()
        .map(|s| {
            let mut out = Vec::with_capacity(s.tokens.len());
            for tok in &s.tokens {
                let syms = &segmented[tok.as_str()];
                let last = syms.len() - 1;
                for (i, sym) in syms.iter().enumerate() {
                    if i == last {
                        out.push(sym.clone());
                    } else {
                        out.push(format!("{sym}{}", model.continuation_marker));
                    }
                }
            }
            Sentence::new(out)
        })
        .collect()
}

/// Joins sub-tokens split by [`apply_bpe`] using the default marker.
pub fn de_bpe(s: &Sentence) -> Sentence {
    de_bpe_with_marker(s, CONTINUATION_MARKER)
}

/// Joins adjacent tokens wherever a token ends with `marker`, removing the
/// markers. A trailing marker on the final token is stripped; tokens reduced
/// to the empty string are dropped.
pub fn de_bpe_with_marker(s: &Sentence, marker: &str) -> Sentence {
    let mut out: Vec<String> = Vec::new();
    let mut current = String::new();
    for tok in &s.tokens {
        match tok.strip_suffix(marker) {
            Some(head) => current.push_str(head),
            None => {
                current.push_str(tok);
                out.push(std::mem::take(&mut current));
            }
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    Sentence::new(out)
}

/// Writes the model as a text file: a `#version: 1` header, then one
/// `left right` line per merge in rule order. The continuation marker is not
/// serialized; files always load with the default marker.
pub fn save_bpe(model: &BpeModel, path: &Path) -> Result<()> {
    let mut out = String::from("#version: 1\n");
    for (a, b) in &model.merges {
        out.push_str(a);
        out.push(' ');
        out.push_str(b);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Loads a model written by [`save_bpe`], validating the header and the
/// no-duplicate-pairs invariant.
pub fn load_bpe(path: &Path) -> Result<BpeModel> {
    let lines = read_lines(path)?;
    let Some(header) = lines.first() else {
        return Err(Error::parse(path, 1, "missing '#version: 1' header"));
    };
    if header.trim() != "#version: 1" {
        return Err(Error::parse(
            path,
            1,
            format!("expected '#version: 1' header, found {header:?}"),
        ));
    }
    let mut merges = Vec::with_capacity(lines.len().saturating_sub(1));
    let mut seen = BTreeSet::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(' ');
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 'left right', found {line:?}"),
            ));
        };
        if a.is_empty() || b.is_empty() {
            return Err(Error::parse(path, idx + 1, "empty merge symbol"));
        }
        if !seen.insert((a.to_string(), b.to_string())) {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("duplicate merge pair '{a} {b}'"),
            ));
        }
        merges.push((a.to_string(), b.to_string()));
    }
    Ok(BpeModel::new(merges))
}
