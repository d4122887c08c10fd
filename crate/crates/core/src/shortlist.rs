//! Per-source-token lexical shortlists and coverage diagnostics.
//!
//! A shortlist caps the candidate target vocabulary per source token to the
//! k most probable translations, optionally unioned with globally frequent
//! target tokens. Coverage measures how much of a reference corpus such a
//! constrained candidate set can still reach.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::align::TranslationTable;
use crate::corpus::{ParallelCorpus, Sentence, Vocabulary};
use crate::error::{Error, Result};

/// Marker tokens always shortlisted when the target vocabulary contains
/// them. Ordinary text corpora do not, so plain setups get no implicit
/// extras.
pub const RESERVED_MARKERS: [&str; 2] = ["</s>", "<unk>"];

/// Ranked translation candidates per source token.
#[derive(Debug, Clone, PartialEq)]
pub struct Shortlist {
    /// Up to k (target, probability) entries per source token, sorted by
    /// probability descending, ties broken by token order. Probabilities
    /// are strictly positive.
    pub per_source: BTreeMap<String, Vec<(String, f64)>>,
    pub k: usize,
    /// Tokens admitted for every sentence, in a fixed order: reserved
    /// markers present in the target vocabulary, then the frequent_f most
    /// frequent target tokens.
    pub always_include: Vec<String>,
    pub frequent_f: usize,
}

/// Reachability of reference tokens through a shortlist.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub reachable_tokens: usize,
    pub total_tokens: usize,
    /// reachable_tokens / total_tokens, micro-averaged over the corpus.
    pub coverage: f64,
    /// Covered fraction per sentence pair; 1.0 for an empty target side.
    pub per_sentence: Vec<f64>,
}

/// Builds the shortlist from p(target|source): per source token the top-k
/// targets, plus an always-include set of reserved markers (when present in
/// `target_counts`) and the `frequent_f` most frequent targets. Entries with
/// zero probability are dropped. Ties anywhere break lexicographically.
pub fn build_shortlist(
    ttable: &TranslationTable,
    k: usize,
    frequent_f: usize,
    target_counts: &Vocabulary,
) -> Result<Shortlist> {
    if k < 1 {
        return Err(Error::InvalidArgument("shortlist k must be >= 1".into()));
    }
    let mut per_source = BTreeMap::new();
    for (f, row) in &ttable.probs {
        let mut entries: Vec<(String, f64)> = row
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .map(|(e, &p)| (e.clone(), p))
            .collect();
        entries.sort_by(|(ta, pa), (tb, pb)| pb.total_cmp(pa).then_with(|| ta.cmp(tb)));
        entries.truncate(k);
        per_source.insert(f.clone(), entries);
    }
    let mut always_include = Vec::new();
    let mut seen = HashSet::new();
    for marker in RESERVED_MARKERS {
        if target_counts.entries.contains_key(marker) && seen.insert(marker.to_string()) {
            always_include.push(marker.to_string());
        }
    }
    let mut by_freq: Vec<(&String, &u64)> = target_counts.entries.iter().collect();
    by_freq.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
    // Union semantics: the top-F set may overlap the markers.
    for (tok, _) in by_freq.into_iter().take(frequent_f) {
        if seen.insert(tok.clone()) {
            always_include.push(tok.clone());
        }
    }
    Ok(Shortlist {
        per_source,
        k,
        always_include,
        frequent_f,
    })
}

/// Candidate target tokens for one source sentence: the always-include set,
/// then each source token's ranked list in sentence order, deduplicated by
/// first occurrence.
pub fn sentence_candidates(sl: &Shortlist, source: &Sentence) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for tok in &sl.always_include {
        if seen.insert(tok.as_str()) {
            out.push(tok.clone());
        }
    }
    for tok in &source.tokens {
        if let Some(entries) = sl.per_source.get(tok) {
            for (tgt, _) in entries {
                if seen.insert(tgt.as_str()) {
                    out.push(tgt.clone());
                }
            }
        }
    }
    out
}

/// Fraction of reference target tokens reachable through the shortlist,
/// counted per occurrence and micro-averaged over the corpus.
pub fn coverage(sl: &Shortlist, corpus: &ParallelCorpus) -> Result<CoverageReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut reachable = 0;
    let mut total = 0;
    let mut per_sentence = Vec::with_capacity(corpus.pairs.len());
    for (src, tgt) in &corpus.pairs {
        let candidates: HashSet<&str> = {
            let mut set = HashSet::new();
            for tok in &sl.always_include {
                set.insert(tok.as_str());
            }
            for tok in &src.tokens {
                if let Some(entries) = sl.per_source.get(tok) {
                    for (t, _) in entries {
                        set.insert(t.as_str());
                    }
                }
            }
            set
        };
        let covered = tgt
            .tokens
            .iter()
            .filter(|t| candidates.contains(t.as_str()))
            .count();
        reachable += covered;
        total += tgt.len();
        per_sentence.push(if tgt.is_empty() {
            1.0
        } else {
            covered as f64 / tgt.len() as f64
        });
    }
    // A corpus with only empty target sides constrains nothing.
    let coverage = if total == 0 {
        1.0
    } else {
        reachable as f64 / total as f64
    };
    Ok(CoverageReport {
        reachable_tokens: reachable,
        total_tokens: total,
        coverage,
        per_sentence,
    })
}

/// Canonical shortlist file: a `#shortlist k=<k> f=<F>` header, one
/// `#always <token>` line per always-include entry, then `source target
/// probability` triples grouped by source in rank order.
pub fn save_shortlist(sl: &Shortlist, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "#shortlist k={} f={}", sl.k, sl.frequent_f);
    for tok in &sl.always_include {
        let _ = writeln!(out, "#always {tok}");
    }
    for (f, entries) in &sl.per_source {
        for (e, p) in entries {
            let _ = writeln!(out, "{f} {e} {p:.16e}");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Bare `source target probability` triples, the shape expected by common
/// decoder shortlist loaders. Not round-trippable; use [`save_shortlist`]
/// for that.
pub fn export_shortlist(sl: &Shortlist, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (f, entries) in &sl.per_source {
        for (e, p) in entries {
            let _ = writeln!(out, "{f} {e} {p:.16e}");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn load_shortlist(path: &Path) -> Result<Shortlist> {
    let lines = crate::corpus::read_lines(path)?;
    let header = lines
        .first()
        .ok_or_else(|| Error::parse(path, 1, "empty shortlist file"))?;
    let params = header
        .strip_prefix("#shortlist ")
        .ok_or_else(|| Error::parse(path, 1, format!("expected '#shortlist k=.. f=..', got {header:?}")))?;
    let mut k = None;
    let mut f = None;
    for field in params.split_whitespace() {
        if let Some(v) = field.strip_prefix("k=") {
            k = v.parse::<usize>().ok();
        } else if let Some(v) = field.strip_prefix("f=") {
            f = v.parse::<usize>().ok();
        }
    }
    let (k, frequent_f) = match (k, f) {
        (Some(k), Some(f)) if k >= 1 => (k, f),
        _ => return Err(Error::parse(path, 1, format!("bad shortlist header {header:?}"))),
    };
    let mut always_include = Vec::new();
    let mut per_source: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (idx, line) in lines.iter().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        if let Some(tok) = line.strip_prefix("#always ") {
            always_include.push(tok.to_string());
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 'source target probability', got {line:?}"),
            ));
        }
        let p: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, idx + 1, format!("bad probability {:?}", fields[2])))?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::parse(path, idx + 1, format!("probability {p} outside (0, 1]")));
        }
        let entries = per_source.entry(fields[0].to_string()).or_default();
        if entries.len() >= k {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("more than k={k} entries for source {:?}", fields[0]),
            ));
        }
        entries.push((fields[1].to_string(), p));
    }
    Ok(Shortlist {
        per_source,
        k,
        always_include,
        frequent_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocab;

    fn s(line: &str) -> Sentence {
        Sentence::from_line(line)
    }

    fn toy_table() -> TranslationTable {
        let mut probs: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        probs.insert(
            "a".into(),
            [("x".into(), 0.5), ("y".into(), 0.3), ("z".into(), 0.2)].into(),
        );
        probs.insert(
            "b".into(),
            [("y".into(), 0.6), ("w".into(), 0.4), ("q".into(), 0.0)].into(),
        );
        TranslationTable::new(probs)
    }

    fn empty_vocab() -> Vocabulary {
        build_vocab(&[], 1)
    }

    #[test]
    fn top_k_sorted_and_cut() {
        let sl = build_shortlist(&toy_table(), 2, 0, &empty_vocab()).unwrap();
        assert_eq!(
            sl.per_source["a"],
            vec![("x".to_string(), 0.5), ("y".to_string(), 0.3)]
        );
        assert_eq!(sl.k, 2);
        assert!(sl.always_include.is_empty());
    }

    #[test]
    fn large_k_keeps_full_sorted_row_minus_zeros() {
        let sl = build_shortlist(&toy_table(), 10, 0, &empty_vocab()).unwrap();
        assert_eq!(sl.per_source["a"].len(), 3);
        // The zero-probability entry is not a candidate.
        assert_eq!(
            sl.per_source["b"],
            vec![("y".to_string(), 0.6), ("w".to_string(), 0.4)]
        );
    }

    #[test]
    fn probability_ties_break_lexicographically() {
        let mut probs: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        probs.insert(
            "a".into(),
            [("m".into(), 0.25), ("c".into(), 0.5), ("b".into(), 0.25)].into(),
        );
        let sl = build_shortlist(&TranslationTable::new(probs), 2, 0, &empty_vocab()).unwrap();
        assert_eq!(
            sl.per_source["a"],
            vec![("c".to_string(), 0.5), ("b".to_string(), 0.25)]
        );
    }

    #[test]
    fn zero_k_rejected() {
        assert!(build_shortlist(&toy_table(), 0, 0, &empty_vocab()).is_err());
    }

    #[test]
    fn always_include_takes_markers_and_frequent() {
        let tgt = vec![s("y y y x </s>"), s("y w x </s>")];
        let vocab = build_vocab(&tgt, 1);
        let sl = build_shortlist(&toy_table(), 2, 2, &vocab).unwrap();
        // Marker first; the top-2 frequent set is {y, </s>} (tie between x
        // and </s> breaks lexicographically) and </s> is already listed.
        assert_eq!(sl.always_include, vec!["</s>", "y"]);
        let sl3 = build_shortlist(&toy_table(), 2, 3, &vocab).unwrap();
        assert_eq!(sl3.always_include, vec!["</s>", "y", "x"]);
    }

    #[test]
    fn candidates_order_and_dedup() {
        let tgt = vec![s("w w")];
        let vocab = build_vocab(&tgt, 1);
        let sl = build_shortlist(&toy_table(), 2, 1, &vocab).unwrap();
        assert_eq!(sl.always_include, vec!["w"]);
        let cands = sentence_candidates(&sl, &s("b a b unknown"));
        assert_eq!(cands, vec!["w", "y", "x"]);
        assert_eq!(sentence_candidates(&sl, &s("")), vec!["w"]);
    }

    #[test]
    fn coverage_exact_fraction() {
        let sl = build_shortlist(&toy_table(), 1, 0, &empty_vocab()).unwrap();
        // Candidates: a -> {x}, b -> {y}.
        let corpus = ParallelCorpus::new(vec![
            (s("a b"), s("x y z")),
            (s("a"), s("x x")),
        ]);
        let report = coverage(&sl, &corpus).unwrap();
        assert_eq!(report.reachable_tokens, 4);
        assert_eq!(report.total_tokens, 5);
        assert_eq!(report.coverage, 0.8);
        assert_eq!(report.per_sentence, vec![2.0 / 3.0, 1.0]);
    }

    #[test]
    fn coverage_extremes() {
        let sl = build_shortlist(&toy_table(), 1, 0, &empty_vocab()).unwrap();
        let disjoint = ParallelCorpus::new(vec![(s("a"), s("u v"))]);
        assert_eq!(coverage(&sl, &disjoint).unwrap().coverage, 0.0);
        assert!(coverage(&sl, &ParallelCorpus::default()).is_err());
    }

    #[test]
    fn file_round_trip_exact() {
        let tgt = vec![s("y y w </s>")];
        let vocab = build_vocab(&tgt, 1);
        let sl = build_shortlist(&toy_table(), 2, 1, &vocab).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sl.txt");
        save_shortlist(&sl, &path).unwrap();
        let back = load_shortlist(&path).unwrap();
        assert_eq!(sl, back);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("#shortlist k=2 f=1\n"), "{text}");
    }

    #[test]
    fn export_emits_bare_triples() {
        let sl = build_shortlist(&toy_table(), 1, 0, &empty_vocab()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sl.tsv");
        export_shortlist(&sl, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("a x "), "{}", lines[0]);
        assert!(lines[1].starts_with("b y "), "{}", lines[1]);
    }

    #[test]
    fn load_rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sl.txt");
        std::fs::write(&path, "a x 0.5\n").unwrap();
        assert!(load_shortlist(&path).is_err());
        std::fs::write(&path, "#shortlist k=0 f=0\n").unwrap();
        assert!(load_shortlist(&path).is_err());
        std::fs::write(&path, "#shortlist k=1 f=0\na x 0.5\na y 0.4\n").unwrap();
        let err = load_shortlist(&path).unwrap_err().to_string();
        assert!(err.contains("more than k=1"), "{err}");
        std::fs::write(&path, "#shortlist k=1 f=0\na x 1.5\n").unwrap();
        assert!(load_shortlist(&path).is_err());
    }

    #[test]
    fn k50_lists_extend_k10_lists() {
        let mut row: BTreeMap<String, f64> = BTreeMap::new();
        for i in 0..60 {
            row.insert(format!("t{i:02}"), (i + 1) as f64 / 1830.0);
        }
        let mut probs = BTreeMap::new();
        probs.insert("src".to_string(), row);
        let table = TranslationTable::new(probs);
        let sl10 = build_shortlist(&table, 10, 0, &empty_vocab()).unwrap();
        let sl50 = build_shortlist(&table, 50, 0, &empty_vocab()).unwrap();
        assert_eq!(sl10.per_source["src"].len(), 10);
        assert_eq!(sl50.per_source["src"].len(), 50);
        assert_eq!(sl50.per_source["src"][..10], sl10.per_source["src"][..]);
    }
}
