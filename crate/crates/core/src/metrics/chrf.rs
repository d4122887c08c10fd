//! Character n-gram F-score.

use std::collections::HashMap;

/// Word-internal character n-grams of one order: n-grams never span a word
/// boundary.
fn char_ngram_counts(words: &[Vec<char>], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    for w in words {
        if w.len() >= n {
            for g in w.windows(n) {
                *counts.entry(g).or_insert(0) += 1;
            }
        }
    }
    counts
}

fn chars(sentence: &[String]) -> Vec<Vec<char>> {
    sentence.iter().map(|t| t.chars().collect()).collect()
}

/// Clipped character n-gram matches between the two sides. Symmetric in its
/// arguments.
fn matched(hyp: &HashMap<&[char], u64>, reference: &HashMap<&[char], u64>) -> u64 {
    hyp.iter()
        .map(|(g, &c)| c.min(reference.get(g).copied().unwrap_or(0)))
        .sum()
}

/// ChrF: per-order character n-gram F-beta scores averaged uniformly over
/// the orders 1..=max_n that have at least one reference n-gram. Orders the
/// hypothesis cannot fill score precision 0; an all-zero order scores F 0.
pub fn chrf(hyp: &[String], reference: &[String], max_n: usize, beta: f64) -> f64 {
    let hyp_chars = chars(hyp);
    let ref_chars = chars(reference);
    let beta2 = beta * beta;
    let mut sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n {
        let rg = char_ngram_counts(&ref_chars, n);
        let ref_total: u64 = rg.values().sum();
        if ref_total == 0 {
            continue;
        }
        let hg = char_ngram_counts(&hyp_chars, n);
        let hyp_total: u64 = hg.values().sum();
        let m = matched(&hg, &rg) as f64;
        let precision = if hyp_total > 0 {
            m / hyp_total as f64
        } else {
            0.0
        };
        let recall = m / ref_total as f64;
        let f = if precision + recall > 0.0 {
            (1.0 + beta2) * precision * recall / (beta2 * precision + recall)
        } else {
            0.0
        };
        sum += f;
        orders += 1;
    }
    if orders > 0 {
        sum / orders as f64
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;

    fn toks(line: &str) -> Vec<String> {
        Sentence::from_line(line).tokens
    }

    #[test]
    fn identity_is_one() {
        let x = toks("abcd efg");
        assert_eq!(chrf(&x, &x, 6, 2.0), 1.0);
    }

    #[test]
    fn disjoint_character_sets_score_zero() {
        assert_eq!(chrf(&toks("ab"), &toks("cd"), 6, 2.0), 0.0);
    }

    #[test]
    fn single_word_fixture() {
        // Orders 1..4 have reference n-grams. Order 1: m=3, P=R=3/4, F=3/4.
        // Order 2: m=2, P=R=2/3. Order 3: m=1, P=R=1/2. Order 4: m=0, F=0.
        // Mean = (3/4 + 2/3 + 1/2 + 0)/4.
        let got = chrf(&toks("abcd"), &toks("abce"), 6, 2.0);
        assert!((got - 23.0 / 48.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn ngrams_are_word_internal() {
        // "ab cd" as one sentence has no bigram "bc"; both sides share "ab"
        // and the letter c. Orders 1 and 2 participate.
        let got = chrf(&toks("ab cd"), &toks("ab ce"), 6, 2.0);
        assert_eq!(got, 0.625);
    }

    #[test]
    fn match_counts_are_symmetric() {
        let a = chars(&toks("abca bc"));
        let b = chars(&toks("cab abc"));
        for n in 1..=6 {
            let ga = char_ngram_counts(&a, n);
            let gb = char_ngram_counts(&b, n);
            assert_eq!(matched(&ga, &gb), matched(&gb, &ga), "order {n}");
        }
    }

    #[test]
    fn empty_sides() {
        assert_eq!(chrf(&[], &toks("ab"), 6, 2.0), 0.0);
        // No reference n-grams at any order: defined as 0.
        assert_eq!(chrf(&toks("ab"), &[], 6, 2.0), 0.0);
    }

    #[test]
    fn unicode_characters_not_bytes() {
        // Multi-byte characters count as single symbols.
        let x = toks("héllo");
        assert_eq!(chrf(&x, &x, 6, 2.0), 1.0);
        let y = toks("hèllo");
        let got = chrf(&x, &y, 6, 2.0);
        assert!(got > 0.0 && got < 1.0);
    }
}
