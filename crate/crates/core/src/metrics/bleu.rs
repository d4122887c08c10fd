//! Corpus BLEU with a component breakdown, and smoothed sentence BLEU.

use std::collections::HashMap;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

/// Corpus BLEU together with the components it is assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct BleuBreakdown {
    /// Clipped n-gram precisions p1..p4.
    pub precisions: [f64; MAX_ORDER],
    /// min(1, exp(1 - ref_length / hyp_length)); 0 when the hypothesis side
    /// is empty.
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
    /// brevity_penalty * exp(mean of log precisions), or 0 when any
    /// precision is 0.
    pub bleu: f64,
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Matched (clipped against the reference) and total hypothesis n-grams of
/// one order.
fn clipped(hyp: &[String], reference: &[String], n: usize) -> (u64, u64) {
    let hg = ngram_counts(hyp, n);
    let rg = ngram_counts(reference, n);
    let mut matched = 0;
    let mut total = 0;
    for (g, &c) in &hg {
        matched += c.min(rg.get(g).copied().unwrap_or(0));
        total += c;
    }
    (matched, total)
}

/// Unsmoothed corpus BLEU-4 over parallel hypothesis/reference lists.
/// Match and total counts are summed over the corpus before dividing.
pub fn corpus_bleu(hypotheses: &[Sentence], references: &[Sentence]) -> Result<BleuBreakdown> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut matches = [0u64; MAX_ORDER];
    let mut totals = [0u64; MAX_ORDER];
    let mut hyp_length = 0;
    let mut ref_length = 0;
    for (h, r) in hypotheses.iter().zip(references) {
        hyp_length += h.len();
        ref_length += r.len();
        for n in 1..=MAX_ORDER {
            let (m, t) = clipped(&h.tokens, &r.tokens, n);
            matches[n - 1] += m;
            totals[n - 1] += t;
        }
    }
    let mut precisions = [0.0; MAX_ORDER];
    for n in 0..MAX_ORDER {
        if totals[n] > 0 {
            precisions[n] = matches[n] as f64 / totals[n] as f64;
        }
    }
    // An empty hypothesis side has no length ratio; both BP and BLEU are 0
    // by convention and the CLI flags the case.
    let brevity_penalty = if hyp_length == 0 {
        0.0
    } else {
        (1.0 - ref_length as f64 / hyp_length as f64).exp().min(1.0)
    };
    let bleu = if hyp_length > 0 && precisions.iter().all(|&p| p > 0.0) {
        brevity_penalty * (precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64).exp()
    } else {
        0.0
    };
    Ok(BleuBreakdown {
        precisions,
        brevity_penalty,
        hyp_length,
        ref_length,
        bleu,
    })
}

/// Sentence-level BLEU-4 with add-one smoothing on both numerator and
/// denominator for orders 2..4; the unigram precision is unsmoothed, so a
/// hypothesis sharing no tokens with the reference scores 0. Empty
/// hypotheses score 0.
pub fn sentence_bleu(hyp: &[String], reference: &[String]) -> f64 {
    if hyp.is_empty() {
        return 0.0;
    }
    let mut precisions = [0.0; MAX_ORDER];
    for n in 1..=MAX_ORDER {
        let (m, t) = clipped(hyp, reference, n);
        precisions[n - 1] = if n == 1 {
            if t > 0 {
                m as f64 / t as f64
            } else {
                0.0
            }
        } else {
            (m + 1) as f64 / (t + 1) as f64
        };
    }
    if precisions.iter().any(|&p| p == 0.0) {
        return 0.0;
    }
    let bp = (1.0 - reference.len() as f64 / hyp.len() as f64)
        .exp()
        .min(1.0);
    bp * (precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64).exp()
}
