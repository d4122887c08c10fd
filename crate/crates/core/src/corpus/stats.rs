//! Domain-mismatch statistics: average sentence lengths before and after
//! BPE, thresholded vocabulary size, and overlap with a reference domain.

use crate::corpus::{apply_bpe_corpus, build_vocab, vocab_overlap, BpeModel, Sentence, Vocabulary};
use crate::error::{Error, Result};

/// One corpus row of the domain-comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainStats {
    /// Average tokens per sentence before BPE.
    pub avg_len_before: f64,
    /// Average tokens per sentence after applying the BPE model.
    pub avg_len_after: f64,
    /// Token types with count >= min_count, on pre-BPE tokens.
    pub vocab_size: usize,
    /// Types shared with the reference vocabulary (pre-BPE tokens).
    pub overlap_with_reference: usize,
    /// avg_len_after / avg_len_before; 1.0 for a corpus with no tokens.
    pub inflation_ratio: f64,
}

/// Computes the statistics of one corpus side against a reference domain's
/// vocabulary. Vocabulary and overlap are computed on pre-BPE tokens; the
/// length inflation compares token counts before and after BPE.
pub fn domain_stats(
    corpus_side: &[Sentence],
    bpe: &BpeModel,
    reference_vocab: &Vocabulary,
    min_count: u64,
) -> Result<DomainStats> {
    if corpus_side.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus_side.len() as f64;
    let before_total: usize = corpus_side.iter().map(Sentence::len).sum();
    let segmented = apply_bpe_corpus(bpe, corpus_side);
    let after_total: usize = segmented.iter().map(Sentence::len).sum();

    let vocab = build_vocab(corpus_side, min_count);
    let avg_len_before = before_total as f64 / n;
    let avg_len_after = after_total as f64 / n;
    let inflation_ratio = if before_total > 0 {
        avg_len_after / avg_len_before
    } else {
        1.0
    };
    Ok(DomainStats {
        avg_len_before,
        avg_len_after,
        vocab_size: vocab.size(),
        overlap_with_reference: vocab_overlap(&vocab, reference_vocab),
        inflation_ratio,
    })
}
