//! Statistical machine translation toolkit.
//!
//! The crate covers the statistical side of a domain-robust MT pipeline:
//!
//! - [`corpus`]: parallel-corpus loading, vocabulary counting, byte-pair
//!   encoding, and domain-mismatch statistics
//! - [`align`]: EM training of IBM Model 1 and a diagonal-prior alignment
//!   model, plus Viterbi alignment
//! - [`shortlist`]: per-source-token translation candidate lists extracted
//!   from a trained translation table, with coverage diagnostics
//! - [`metrics`]: corpus BLEU with its precision/brevity breakdown, smoothed
//!   sentence BLEU, chrF, TER without shifts, and exact-match METEOR
//! - [`rerank`]: n-best re-ranking by summed inter-hypothesis similarity
//!
//! All types are immutable after construction and all operations are pure
//! functions, so values can be shared freely across threads. Operations that
//! parallelize internally (EM expected counts, batch BPE application,
//! re-ranking across lists) produce results independent of thread count.

pub mod align;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod rerank;
pub mod shortlist;

pub use error::{Error, Result};
