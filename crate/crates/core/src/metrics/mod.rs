//! Evaluation metrics: corpus BLEU with its component breakdown, smoothed
//! sentence BLEU, ChrF, TER without shifts, and exact-match METEOR.
//!
//! All metrics operate on plain tokenized text; callers re-ranking BPE
//! output should undo the segmentation first. Scores live in [0, 1]
//! internally (TER excepted, which is an error rate).

mod bleu;
mod chrf;
mod meteor;
mod ter;

pub use bleu::{corpus_bleu, sentence_bleu, BleuBreakdown};
pub use chrf::chrf;
pub use meteor::meteor_lite;
pub use ter::ter_basic;

use crate::error::{Error, Result};

pub const CHRF_MAX_N: usize = 6;
pub const CHRF_BETA: f64 = 2.0;
pub const METEOR_ALPHA: f64 = 0.9;
pub const METEOR_GAMMA: f64 = 0.5;
pub const METEOR_BETA: f64 = 3.0;

/// A sentence-similarity metric choice plus its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    SentBleu,
    Chrf { max_n: usize, beta: f64 },
    TerBasic,
    MeteorLite { alpha: f64, gamma: f64, beta: f64 },
}

impl MetricKind {
    pub fn chrf() -> Self {
        MetricKind::Chrf {
            max_n: CHRF_MAX_N,
            beta: CHRF_BETA,
        }
    }

    pub fn meteor() -> Self {
        MetricKind::MeteorLite {
            alpha: METEOR_ALPHA,
            gamma: METEOR_GAMMA,
            beta: METEOR_BETA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MetricKind::Chrf { max_n, beta } => {
                if max_n < 1 {
                    return Err(Error::InvalidArgument("chrf max_n must be >= 1".into()));
                }
                if !(beta > 0.0) {
                    return Err(Error::InvalidArgument("chrf beta must be > 0".into()));
                }
            }
            MetricKind::MeteorLite { alpha, gamma, beta } => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::InvalidArgument(
                        "meteor alpha must be in [0, 1]".into(),
                    ));
                }
                if !(0.0..=1.0).contains(&gamma) {
                    return Err(Error::InvalidArgument(
                        "meteor gamma must be in [0, 1]".into(),
                    ));
                }
                if !(beta > 0.0) {
                    return Err(Error::InvalidArgument("meteor beta must be > 0".into()));
                }
            }
            MetricKind::SentBleu | MetricKind::TerBasic => {}
        }
        Ok(())
    }

    /// Similarity of `hyp` to `reference` in [0, 1]; higher is better for
    /// every kind. TER is folded to max(0, 1 - ter), with the empty-reference
    /// corner defined as exact-match.
    pub fn similarity(&self, hyp: &[String], reference: &[String]) -> f64 {
        match *self {
            MetricKind::SentBleu => sentence_bleu(hyp, reference),
            MetricKind::Chrf { max_n, beta } => chrf(hyp, reference, max_n, beta),
            MetricKind::TerBasic => {
                if reference.is_empty() {
                    return if hyp.is_empty() { 1.0 } else { 0.0 };
                }
                (1.0 - ter_basic(hyp, reference).expect("non-empty reference")).max(0.0)
            }
            MetricKind::MeteorLite { alpha, gamma, beta } => {
                meteor_lite(hyp, reference, alpha, gamma, beta)
            }
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricKind::SentBleu => "sentbleu",
            MetricKind::Chrf { .. } => "chrf",
            MetricKind::TerBasic => "ter",
            MetricKind::MeteorLite { .. } => "meteor",
        })
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    /// Accepts the CLI spellings and the underscored type names.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentbleu" | "sent_bleu" => Ok(MetricKind::SentBleu),
            "chrf" => Ok(MetricKind::chrf()),
            "ter" | "ter_basic" => Ok(MetricKind::TerBasic),
            "meteor" | "meteor_lite" => Ok(MetricKind::meteor()),
            other => Err(Error::InvalidArgument(format!(
                "unknown metric {other:?} (expected sentbleu, chrf, ter, or meteor)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;

    fn toks(line: &str) -> Vec<String> {
        Sentence::from_line(line).tokens
    }

    fn all_kinds() -> [MetricKind; 4] {
        [
            MetricKind::SentBleu,
            MetricKind::chrf(),
            MetricKind::TerBasic,
            MetricKind::meteor(),
        ]
    }

    #[test]
    fn similarity_in_unit_interval() {
        let pairs = [
            ("a b c d", "a b c d"),
            ("a b c d", "a x c y"),
            ("a", "a b c d e f"),
            ("q w e r t y u i", "a"),
            ("", "a b"),
        ];
        for kind in all_kinds() {
            for (h, r) in pairs {
                let s = kind.similarity(&toks(h), &toks(r));
                assert!((0.0..=1.0).contains(&s), "{kind} on ({h:?},{r:?}) = {s}");
            }
        }
    }

    #[test]
    fn identity_is_maximal() {
        let x = toks("a b c d e");
        let others = ["a b c", "b a d c e", "x y z", "a b c d f"];
        for kind in all_kinds() {
            let self_sim = kind.similarity(&x, &x);
            for o in others {
                let s = kind.similarity(&toks(o), &x);
                assert!(s <= self_sim, "{kind}: {o:?} scored {s} > {self_sim}");
            }
        }
    }

    #[test]
    fn relabeling_invariance() {
        // Consistent vocabulary renaming must not change any score.
        let h1 = toks("a b a c");
        let r1 = toks("a c b b");
        let h2 = toks("zz qq zz rr");
        let r2 = toks("zz rr qq qq");
        for kind in [MetricKind::SentBleu, MetricKind::TerBasic, MetricKind::meteor()] {
            assert_eq!(
                kind.similarity(&h1, &r1),
                kind.similarity(&h2, &r2),
                "{kind}"
            );
        }
    }

    #[test]
    fn ter_similarity_clamps_and_totalizes() {
        assert_eq!(MetricKind::TerBasic.similarity(&toks("a b c d"), &toks("a")), 0.0);
        assert_eq!(MetricKind::TerBasic.similarity(&[], &[]), 1.0);
        assert_eq!(MetricKind::TerBasic.similarity(&toks("a"), &[]), 0.0);
        assert_eq!(
            MetricKind::TerBasic.similarity(&toks("a b c"), &toks("a x c")),
            1.0 - 1.0 / 3.0
        );
    }

    #[test]
    fn names_round_trip() {
        for kind in all_kinds() {
            let back: MetricKind = kind.to_string().parse().unwrap();
            assert_eq!(back, kind);
        }
        assert!("bleu5".parse::<MetricKind>().is_err());
        assert_eq!(
            "sent_bleu".parse::<MetricKind>().unwrap(),
            MetricKind::SentBleu
        );
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        assert!(MetricKind::Chrf { max_n: 0, beta: 2.0 }.validate().is_err());
        assert!(MetricKind::Chrf { max_n: 6, beta: 0.0 }.validate().is_err());
        assert!(MetricKind::MeteorLite {
            alpha: 1.5,
            gamma: 0.5,
            beta: 3.0
        }
        .validate()
        .is_err());
        for kind in all_kinds() {
            assert!(kind.validate().is_ok());
        }
    }
}
