//! N-best list re-ranking by aggregated inter-hypothesis agreement.
//!
//! Each hypothesis is scored by summing its similarity to every other
//! hypothesis in the beam, with the other hypothesis playing the reference
//! role; the beam is then reordered by that score. A hypothesis unlike all
//! its peers (a hallucination, typically) sinks to the bottom without any
//! reference translation being consulted.

use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{de_bpe, Sentence};
use crate::error::{Error, Result};
use crate::metrics::MetricKind;

/// One decoder output line.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    /// Possibly BPE-level tokens, exactly as decoded.
    pub tokens: Sentence,
    /// Decoder model score, higher better. Not used for agreement ranking.
    pub model_score: f64,
    /// Position in the decoder's own ordering, 0 = model 1-best.
    pub original_rank: usize,
    /// Raw feature-scores field, preserved for annotated output.
    pub features: String,
}

/// All hypotheses the decoder produced for one source sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct NBestList {
    pub sentence_id: usize,
    pub hypotheses: Vec<Hypothesis>,
}

/// A hypothesis with its agreement score and post-reranking position.
#[derive(Debug, Clone, PartialEq)]
pub struct RerankedHypothesis {
    pub hypothesis: Hypothesis,
    pub agreement_score: f64,
    pub final_rank: usize,
}

/// Parses the common n-best text format: one hypothesis per line,
/// `id ||| hypothesis text ||| feature scores ||| score`, grouped by id with
/// ids strictly increasing across the file. No group may exceed `beam`
/// hypotheses.
pub fn parse_nbest(path: &Path, beam: usize) -> Result<Vec<NBestList>> {
    if beam < 1 {
        return Err(Error::InvalidArgument("beam must be >= 1".into()));
    }
    let lines = crate::corpus::read_lines(path)?;
    let mut lists: Vec<NBestList> = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split("|||").map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                lineno,
                format!(
                    "expected 'id ||| text ||| features ||| score', got {} field(s)",
                    fields.len()
                ),
            ));
        }
        let id: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad sentence id {:?}", fields[0])))?;
        let model_score: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad model score {:?}", fields[3])))?;
        if !model_score.is_finite() {
            return Err(Error::parse(
                path,
                lineno,
                format!("non-finite model score {:?}", fields[3]),
            ));
        }
        let current = match lists.last_mut() {
            Some(last) if last.sentence_id == id => last,
            Some(last) if last.sentence_id > id => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!(
                        "sentence ids must be strictly increasing ({} after {})",
                        id, last.sentence_id
                    ),
                ));
            }
            _ => {
                lists.push(NBestList {
                    sentence_id: id,
                    hypotheses: Vec::new(),
                });
                lists.last_mut().expect("just pushed")
            }
        };
        if current.hypotheses.len() >= beam {
            return Err(Error::parse(
                path,
                lineno,
                format!("more than beam={beam} hypotheses for sentence {id}"),
            ));
        }
        let original_rank = current.hypotheses.len();
        current.hypotheses.push(Hypothesis {
            tokens: Sentence::from_line(fields[1]),
            model_score,
            original_rank,
            features: fields[2].to_string(),
        });
    }
    Ok(lists)
}

/// Agreement score per hypothesis: the sum of similarity(hyp_i, hyp_j) over
/// all j != i, computed on de-BPE'd tokens with hyp_j as the reference.
/// A singleton list scores 0.
pub fn agreement_scores(list: &NBestList, metric: MetricKind) -> Vec<f64> {
    let plain: Vec<Sentence> = list.hypotheses.iter().map(|h| de_bpe(&h.tokens)).collect();
    (0..plain.len())
        .map(|i| {
            let mut score = 0.0;
            for (j, reference) in plain.iter().enumerate() {
                if j != i {
                    score += metric.similarity(&plain[i].tokens, &reference.tokens);
                }
            }
            score
        })
        .collect()
}

/// Reorders a beam by agreement score descending, breaking ties by the
/// decoder's original rank, and records the resulting positions.
pub fn rerank(list: &NBestList, metric: MetricKind) -> Vec<RerankedHypothesis> {
    let scores = agreement_scores(list, metric);
    let mut order: Vec<usize> = (0..list.hypotheses.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| list.hypotheses[a].original_rank.cmp(&list.hypotheses[b].original_rank))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(final_rank, i)| RerankedHypothesis {
            hypothesis: list.hypotheses[i].clone(),
            agreement_score: scores[i],
            final_rank,
        })
        .collect()
}

fn check_lists(lists: &[NBestList]) -> Result<()> {
    if lists.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let first = lists[0].sentence_id;
    for (i, l) in lists.iter().enumerate() {
        if l.sentence_id != first + i {
            return Err(Error::InvalidArgument(format!(
                "missing sentence id {} in n-best input",
                first + i
            )));
        }
        if l.hypotheses.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sentence {} has no hypotheses",
                l.sentence_id
            )));
        }
    }
    Ok(())
}

/// Re-ranks every beam and returns the top translation per sentence,
/// de-BPE'd. Ids must be contiguous so output line i corresponds to source
/// sentence i.
pub fn select_top(lists: &[NBestList], metric: MetricKind) -> Result<Vec<Sentence>> {
    check_lists(lists)?;
    Ok(lists
        .par_iter()
        .map(|l| {
            let ranked = rerank(l, metric);
            de_bpe(&ranked[0].hypothesis.tokens)
        })
        .collect())
}

/// The decoder's own 1-best per sentence, de-BPE'd: the re-ranking
/// baseline.
pub fn select_baseline(lists: &[NBestList]) -> Result<Vec<Sentence>> {
    check_lists(lists)?;
    lists
        .iter()
        .map(|l| {
            l.hypotheses
                .iter()
                .find(|h| h.original_rank == 0)
                .map(|h| de_bpe(&h.tokens))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "sentence {} has no rank-0 hypothesis",
                        l.sentence_id
                    ))
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp(text: &str, rank: usize) -> Hypothesis {
        Hypothesis {
            tokens: Sentence::from_line(text),
            model_score: -(rank as f64),
            original_rank: rank,
            features: String::new(),
        }
    }

    fn list(texts: &[&str]) -> NBestList {
        NBestList {
            sentence_id: 0,
            hypotheses: texts.iter().enumerate().map(|(r, t)| hyp(t, r)).collect(),
        }
    }

    fn write_nbest(dir: &tempfile::TempDir, content: &str) -> std::path::PathBuf {
        let path = dir.path().join("n.best");
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn parse_groups_by_id() {
        let dir = tempfile::tempdir().unwrap();
        let mut content = String::new();
        for id in 0..2 {
            for r in 0..6 {
                content.push_str(&format!("{id} ||| tok {r} ||| f0= 0.1 ||| -{r}.5\n"));
            }
        }
        let path = write_nbest(&dir, &content);
        let lists = parse_nbest(&path, 6).unwrap();
        assert_eq!(lists.len(), 2);
        assert_eq!(lists[0].hypotheses.len(), 6);
        assert_eq!(lists[1].sentence_id, 1);
        assert_eq!(lists[0].hypotheses[3].original_rank, 3);
        assert_eq!(lists[0].hypotheses[3].model_score, -3.5);
        assert_eq!(lists[0].hypotheses[3].features, "f0= 0.1");
        assert_eq!(lists[0].hypotheses[3].tokens.tokens, vec!["tok", "3"]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_nbest(&dir, "0 ||| a b ||| x ||| -1.0\n0 ||| c d ||| x\n");
        let err = parse_nbest(&path, 6).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");

        let path = write_nbest(&dir, "0 ||| a ||| x ||| nope\n");
        let err = parse_nbest(&path, 6).unwrap_err().to_string();
        assert!(err.contains("model score"), "{err}");

        let path = write_nbest(&dir, "1 ||| a ||| x ||| -1\n0 ||| b ||| x ||| -1\n");
        let err = parse_nbest(&path, 6).unwrap_err().to_string();
        assert!(err.contains("strictly increasing"), "{err}");
    }

    #[test]
    fn parse_enforces_beam() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_nbest(&dir, "0 ||| a ||| x ||| -1\n0 ||| b ||| x ||| -2\n");
        assert!(parse_nbest(&path, 2).is_ok());
        let err = parse_nbest(&path, 1).unwrap_err().to_string();
        assert!(err.contains("beam=1"), "{err}");
        assert!(parse_nbest(&path, 0).is_err());
    }

    #[test]
    fn singleton_scores_zero() {
        let l = list(&["a b c"]);
        assert_eq!(agreement_scores(&l, MetricKind::SentBleu), vec![0.0]);
    }

    #[test]
    fn identical_hypotheses_score_b_minus_one() {
        let l = list(&["a b c d", "a b c d", "a b c d"]);
        let scores = agreement_scores(&l, MetricKind::SentBleu);
        assert_eq!(scores, vec![2.0, 2.0, 2.0]);
        // Pure tie: output order equals input order.
        let ranked = rerank(&l, MetricKind::SentBleu);
        let ranks: Vec<usize> = ranked.iter().map(|r| r.hypothesis.original_rank).collect();
        assert_eq!(ranks, vec![0, 1, 2]);
    }

    #[test]
    fn pair_uses_counterpart_as_reference() {
        let l = list(&["a b c d", "a b c"]);
        let scores = agreement_scores(&l, MetricKind::SentBleu);
        assert_eq!(
            scores[0],
            MetricKind::SentBleu.similarity(
                &Sentence::from_line("a b c d").tokens,
                &Sentence::from_line("a b c").tokens
            )
        );
        assert_eq!(
            scores[1],
            MetricKind::SentBleu.similarity(
                &Sentence::from_line("a b c").tokens,
                &Sentence::from_line("a b c d").tokens
            )
        );
        assert_ne!(scores[0], scores[1]);
    }

    #[test]
    fn scores_match_double_loop() {
        let l = list(&["a b c d", "a b x d", "a y c d", "q w e r"]);
        let plain: Vec<Vec<String>> = l
            .hypotheses
            .iter()
            .map(|h| h.tokens.tokens.clone())
            .collect();
        for metric in [MetricKind::SentBleu, MetricKind::chrf(), MetricKind::meteor()] {
            let got = agreement_scores(&l, metric);
            for i in 0..plain.len() {
                let mut want = 0.0;
                for j in 0..plain.len() {
                    if i != j {
                        want += metric.similarity(&plain[i], &plain[j]);
                    }
                }
                assert_eq!(got[i], want, "{metric} i={i}");
            }
        }
    }

    #[test]
    fn hallucination_ranks_last() {
        let l = list(&[
            "the cat sat on the mat",
            "the cat sat on a mat",
            "a cat sat on the mat",
            "purple elephants juggle quietly",
        ]);
        let ranked = rerank(&l, MetricKind::SentBleu);
        assert_eq!(ranked.last().unwrap().hypothesis.original_rank, 3);
        assert_eq!(ranked.last().unwrap().agreement_score, 0.0);
        assert_eq!(ranked[0].final_rank, 0);
    }

    #[test]
    fn similarity_sees_de_bpe_text() {
        // After de-BPE both hypotheses are "pilot x y z"; at BPE level they
        // differ. Agreement must be computed post-merge.
        let l = list(&["p@@ il@@ ot x y z", "pilot x y z"]);
        let scores = agreement_scores(&l, MetricKind::SentBleu);
        assert_eq!(scores, vec![1.0, 1.0]);
    }

    #[test]
    fn select_top_and_baseline() {
        let lists = vec![
            NBestList {
                sentence_id: 0,
                hypotheses: vec![
                    hyp("z z z z", 0),
                    hyp("the cat sat", 1),
                    hyp("the cat sat", 2),
                ],
            },
            NBestList {
                sentence_id: 1,
                hypotheses: vec![hyp("only one", 0)],
            },
        ];
        let top = select_top(&lists, MetricKind::SentBleu).unwrap();
        assert_eq!(top[0].as_line(), "the cat sat");
        assert_eq!(top[1].as_line(), "only one");
        let base = select_baseline(&lists).unwrap();
        assert_eq!(base[0].as_line(), "z z z z");
        assert_eq!(base[1].as_line(), "only one");
    }

    #[test]
    fn select_top_requires_contiguous_ids() {
        let lists = vec![
            NBestList {
                sentence_id: 0,
                hypotheses: vec![hyp("a", 0)],
            },
            NBestList {
                sentence_id: 2,
                hypotheses: vec![hyp("b", 0)],
            },
        ];
        let err = select_top(&lists, MetricKind::SentBleu).unwrap_err().to_string();
        assert!(err.contains("missing sentence id 1"), "{err}");
        assert!(select_top(&[], MetricKind::SentBleu).is_err());
    }
}
