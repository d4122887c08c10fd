//! Declarative pipeline configuration.
//!
//! One TOML file describes a whole experiment: corpus paths, training
//! hyperparameters, shortlist size, re-ranking metric, statistics
//! thresholds, and the random seed. Every key is optional; command-line
//! flags override config values, which override the built-in defaults
//! listed here. Reruns from the same config and seed are byte-identical.

use std::path::{Path, PathBuf};

use mtkit::{Error, Result};
use serde::Deserialize;

pub const DEFAULT_SHORTLIST_K: usize = 10;
pub const DEFAULT_FREQUENT_F: usize = 0;
pub const DEFAULT_METRIC: &str = "sentbleu";
pub const DEFAULT_BEAM: usize = 6;
/// Vocabulary threshold: tokens appearing more than 20 times.
pub const DEFAULT_MIN_COUNT: u64 = 21;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLE: f64 = 1.0;
/// Decoder beam-search length normalization. Recorded for provenance when
/// reporting a configuration; no subcommand consumes it.
pub const DEFAULT_LENGTH_NORMALIZATION: f64 = 0.6;

/// Input and output locations. A path given here can be overridden by the
/// corresponding flag of any subcommand that uses it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Source-side corpus, one sentence per line.
    pub source: Option<PathBuf>,
    /// Target-side corpus, one sentence per line.
    pub target: Option<PathBuf>,
    /// Alignment model file (train-align output; align/build-shortlist input).
    pub model: Option<PathBuf>,
    /// Shortlist file (build-shortlist output; coverage input).
    pub shortlist: Option<PathBuf>,
    /// N-best list in `id ||| text ||| features ||| score` format.
    pub nbest: Option<PathBuf>,
    /// Re-ranked translations (rerank output).
    pub translations: Option<PathBuf>,
    /// Hypotheses to score, one per line.
    pub hypotheses: Option<PathBuf>,
    /// References to score against, one per line.
    pub references: Option<PathBuf>,
    /// Baseline hypotheses for the METEOR delta column of `score`.
    pub baseline: Option<PathBuf>,
    /// Corpus side measured by `stats`.
    pub corpus: Option<PathBuf>,
    /// Reference-domain corpus for the overlap column of `stats`.
    pub reference_corpus: Option<PathBuf>,
    /// BPE merge table (bpe-learn output; bpe-apply/stats input).
    pub bpe_model: Option<PathBuf>,
}

/// Alignment-training keys; defaults match `mtkit::align::TrainConfig`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    /// EM iterations (default 5).
    pub iterations: Option<u32>,
    /// "ibm1" or "diagonal" (default "diagonal").
    pub model: Option<String>,
    /// Null-alignment probability p0 (default 0.08).
    pub null_prob: Option<f64>,
    /// Initial diagonal tension (default 4.0).
    pub tension_init: Option<f64>,
    /// Update the tension during EM (default true).
    pub learn_tension: Option<bool>,
    /// Tension gradient-ascent step size (default 0.1).
    pub tension_step: Option<f64>,
    /// Add-alpha smoothing on expected counts (default 0.0).
    pub smoothing_alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortlistSection {
    /// Per-source-token list size (default 10).
    pub k: Option<usize>,
    /// Always-include the F most frequent target tokens (default 0).
    pub frequent_f: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RerankSection {
    /// Similarity metric: sentbleu, chrf, ter, or meteor (default sentbleu).
    pub metric: Option<String>,
    /// Maximum hypotheses per sentence (default 6).
    pub beam: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsSection {
    /// Vocabulary threshold: count a type at >= min_count occurrences
    /// (default 21, i.e. appearing more than 20 times).
    pub min_count: Option<u64>,
    /// Keep each sentence with this probability before measuring
    /// (default 1.0, i.e. the whole corpus).
    pub sample: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralSection {
    /// Seed for every randomized operation (default 1).
    pub seed: Option<u64>,
    /// Unseen-token policy at inference: "floor" or "error" (default floor).
    pub unseen: Option<String>,
    /// Decoder length normalization; provenance metadata only (default 0.6).
    pub length_normalization: Option<f64>,
}

/// Everything a pipeline run needs, section by section. All fields
/// optional; see the per-field defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub shortlist: ShortlistSection,
    #[serde(default)]
    pub rerank: RerankSection,
    #[serde(default)]
    pub stats: StatsSection,
    #[serde(default)]
    pub general: GeneralSection,
}

impl PipelineConfig {
    /// Reads and parses a TOML config file. Parse failures report the
    /// offending line.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        toml::from_str(&text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                msg: e.message().to_string(),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_parses_to_all_defaults() {
        let cfg: PipelineConfig = toml::from_str("").unwrap();
        assert!(cfg.paths.source.is_none());
        assert!(cfg.shortlist.k.is_none());
        assert!(cfg.rerank.metric.is_none());
    }

    #[test]
    fn sections_parse() {
        let cfg: PipelineConfig = toml::from_str(
            r#"
            [paths]
            source = "s.txt"
            target = "t.txt"

            [train]
            iterations = 3
            model = "ibm1"

            [shortlist]
            k = 50

            [rerank]
            metric = "chrf"
            beam = 8

            [stats]
            min_count = 5
            sample = 0.05

            [general]
            seed = 7
            length_normalization = 0.6
            "#,
        )
        .unwrap();
        assert_eq!(cfg.paths.source.unwrap(), PathBuf::from("s.txt"));
        assert_eq!(cfg.train.iterations, Some(3));
        assert_eq!(cfg.train.model.as_deref(), Some("ibm1"));
        assert_eq!(cfg.shortlist.k, Some(50));
        assert_eq!(cfg.rerank.metric.as_deref(), Some("chrf"));
        assert_eq!(cfg.rerank.beam, Some(8));
        assert_eq!(cfg.stats.min_count, Some(5));
        assert_eq!(cfg.stats.sample, Some(0.05));
        assert_eq!(cfg.general.seed, Some(7));
        assert_eq!(cfg.general.length_normalization, Some(0.6));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<PipelineConfig>("[shortlist]\nsize = 10\n");
        assert!(err.is_err());
    }

    #[test]
    fn load_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[shortlist]\nk = \"ten\"\n").unwrap();
        let err = PipelineConfig::load(&path).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }
}
