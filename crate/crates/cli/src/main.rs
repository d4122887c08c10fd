//! `mtkit`: statistical MT toolkit front-end.
//!
//! Subcommands wire the pipeline stages together: alignment training,
//! Viterbi alignment, shortlist extraction, shortlist coverage, n-best
//! re-ranking, scoring, corpus statistics, and BPE learn/apply. Values are
//! resolved flag-first, then config file, then built-in default, and every
//! subcommand is deterministic given config and seed: reruns write
//! byte-identical output.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage or I/O error.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mtkit::align::{self, ModelKind, TrainConfig, UnseenPolicy};
use mtkit::corpus::{
    apply_bpe_corpus, build_vocab, de_bpe, domain_stats, learn_bpe, load_bpe, load_parallel,
    load_sentences, save_bpe, Sentence,
};
use mtkit::metrics::{corpus_bleu, MetricKind, METEOR_ALPHA, METEOR_BETA, METEOR_GAMMA};
use mtkit::rerank::{parse_nbest, rerank, select_baseline, select_top, NBestList};
use mtkit::shortlist::{build_shortlist, coverage, export_shortlist, load_shortlist, save_shortlist};

use config::{
    PipelineConfig, DEFAULT_BEAM, DEFAULT_FREQUENT_F, DEFAULT_LENGTH_NORMALIZATION,
    DEFAULT_METRIC, DEFAULT_MIN_COUNT, DEFAULT_SAMPLE, DEFAULT_SEED, DEFAULT_SHORTLIST_K,
};

#[derive(Parser)]
#[command(
    name = "mtkit",
    version,
    about = "Statistical MT toolkit: alignment, shortlists, re-ranking, metrics, corpus diagnostics",
    after_help = "Values resolve flag-first, then config file, then built-in default.\n\
                  Exit codes: 0 success, 1 computation error, 2 usage or I/O error."
)]
struct Cli {
    /// TOML pipeline config; flags override config values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an alignment model (IBM1 or diagonal) on a parallel corpus.
    TrainAlign(TrainAlignArgs),
    /// Viterbi-align a parallel corpus with a trained model.
    Align(AlignArgs),
    /// Extract the per-source-token lexical shortlist from a trained model.
    BuildShortlist(BuildShortlistArgs),
    /// Measure which target tokens a shortlist can reach on a corpus.
    Coverage(CoverageArgs),
    /// Re-rank n-best lists by inter-hypothesis agreement.
    Rerank(RerankArgs),
    /// Score hypotheses against references: BLEU breakdown plus METEOR.
    Score(ScoreArgs),
    /// Corpus statistics: lengths, BPE inflation, vocabulary overlap.
    Stats(StatsArgs),
    /// Learn a BPE merge table from one or more text files.
    BpeLearn(BpeLearnArgs),
    /// Segment text with a learned BPE model.
    BpeApply(BpeApplyArgs),
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("mtkit: {err}");
        std::process::exit(exit_code(&err));
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::TrainAlign(a) => cmd_train_align(a, &cfg),
        Command::Align(a) => cmd_align(a, &cfg),
        Command::BuildShortlist(a) => cmd_build_shortlist(a, &cfg),
        Command::Coverage(a) => cmd_coverage(a, &cfg),
        Command::Rerank(a) => cmd_rerank(a, &cfg),
        Command::Score(a) => cmd_score(a, &cfg),
        Command::Stats(a) => cmd_stats(a, &cfg),
        Command::BpeLearn(a) => cmd_bpe_learn(a, &cfg),
        Command::BpeApply(a) => cmd_bpe_apply(a, &cfg),
    }
}

/// Usage-level failure: a missing or invalid setting rather than a broken
/// input file or a failed computation.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// 2 for usage and I/O problems, 1 for computation failures.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.downcast_ref::<Usage>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<mtkit::Error>() {
            return if e.is_input_error() { 2 } else { 1 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn usage(msg: String) -> anyhow::Error {
    anyhow::Error::new(Usage(msg))
}

/// Resolves a required path: flag first, then config, else a usage error
/// naming both spellings.
fn require(
    flag: Option<PathBuf>,
    config_value: Option<&PathBuf>,
    flag_name: &str,
    config_key: &str,
) -> Result<PathBuf> {
    flag.or_else(|| config_value.cloned()).ok_or_else(|| {
        usage(format!(
            "missing input: pass {flag_name} or set {config_key} in the config"
        ))
    })
}

fn pick<T>(flag: Option<T>, config_value: Option<T>, default: T) -> T {
    flag.or(config_value).unwrap_or(default)
}

/// Parses a config-file string with the same parser a flag uses, but
/// reports failures as config errors.
fn config_parse<T>(
    value: Option<&str>,
    parse: fn(&str) -> std::result::Result<T, mtkit::Error>,
    key: &str,
) -> Result<Option<T>> {
    value
        .map(|s| parse(s).map_err(|e| usage(format!("config {key}: {e}"))))
        .transpose()
}

fn parse_model_kind(s: &str) -> std::result::Result<ModelKind, mtkit::Error> {
    s.parse()
}

fn parse_metric(s: &str) -> std::result::Result<MetricKind, mtkit::Error> {
    s.parse()
}

fn parse_unseen(s: &str) -> std::result::Result<UnseenPolicy, mtkit::Error> {
    match s {
        "floor" => Ok(UnseenPolicy::Floor),
        "error" => Ok(UnseenPolicy::Error),
        other => Err(mtkit::Error::InvalidArgument(format!(
            "unknown unseen-token policy {other:?}; use floor or error"
        ))),
    }
}

/// Writes to the given path, or to stdout when no path is set.
fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| {
            anyhow::Error::new(mtkit::Error::Io {
                path: p.to_path_buf(),
                source: e,
            })
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn sentences_to_lines(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&s.as_line());
        out.push('\n');
    }
    out
}

#[derive(Args)]
struct TrainAlignArgs {
    /// Source-side corpus, one sentence per line.
    #[arg(long, value_name = "FILE")]
    source: Option<PathBuf>,
    /// Target-side corpus, one sentence per line.
    #[arg(long, value_name = "FILE")]
    target: Option<PathBuf>,
    /// Where to write the model file.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// EM iterations [default: 5].
    #[arg(long, value_name = "N")]
    iterations: Option<u32>,
    /// Model kind: ibm1 or diagonal [default: diagonal].
    #[arg(long, value_parser = parse_model_kind, value_name = "KIND")]
    model: Option<ModelKind>,
    /// Null-alignment probability p0 [default: 0.08].
    #[arg(long, value_name = "P")]
    null_prob: Option<f64>,
    /// Initial diagonal tension [default: 4.0].
    #[arg(long, value_name = "LAMBDA")]
    tension: Option<f64>,
    /// Update the tension during EM: true or false [default: true].
    #[arg(long, value_name = "BOOL")]
    learn_tension: Option<bool>,
    /// Tension gradient-ascent step size [default: 0.1].
    #[arg(long, value_name = "STEP")]
    tension_step: Option<f64>,
    /// Add-alpha smoothing on expected counts [default: 0].
    #[arg(long, value_name = "ALPHA")]
    smoothing_alpha: Option<f64>,
}

fn cmd_train_align(a: TrainAlignArgs, cfg: &PipelineConfig) -> Result<()> {
    let source = require(a.source, cfg.paths.source.as_ref(), "--source", "[paths] source")?;
    let target = require(a.target, cfg.paths.target.as_ref(), "--target", "[paths] target")?;
    let output = require(a.output, cfg.paths.model.as_ref(), "--output", "[paths] model")?;

    let defaults = TrainConfig::default();
    let t = &cfg.train;
    let model_kind = match a.model {
        Some(kind) => kind,
        None => config_parse(t.model.as_deref(), parse_model_kind, "[train] model")?
            .unwrap_or(defaults.model),
    };
    let train_cfg = TrainConfig {
        iterations: pick(a.iterations, t.iterations, defaults.iterations),
        model: model_kind,
        null_prob: pick(a.null_prob, t.null_prob, defaults.null_prob),
        tension_init: pick(a.tension, t.tension_init, defaults.tension_init),
        learn_tension: pick(a.learn_tension, t.learn_tension, defaults.learn_tension),
        tension_step: pick(a.tension_step, t.tension_step, defaults.tension_step),
        smoothing_alpha: pick(a.smoothing_alpha, t.smoothing_alpha, defaults.smoothing_alpha),
    };

    let corpus = load_parallel(&source, &target)?;
    let model = align::train(&corpus, &train_cfg)?;
    align::save_model(&model, &output)?;
    println!(
        "wrote {}: {} kind, {} pairs, {} iterations, tension {:.6}, p0 {}",
        output.display(),
        model.kind,
        corpus.len(),
        model.iterations_run,
        model.tension,
        model.null_prob
    );
    Ok(())
}

#[derive(Args)]
struct AlignArgs {
    /// Trained alignment model file.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Source-side corpus; every pair must be non-empty on both sides.
    #[arg(long, value_name = "FILE")]
    source: Option<PathBuf>,
    /// Target-side corpus.
    #[arg(long, value_name = "FILE")]
    target: Option<PathBuf>,
    /// Output file for Pharaoh-format links; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Unseen-token policy: floor or error [default: floor].
    #[arg(long, value_parser = parse_unseen, value_name = "POLICY")]
    unseen: Option<UnseenPolicy>,
}

fn resolve_unseen(flag: Option<UnseenPolicy>, cfg: &PipelineConfig) -> Result<UnseenPolicy> {
    match flag {
        Some(p) => Ok(p),
        None => Ok(config_parse(
            cfg.general.unseen.as_deref(),
            parse_unseen,
            "[general] unseen",
        )?
        .unwrap_or_default()),
    }
}

fn cmd_align(a: AlignArgs, cfg: &PipelineConfig) -> Result<()> {
    let model_path = require(a.model, cfg.paths.model.as_ref(), "--model", "[paths] model")?;
    let source = require(a.source, cfg.paths.source.as_ref(), "--source", "[paths] source")?;
    let target = require(a.target, cfg.paths.target.as_ref(), "--target", "[paths] target")?;
    let unseen = resolve_unseen(a.unseen, cfg)?;

    let model = align::load_model(&model_path)?;
    let corpus = load_parallel(&source, &target)?;
    let mut out = String::new();
    for (f, e) in &corpus.pairs {
        let links = align::viterbi_align(&model, f, e, unseen)?;
        out.push_str(&links.to_pharaoh());
        out.push('\n');
    }
    write_output(a.output.as_deref(), &out)
}

#[derive(Args)]
struct BuildShortlistArgs {
    /// Trained alignment model file.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Target-side corpus for frequency-based always-include tokens.
    #[arg(long, value_name = "FILE")]
    target: Option<PathBuf>,
    /// Where to write the shortlist.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Targets kept per source token [default: 10].
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    /// Always-include the F most frequent target tokens [default: 0].
    #[arg(long, value_name = "F")]
    frequent_f: Option<usize>,
    /// Emit bare `source target probability` triples without headers.
    #[arg(long)]
    export: bool,
}

fn cmd_build_shortlist(a: BuildShortlistArgs, cfg: &PipelineConfig) -> Result<()> {
    let model_path = require(a.model, cfg.paths.model.as_ref(), "--model", "[paths] model")?;
    let output = require(
        a.output,
        cfg.paths.shortlist.as_ref(),
        "--output",
        "[paths] shortlist",
    )?;
    let k = pick(a.k, cfg.shortlist.k, DEFAULT_SHORTLIST_K);
    let frequent_f = pick(a.frequent_f, cfg.shortlist.frequent_f, DEFAULT_FREQUENT_F);

    let model = align::load_model(&model_path)?;
    let target_counts = match a.target.or_else(|| cfg.paths.target.clone()) {
        Some(path) => build_vocab(&load_sentences(&path)?, 1),
        None => build_vocab(&[], 1),
    };
    let sl = build_shortlist(&model.ttable, k, frequent_f, &target_counts)?;
    if a.export {
        export_shortlist(&sl, &output)?;
    } else {
        save_shortlist(&sl, &output)?;
    }
    println!(
        "wrote {}: {} source tokens, k={}, {} always-include",
        output.display(),
        sl.per_source.len(),
        sl.k,
        sl.always_include.len()
    );
    Ok(())
}

#[derive(Args)]
struct CoverageArgs {
    /// Shortlist file (the headered format written by build-shortlist).
    #[arg(long, value_name = "FILE")]
    shortlist: Option<PathBuf>,
    /// Source-side corpus.
    #[arg(long, value_name = "FILE")]
    source: Option<PathBuf>,
    /// Target-side corpus whose tokens are tested for reachability.
    #[arg(long, value_name = "FILE")]
    target: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Also print one coverage line per sentence.
    #[arg(long)]
    per_sentence: bool,
}

fn cmd_coverage(a: CoverageArgs, cfg: &PipelineConfig) -> Result<()> {
    let sl_path = require(
        a.shortlist,
        cfg.paths.shortlist.as_ref(),
        "--shortlist",
        "[paths] shortlist",
    )?;
    let source = require(a.source, cfg.paths.source.as_ref(), "--source", "[paths] source")?;
    let target = require(a.target, cfg.paths.target.as_ref(), "--target", "[paths] target")?;

    let sl = load_shortlist(&sl_path)?;
    let corpus = load_parallel(&source, &target)?;
    let report = coverage(&sl, &corpus)?;
    let mut out = format!(
        "coverage\t{:.6}\nreachable\t{}\ntotal\t{}\n",
        report.coverage, report.reachable_tokens, report.total_tokens
    );
    if a.per_sentence {
        for (i, c) in report.per_sentence.iter().enumerate() {
            out.push_str(&format!("{i}\t{c:.6}\n"));
        }
    }
    write_output(a.output.as_deref(), &out)
}

#[derive(Args)]
struct RerankArgs {
    /// N-best file: `id ||| text ||| features ||| score` lines.
    #[arg(long, value_name = "FILE")]
    nbest: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Similarity metric: sentbleu, chrf, ter, or meteor [default: sentbleu].
    #[arg(long, value_parser = parse_metric, value_name = "METRIC")]
    metric: Option<MetricKind>,
    /// Maximum hypotheses per sentence [default: 6].
    #[arg(long, value_name = "N")]
    beam: Option<usize>,
    /// Skip re-ranking and emit the decoder's 1-best per sentence.
    #[arg(long)]
    passthrough: bool,
    /// Emit the full n-best lists in re-ranked order with an appended
    /// agreement-score field instead of one translation per line.
    #[arg(long, conflicts_with = "passthrough")]
    annotate: bool,
}

fn annotated_nbest(lists: &[NBestList], metric: MetricKind, beam: usize, lennorm: f64) -> String {
    // Provenance header: the decoder settings this n-best list presumes.
    // Length normalization is carried from the config; nothing here uses it.
    let mut out = format!("# metric={metric} beam={beam} length_normalization={lennorm}\n");
    for list in lists {
        for r in rerank(list, metric) {
            out.push_str(&format!(
                "{} ||| {} ||| {} ||| {} ||| {:.6}\n",
                list.sentence_id,
                r.hypothesis.tokens.as_line(),
                r.hypothesis.features,
                r.hypothesis.model_score,
                r.agreement_score
            ));
        }
    }
    out
}

fn cmd_rerank(a: RerankArgs, cfg: &PipelineConfig) -> Result<()> {
    let nbest = require(a.nbest, cfg.paths.nbest.as_ref(), "--nbest", "[paths] nbest")?;
    let output = a.output.or_else(|| cfg.paths.translations.clone());
    let beam = pick(a.beam, cfg.rerank.beam, DEFAULT_BEAM);
    let metric = match a.metric {
        Some(m) => m,
        None => config_parse(cfg.rerank.metric.as_deref(), parse_metric, "[rerank] metric")?
            .unwrap_or_else(|| DEFAULT_METRIC.parse().expect("default metric parses")),
    };

    let lists = parse_nbest(&nbest, beam)?;
    let out = if a.passthrough {
        sentences_to_lines(&select_baseline(&lists)?)
    } else if a.annotate {
        let lennorm = cfg
            .general
            .length_normalization
            .unwrap_or(DEFAULT_LENGTH_NORMALIZATION);
        annotated_nbest(&lists, metric, beam, lennorm)
    } else {
        sentences_to_lines(&select_top(&lists, metric)?)
    };
    write_output(output.as_deref(), &out)
}

#[derive(Args)]
struct ScoreArgs {
    /// Hypotheses, one per line; de-BPE'd before scoring.
    #[arg(long, value_name = "FILE")]
    hypotheses: Option<PathBuf>,
    /// References, one per line; de-BPE'd before scoring.
    #[arg(long, value_name = "FILE")]
    references: Option<PathBuf>,
    /// Baseline hypotheses; adds a METEOR delta column against them.
    #[arg(long, value_name = "FILE")]
    baseline: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn mean_meteor(hyps: &[Sentence], refs: &[Sentence]) -> f64 {
    let total: f64 = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| {
            mtkit::metrics::meteor_lite(&h.tokens, &r.tokens, METEOR_ALPHA, METEOR_GAMMA, METEOR_BETA)
        })
        .sum();
    total / hyps.len() as f64
}

fn cmd_score(a: ScoreArgs, cfg: &PipelineConfig) -> Result<()> {
    let hyp_path = require(
        a.hypotheses,
        cfg.paths.hypotheses.as_ref(),
        "--hypotheses",
        "[paths] hypotheses",
    )?;
    let ref_path = require(
        a.references,
        cfg.paths.references.as_ref(),
        "--references",
        "[paths] references",
    )?;

    let hyps: Vec<Sentence> = load_sentences(&hyp_path)?.iter().map(de_bpe).collect();
    let refs: Vec<Sentence> = load_sentences(&ref_path)?.iter().map(de_bpe).collect();
    let breakdown = corpus_bleu(&hyps, &refs)?;
    let meteor = mean_meteor(&hyps, &refs);

    let mut header = String::from("p1\tp2\tp3\tp4\tBP\tBLEU\tMETEOR");
    let mut row = format!(
        "{:.2}\t{:.2}\t{:.2}\t{:.2}\t{:.3}\t{:.2}\t{:.2}",
        breakdown.precisions[0] * 100.0,
        breakdown.precisions[1] * 100.0,
        breakdown.precisions[2] * 100.0,
        breakdown.precisions[3] * 100.0,
        breakdown.brevity_penalty,
        breakdown.bleu * 100.0,
        meteor * 100.0
    );
    if let Some(base_path) = a.baseline.or_else(|| cfg.paths.baseline.clone()) {
        let base: Vec<Sentence> = load_sentences(&base_path)?.iter().map(de_bpe).collect();
        if base.len() != refs.len() {
            return Err(mtkit::Error::LengthMismatch {
                left: base.len(),
                right: refs.len(),
            }
            .into());
        }
        header.push_str("\tMETEOR_delta");
        row.push_str(&format!("\t{:+.2}", (meteor - mean_meteor(&base, &refs)) * 100.0));
    }

    let mut out = String::new();
    if breakdown.hyp_length == 0 {
        out.push_str("# hyp_length = 0: BLEU and BP reported as 0 by convention\n");
    }
    out.push_str(&header);
    out.push('\n');
    out.push_str(&row);
    out.push('\n');
    write_output(a.output.as_deref(), &out)
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus side to measure, one sentence per line.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// BPE merge table used for the post-BPE length column.
    #[arg(long, value_name = "FILE")]
    bpe_model: Option<PathBuf>,
    /// Reference-domain corpus for the overlap column; the measured corpus
    /// itself when omitted (overlap then equals vocab size).
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Count a type at >= MIN occurrences [default: 21, i.e. more than 20].
    #[arg(long, value_name = "MIN")]
    min_count: Option<u64>,
    /// Keep each sentence with probability P before measuring [default: 1.0].
    #[arg(long, value_name = "P")]
    sample: Option<f64>,
    /// Sampling seed [default: 1].
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn cmd_stats(a: StatsArgs, cfg: &PipelineConfig) -> Result<()> {
    let corpus_path = require(a.corpus, cfg.paths.corpus.as_ref(), "--corpus", "[paths] corpus")?;
    let bpe_path = require(
        a.bpe_model,
        cfg.paths.bpe_model.as_ref(),
        "--bpe-model",
        "[paths] bpe_model",
    )?;
    let min_count = pick(a.min_count, cfg.stats.min_count, DEFAULT_MIN_COUNT);
    let sample = pick(a.sample, cfg.stats.sample, DEFAULT_SAMPLE);
    let seed = pick(a.seed, cfg.general.seed, DEFAULT_SEED);
    if !(0.0..=1.0).contains(&sample) {
        return Err(usage(format!("--sample must be in [0, 1], got {sample}")));
    }

    let mut sentences = load_sentences(&corpus_path)?;
    if sample < 1.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sentences.retain(|_| rng.random::<f64>() < sample);
    }
    let bpe = load_bpe(&bpe_path)?;
    let reference_vocab = match a.reference.or_else(|| cfg.paths.reference_corpus.clone()) {
        Some(path) => build_vocab(&load_sentences(&path)?, min_count),
        None => build_vocab(&sentences, min_count),
    };
    let stats = domain_stats(&sentences, &bpe, &reference_vocab, min_count)?;
    let out = format!(
        "sentences\tavg_len\tavg_bpe_len\tvocab_size\toverlap\tinflation\n\
         {}\t{:.4}\t{:.4}\t{}\t{}\t{:.4}\n",
        sentences.len(),
        stats.avg_len_before,
        stats.avg_len_after,
        stats.vocab_size,
        stats.overlap_with_reference,
        stats.inflation_ratio
    );
    write_output(a.output.as_deref(), &out)
}

#[derive(Args)]
struct BpeLearnArgs {
    /// Training text; repeat the flag to concatenate several files
    /// (e.g. both sides of a parallel corpus for a joint vocabulary).
    #[arg(long, value_name = "FILE")]
    input: Vec<PathBuf>,
    /// Number of merge operations to learn.
    #[arg(long, value_name = "N")]
    merges: usize,
    /// Where to write the merge table.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn cmd_bpe_learn(a: BpeLearnArgs, cfg: &PipelineConfig) -> Result<()> {
    let output = require(
        a.output,
        cfg.paths.bpe_model.as_ref(),
        "--output",
        "[paths] bpe_model",
    )?;
    let inputs: Vec<PathBuf> = if a.input.is_empty() {
        [&cfg.paths.source, &cfg.paths.target]
            .into_iter()
            .flatten()
            .cloned()
            .collect()
    } else {
        a.input
    };
    if inputs.is_empty() {
        return Err(usage(
            "missing input: pass --input or set [paths] source/target in the config".into(),
        ));
    }

    let mut sentences = Vec::new();
    for path in &inputs {
        sentences.extend(load_sentences(path)?);
    }
    let model = learn_bpe(&sentences, a.merges)?;
    save_bpe(&model, &output)?;
    println!(
        "wrote {}: {} merges from {} sentences",
        output.display(),
        model.merges.len(),
        sentences.len()
    );
    Ok(())
}

#[derive(Args)]
struct BpeApplyArgs {
    /// BPE merge table.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Text to segment, one sentence per line.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn cmd_bpe_apply(a: BpeApplyArgs, cfg: &PipelineConfig) -> Result<()> {
    let model_path = require(
        a.model,
        cfg.paths.bpe_model.as_ref(),
        "--model",
        "[paths] bpe_model",
    )?;
    let input = require(a.input, cfg.paths.corpus.as_ref(), "--input", "[paths] corpus")?;

    let model = load_bpe(&model_path)?;
    let sentences = load_sentences(&input)?;
    let segmented = apply_bpe_corpus(&model, &sentences);
    write_output(a.output.as_deref(), &sentences_to_lines(&segmented))
}
