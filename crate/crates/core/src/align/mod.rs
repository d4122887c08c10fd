//! EM training of IBM Model 1 and a diagonal-prior alignment model.
//!
//! Both models factor a sentence pair's likelihood per target position i
//! (1-based, target length m, source length n) as sum_j delta(j) * t(e_i|f_j)
//! over j in {NULL, 1..n}. The alignment prior delta is
//!
//! - ibm1:     delta(NULL) = p0, delta(j) = (1 - p0) / n
//! - diagonal: delta(NULL) = p0,
//!             delta(j) = (1 - p0) * exp(lambda * h(i,j,m,n)) / Z_i,
//!             h(i,j,m,n) = -|i/m - j/n|,
//!
//! with Z_i summing exp(lambda * h) over j = 1..n exactly. The tension lambda
//! controls how sharply the diagonal is preferred; p0 is fixed, not learned.
//!
//! Expected-count accumulation is parallelized over fixed-size chunks of
//! sentence pairs merged in chunk order, so results are bit-identical across
//! thread counts.

mod io;

pub use io::{load_model, save_model};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::corpus::{ParallelCorpus, Sentence};
use crate::error::{Error, Result};

/// Synthetic source token that absorbs target words with no source
/// counterpart. Present in trained tables whenever null_prob > 0.
pub const NULL_TOKEN: &str = "<NULL>";

/// Probability substituted for absent table entries under
/// [`UnseenPolicy::Floor`].
pub const UNSEEN_FLOOR: f64 = 1e-20;

const TENSION_MIN: f64 = 0.1;
const TENSION_MAX: f64 = 20.0;

/// Pairs per parallel work unit; fixed so reductions are reproducible.
const CHUNK_PAIRS: usize = 256;
/// Chunks materialized per wave, bounding peak memory of the merge.
const CHUNKS_PER_WAVE: usize = 32;

/// Conditional distributions t(target | source).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TranslationTable {
    pub probs: BTreeMap<String, BTreeMap<String, f64>>,
}

impl TranslationTable {
    pub fn new(probs: BTreeMap<String, BTreeMap<String, f64>>) -> Self {
        TranslationTable { probs }
    }

    pub fn prob(&self, source: &str, target: &str) -> Option<f64> {
        self.probs.get(source).and_then(|r| r.get(target)).copied()
    }

    pub fn row(&self, source: &str) -> Option<&BTreeMap<String, f64>> {
        self.probs.get(source)
    }

    /// Swaps the key roles: entry (f, e, p) becomes (e, f, p). Probabilities
    /// are carried over unchanged, so transposed rows are generally not
    /// normalized; use for ranking only.
    pub fn transpose(&self) -> TranslationTable {
        let mut out: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (f, row) in &self.probs {
            for (e, &p) in row {
                out.entry(e.clone()).or_default().insert(f.clone(), p);
            }
        }
        TranslationTable { probs: out }
    }

    /// Largest |1 - sum(row)| over all rows; 0.0 for an empty table.
    pub fn max_row_normalization_error(&self) -> f64 {
        self.probs
            .values()
            .map(|r| (1.0 - r.values().sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }
}

/// Which alignment prior the model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Ibm1,
    Diagonal,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Ibm1 => "ibm1",
            ModelKind::Diagonal => "diagonal",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ibm1" => Ok(ModelKind::Ibm1),
            "diagonal" => Ok(ModelKind::Diagonal),
            other => Err(Error::InvalidArgument(format!(
                "unknown model kind {other:?} (expected 'ibm1' or 'diagonal')"
            ))),
        }
    }
}

/// How inference treats tokens absent from the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnseenPolicy {
    /// Substitute [`UNSEEN_FLOOR`] for any absent table entry.
    #[default]
    Floor,
    /// Error on tokens outside the model's vocabulary. Pairs of seen tokens
    /// that simply never co-occurred keep probability 0.
    Error,
}

/// A trained translation table plus the alignment-prior parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentModel {
    pub ttable: TranslationTable,
    pub kind: ModelKind,
    /// Diagonal-prior sharpness lambda. Unused by ibm1 but kept for file
    /// round-trips.
    pub tension: f64,
    /// Probability mass of the null alignment, in [0, 1).
    pub null_prob: f64,
    pub iterations_run: u32,
}

/// One alignment link per target position; `None` is the null alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceAlignment {
    pub links: Vec<(usize, Option<usize>)>,
}

impl SentenceAlignment {
    /// Pharaoh-style text: space-separated `i-j` with i the target index and
    /// j the source index, both 0-based; null links are omitted.
    pub fn to_pharaoh(&self) -> String {
        let mut out = String::new();
        for (i, j) in &self.links {
            if let Some(j) = j {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&format!("{i}-{j}"));
            }
        }
        out
    }
}

/// EM training configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Number of EM iterations, >= 1.
    pub iterations: u32,
    pub model: ModelKind,
    /// Null-alignment mass p0 in [0, 1).
    pub null_prob: f64,
    /// Initial diagonal tension lambda, > 0.
    pub tension_init: f64,
    /// Update lambda by one gradient-ascent step per iteration (diagonal
    /// model only).
    pub learn_tension: bool,
    /// Step size of the lambda update.
    pub tension_step: f64,
    /// Add-alpha smoothing on expected counts, >= 0. Applied over each source
    /// token's observed co-occurrence support.
    pub smoothing_alpha: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 5,
            model: ModelKind::Diagonal,
            null_prob: 0.08,
            tension_init: 4.0,
            learn_tension: true,
            tension_step: 0.1,
            smoothing_alpha: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidArgument("iterations must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.null_prob) {
            return Err(Error::InvalidArgument(
                "null_prob must be in [0, 1)".into(),
            ));
        }
        if !(self.tension_init > 0.0) {
            return Err(Error::InvalidArgument("tension_init must be > 0".into()));
        }
        if !(self.tension_step > 0.0) {
            return Err(Error::InvalidArgument("tension_step must be > 0".into()));
        }
        if !(self.smoothing_alpha >= 0.0) {
            return Err(Error::InvalidArgument(
                "smoothing_alpha must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Diagonal feature h(i,j,m,n) = -|i/m - j/n| with 1-based positions.
#[inline]
fn diag_h(i: usize, j: usize, m: usize, n: usize) -> f64 {
    -((i as f64 / m as f64) - (j as f64 / n as f64)).abs()
}

/// One source token's row over its co-occurrence support. Target ids are
/// sorted so slots are found by binary search.
#[derive(Debug, Clone)]
struct Row {
    tgts: Vec<u32>,
    probs: Vec<f64>,
}

impl Row {
    fn slot(&self, e: u32) -> usize {
        self.tgts.binary_search(&e).expect("target in support")
    }
}

/// Interned corpus plus table state shared by training and inference passes.
struct Engine {
    kind: ModelKind,
    null_prob: f64,
    tension: f64,
    rows: Vec<Row>,
    null_row: Option<Row>,
    pairs: Vec<(Vec<u32>, Vec<u32>)>,
    src_toks: Vec<String>,
    tgt_toks: Vec<String>,
}

/// Posterior emissions of one chunk of pairs, in deterministic order.
/// Row u32::MAX addresses the null row.
struct ChunkOut {
    updates: Vec<(u32, u32, f64)>,
    ll: f64,
    grad: f64,
}

struct EStep {
    counts: Vec<Vec<f64>>,
    null_counts: Vec<f64>,
    log_likelihood: f64,
    tension_gradient: f64,
}

/// Interns both sides of the corpus. Pairs with an empty side carry no
/// alignment information and are dropped here.
fn intern_corpus(
    corpus: &ParallelCorpus,
) -> (Vec<(Vec<u32>, Vec<u32>)>, Vec<String>, Vec<String>) {
    let mut src_ids: HashMap<String, u32> = HashMap::new();
    let mut tgt_ids: HashMap<String, u32> = HashMap::new();
    let mut src_toks = Vec::new();
    let mut tgt_toks = Vec::new();
    let mut pairs = Vec::with_capacity(corpus.pairs.len());
    for (src, tgt) in &corpus.pairs {
        if src.is_empty() || tgt.is_empty() {
            continue;
        }
        let fs = src
            .tokens
            .iter()
            .map(|t| {
                *src_ids.entry(t.clone()).or_insert_with(|| {
                    src_toks.push(t.clone());
                    (src_toks.len() - 1) as u32
                })
            })
            .collect();
        let es = tgt
            .tokens
            .iter()
            .map(|t| {
                *tgt_ids.entry(t.clone()).or_insert_with(|| {
                    tgt_toks.push(t.clone());
                    (tgt_toks.len() - 1) as u32
                })
            })
            .collect();
        pairs.push((fs, es));
    }
    (pairs, src_toks, tgt_toks)
}

/// Co-occurrence support per source id, plus the null row's support (every
/// target type) when requested.
fn build_support(
    pairs: &[(Vec<u32>, Vec<u32>)],
    n_src: usize,
    n_tgt: usize,
    with_null: bool,
) -> (Vec<Vec<u32>>, Option<Vec<u32>>) {
    let mut support: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n_src];
    for (fs, es) in pairs {
        for &f in fs {
            let set = &mut support[f as usize];
            for &e in es {
                set.insert(e);
            }
        }
    }
    let rows = support
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    let null = with_null.then(|| (0..n_tgt as u32).collect());
    (rows, null)
}

impl Engine {
    /// Fresh engine with t uniform over each source token's support.
    fn for_training(corpus: &ParallelCorpus, cfg: &TrainConfig) -> Result<Engine> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let (pairs, src_toks, tgt_toks) = intern_corpus(corpus);
        if pairs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let (supports, null_support) =
            build_support(&pairs, src_toks.len(), tgt_toks.len(), cfg.null_prob > 0.0);
        let rows = supports
            .into_iter()
            .map(|tgts| {
                let p = 1.0 / tgts.len() as f64;
                let probs = vec![p; tgts.len()];
                Row { tgts, probs }
            })
            .collect();
        let null_row = null_support.map(|tgts| {
            let p = 1.0 / tgts.len() as f64;
            let probs = vec![p; tgts.len()];
            Row { tgts, probs }
        });
        Ok(Engine {
            kind: cfg.model,
            null_prob: cfg.null_prob,
            tension: cfg.tension_init,
            rows,
            null_row,
            pairs,
            src_toks,
            tgt_toks,
        })
    }

    /// Engine whose rows are filled from an existing model, with absent
    /// entries resolved per `unseen`.
    fn from_model(
        model: &AlignmentModel,
        corpus: &ParallelCorpus,
        unseen: UnseenPolicy,
    ) -> Result<Engine> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let (pairs, src_toks, tgt_toks) = intern_corpus(corpus);
        if pairs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let model_tgt_vocab: HashSet<&str> = model
            .ttable
            .probs
            .values()
            .flat_map(|r| r.keys().map(String::as_str))
            .collect();
        let lookup = |row: Option<&BTreeMap<String, f64>>, tgt: &str| -> Result<f64> {
            match row.and_then(|r| r.get(tgt)) {
                Some(&p) => Ok(p),
                None => match unseen {
                    UnseenPolicy::Floor => Ok(UNSEEN_FLOOR),
                    UnseenPolicy::Error => {
                        if model_tgt_vocab.contains(tgt) {
                            Ok(0.0)
                        } else {
                            Err(Error::UnseenToken(tgt.to_string()))
                        }
                    }
                },
            }
        };
        let (supports, null_support) =
            build_support(&pairs, src_toks.len(), tgt_toks.len(), model.null_prob > 0.0);
        let mut rows = Vec::with_capacity(supports.len());
        for (f, tgts) in supports.into_iter().enumerate() {
            let tok = &src_toks[f];
            let row = model.ttable.row(tok);
            if row.is_none() && unseen == UnseenPolicy::Error {
                return Err(Error::UnseenToken(tok.clone()));
            }
            let probs = tgts
                .iter()
                .map(|&e| lookup(row, &tgt_toks[e as usize]))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(Row { tgts, probs });
        }
        let null_row = match null_support {
            Some(tgts) => {
                // An absent null row is not an unseen token: the model just
                // assigns it no mass.
                let row = model.ttable.row(NULL_TOKEN);
                let probs = tgts
                    .iter()
                    .map(|&e| match row.and_then(|r| r.get(&tgt_toks[e as usize])) {
                        Some(&p) => p,
                        None => match unseen {
                            UnseenPolicy::Floor => UNSEEN_FLOOR,
                            UnseenPolicy::Error => 0.0,
                        },
                    })
                    .collect();
                Some(Row { tgts, probs })
            }
            None => None,
        };
        Ok(Engine {
            kind: model.kind,
            null_prob: model.null_prob,
            tension: model.tension,
            rows,
            null_row,
            pairs,
            src_toks,
            tgt_toks,
        })
    }

    /// Posterior mass, log-likelihood and tension gradient of one chunk.
    fn chunk(&self, pairs: &[(Vec<u32>, Vec<u32>)]) -> ChunkOut {
        let want_grad = self.kind == ModelKind::Diagonal;
        let mut updates = Vec::new();
        let mut ll = 0.0;
        let mut grad = 0.0;
        let mut scores: Vec<f64> = Vec::new();
        let mut hs: Vec<f64> = Vec::new();
        let mut exps: Vec<f64> = Vec::new();
        for (fs, es) in pairs {
            let n = fs.len();
            let m = es.len();
            scores.resize(n, 0.0);
            hs.resize(n, 0.0);
            exps.resize(n, 0.0);
            for i in 1..=m {
                let e = es[i - 1];
                let (z, hz) = match self.kind {
                    ModelKind::Ibm1 => (0.0, 0.0),
                    ModelKind::Diagonal => {
                        let mut z = 0.0;
                        let mut hz = 0.0;
                        for j in 1..=n {
                            let h = diag_h(i, j, m, n);
                            let w = (self.tension * h).exp();
                            hs[j - 1] = h;
                            exps[j - 1] = w;
                            z += w;
                            hz += h * w;
                        }
                        (z, hz)
                    }
                };
                let null_score = match &self.null_row {
                    Some(row) => self.null_prob * row.probs[row.slot(e)],
                    None => 0.0,
                };
                let mut total = null_score;
                for j in 1..=n {
                    let f = fs[j - 1];
                    let row = &self.rows[f as usize];
                    let t = row.probs[row.slot(e)];
                    let delta = match self.kind {
                        ModelKind::Ibm1 => (1.0 - self.null_prob) / n as f64,
                        ModelKind::Diagonal => (1.0 - self.null_prob) * exps[j - 1] / z,
                    };
                    scores[j - 1] = delta * t;
                    total += scores[j - 1];
                }
                ll += total.ln();
                if total <= 0.0 {
                    // Zero-probability position: the -inf above already
                    // poisons the likelihood; no posterior mass to assign.
                    continue;
                }
                if let Some(row) = &self.null_row {
                    if null_score > 0.0 {
                        updates.push((u32::MAX, row.slot(e) as u32, null_score / total));
                    }
                }
                let mut qsum = 0.0;
                let mut qh = 0.0;
                for j in 1..=n {
                    let f = fs[j - 1];
                    let row = &self.rows[f as usize];
                    let q = scores[j - 1] / total;
                    updates.push((f, row.slot(e) as u32, q));
                    if want_grad {
                        qsum += q;
                        qh += q * hs[j - 1];
                    }
                }
                if want_grad {
                    grad += qh - qsum * (hz / z);
                }
            }
        }
        ChunkOut { updates, ll, grad }
    }

    /// Full expected-count pass. Chunks are computed in parallel and merged
    /// in chunk order, so the result is independent of thread count.
    fn e_step(&self) -> EStep {
        let mut counts: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![0.0; r.tgts.len()])
            .collect();
        let mut null_counts = match &self.null_row {
            Some(r) => vec![0.0; r.tgts.len()],
            None => Vec::new(),
        };
        let mut ll = 0.0;
        let mut grad = 0.0;
        for wave in self.pairs.chunks(CHUNK_PAIRS * CHUNKS_PER_WAVE) {
            let outs: Vec<ChunkOut> = wave
                .par_chunks(CHUNK_PAIRS)
                .map(|c| self.chunk(c))
                .collect();
            for out in outs {
                for (row, slot, q) in out.updates {
                    if row == u32::MAX {
                        null_counts[slot as usize] += q;
                    } else {
                        counts[row as usize][slot as usize] += q;
                    }
                }
                ll += out.ll;
                grad += out.grad;
            }
        }
        EStep {
            counts,
            null_counts,
            log_likelihood: ll,
            tension_gradient: grad,
        }
    }

    /// Renormalizes every row from expected counts with add-alpha smoothing
    /// over the row's support.
    fn m_step(&mut self, step: &EStep, alpha: f64) {
        for (row, counts) in self.rows.iter_mut().zip(&step.counts) {
            renormalize(row, counts, alpha);
        }
        if let Some(row) = &mut self.null_row {
            renormalize(row, &step.null_counts, alpha);
        }
    }

    fn into_model(self, iterations_run: u32) -> AlignmentModel {
        let mut probs = BTreeMap::new();
        for (f, row) in self.rows.iter().enumerate() {
            let entries = row
                .tgts
                .iter()
                .zip(&row.probs)
                .map(|(&e, &p)| (self.tgt_toks[e as usize].clone(), p))
                .collect();
            probs.insert(self.src_toks[f].clone(), entries);
        }
        if let Some(row) = &self.null_row {
            let entries = row
                .tgts
                .iter()
                .zip(&row.probs)
                .map(|(&e, &p)| (self.tgt_toks[e as usize].clone(), p))
                .collect();
            probs.insert(NULL_TOKEN.to_string(), entries);
        }
        AlignmentModel {
            ttable: TranslationTable::new(probs),
            kind: self.kind,
            tension: self.tension,
            null_prob: self.null_prob,
            iterations_run,
        }
    }
}

fn renormalize(row: &mut Row, counts: &[f64], alpha: f64) {
    let total: f64 = counts.iter().sum();
    let denom = total + alpha * row.probs.len() as f64;
    if denom > 0.0 {
        for (p, &c) in row.probs.iter_mut().zip(counts) {
            *p = (c + alpha) / denom;
        }
    }
}

/// Runs EM for `cfg.iterations` iterations and returns the trained model.
/// Pairs with an empty side are skipped; a corpus with no usable pairs is an
/// error, as is a likelihood that underflows to a non-finite value.
pub fn train(corpus: &ParallelCorpus, cfg: &TrainConfig) -> Result<AlignmentModel> {
    cfg.validate()?;
    let mut engine = Engine::for_training(corpus, cfg)?;
    for _ in 0..cfg.iterations {
        let step = engine.e_step();
        if !step.log_likelihood.is_finite() {
            return Err(Error::NonFiniteLikelihood);
        }
        engine.m_step(&step, cfg.smoothing_alpha);
        if cfg.learn_tension && cfg.model == ModelKind::Diagonal {
            engine.tension = (engine.tension + cfg.tension_step * step.tension_gradient)
                .clamp(TENSION_MIN, TENSION_MAX);
        }
    }
    Ok(engine.into_model(cfg.iterations))
}

/// Corpus log-likelihood under the model: sum over pairs and target positions
/// of log sum_j delta(j) * t(e_i|f_j). Pairs with an empty side contribute
/// nothing. Returns -inf when some position has zero probability under the
/// model; callers that need a hard failure should check finiteness.
pub fn log_likelihood(
    model: &AlignmentModel,
    corpus: &ParallelCorpus,
    unseen: UnseenPolicy,
) -> Result<f64> {
    let engine = Engine::from_model(model, corpus, unseen)?;
    Ok(engine.e_step().log_likelihood)
}

/// Expected alignment counts of one E-step at the model's current parameters,
/// keyed by (source token, target token) with [`NULL_TOKEN`] for null links.
/// Absent table entries take the floor probability.
pub fn expected_counts(
    model: &AlignmentModel,
    corpus: &ParallelCorpus,
) -> Result<BTreeMap<(String, String), f64>> {
    let engine = Engine::from_model(model, corpus, UnseenPolicy::Floor)?;
    let step = engine.e_step();
    let mut out = BTreeMap::new();
    for (f, counts) in step.counts.iter().enumerate() {
        let row = &engine.rows[f];
        for (slot, &c) in counts.iter().enumerate() {
            if c != 0.0 {
                out.insert(
                    (
                        engine.src_toks[f].clone(),
                        engine.tgt_toks[row.tgts[slot] as usize].clone(),
                    ),
                    c,
                );
            }
        }
    }
    if let Some(row) = &engine.null_row {
        for (slot, &c) in step.null_counts.iter().enumerate() {
            if c != 0.0 {
                out.insert(
                    (
                        NULL_TOKEN.to_string(),
                        engine.tgt_toks[row.tgts[slot] as usize].clone(),
                    ),
                    c,
                );
            }
        }
    }
    Ok(out)
}

/// d/d(lambda) of the expected complete-data log-likelihood at the model's
/// current posteriors. Errors on an ibm1 model, whose prior has no tension.
pub fn tension_gradient(model: &AlignmentModel, corpus: &ParallelCorpus) -> Result<f64> {
    if model.kind != ModelKind::Diagonal {
        return Err(Error::InvalidArgument(
            "tension gradient requires a diagonal model".into(),
        ));
    }
    let engine = Engine::from_model(model, corpus, UnseenPolicy::Floor)?;
    Ok(engine.e_step().tension_gradient)
}

/// Most probable source position (or null) per target position:
/// argmax_j delta(j) * t(e_i|f_j). Ties break toward the smaller source
/// index, with null losing ties.
pub fn viterbi_align(
    model: &AlignmentModel,
    source: &Sentence,
    target: &Sentence,
    unseen: UnseenPolicy,
) -> Result<SentenceAlignment> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::InvalidArgument(
            "viterbi alignment requires non-empty sentences".into(),
        ));
    }
    let model_tgt_vocab: Option<HashSet<&str>> = match unseen {
        UnseenPolicy::Error => Some(
            model
                .ttable
                .probs
                .values()
                .flat_map(|r| r.keys().map(String::as_str))
                .collect(),
        ),
        UnseenPolicy::Floor => None,
    };
    let lookup = |src_tok: &str, tgt_tok: &str| -> Result<f64> {
        let row = model.ttable.row(src_tok);
        if row.is_none() && unseen == UnseenPolicy::Error && src_tok != NULL_TOKEN {
            return Err(Error::UnseenToken(src_tok.to_string()));
        }
        match row.and_then(|r| r.get(tgt_tok)) {
            Some(&p) => Ok(p),
            None => match unseen {
                UnseenPolicy::Floor => Ok(UNSEEN_FLOOR),
                UnseenPolicy::Error => {
                    if model_tgt_vocab.as_ref().is_some_and(|v| v.contains(tgt_tok)) {
                        Ok(0.0)
                    } else {
                        Err(Error::UnseenToken(tgt_tok.to_string()))
                    }
                }
            },
        }
    };
    let n = source.len();
    let m = target.len();
    let p0 = model.null_prob;
    let mut links = Vec::with_capacity(m);
    for i in 1..=m {
        let e = &target.tokens[i - 1];
        let z = match model.kind {
            ModelKind::Ibm1 => 0.0,
            ModelKind::Diagonal => (1..=n)
                .map(|j| (model.tension * diag_h(i, j, m, n)).exp())
                .sum(),
        };
        let mut best_j: Option<usize> = None;
        let mut best_score = if p0 > 0.0 {
            p0 * lookup(NULL_TOKEN, e)?
        } else {
            0.0
        };
        for j in 1..=n {
            let delta = match model.kind {
                ModelKind::Ibm1 => (1.0 - p0) / n as f64,
                ModelKind::Diagonal => (1.0 - p0) * (model.tension * diag_h(i, j, m, n)).exp() / z,
            };
            let score = delta * lookup(&source.tokens[j - 1], e)?;
            if score > best_score || (score == best_score && best_j.is_none()) {
                best_score = score;
                best_j = Some(j);
            }
        }
        links.push((i - 1, best_j.map(|j| j - 1)));
    }
    Ok(SentenceAlignment { links })
}
