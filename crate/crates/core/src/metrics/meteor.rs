//! Exact-match METEOR with the fragmentation penalty.

use std::collections::HashMap;

/// State of the branch-and-bound search over unigram matchings.
struct Search<'a> {
    hyp: &'a [String],
    /// Reference positions per token type.
    ref_pos: HashMap<&'a str, Vec<usize>>,
    /// Matches still owed per token type: min(hyp count, ref count) minus
    /// matches already placed.
    quota: HashMap<&'a str, usize>,
    /// Occurrences per type in the unprocessed hypothesis suffix.
    remaining: HashMap<&'a str, usize>,
    used: Vec<bool>,
    best: usize,
}

impl<'a> Search<'a> {
    /// Explores hypothesis position i. `prev_j` is the reference position
    /// matched at i-1, if any; a pair (i, prev_j + 1) extends that chunk.
    fn run(&mut self, i: usize, chunks: usize, prev_j: Option<usize>) {
        if chunks >= self.best {
            return;
        }
        if i == self.hyp.len() {
            // Quota bookkeeping guarantees completed branches are maximum
            // matchings.
            self.best = chunks;
            return;
        }
        let tok = self.hyp[i].as_str();
        *self.remaining.get_mut(tok).unwrap() -= 1;
        let owed = self.quota.get(tok).copied().unwrap_or(0);
        if owed > 0 {
            // Continuation candidate first so the greedy diagonal is found
            // early and bounds the rest of the search.
            let cont = prev_j.map(|p| p + 1);
            if let Some(c) = cont {
                let valid = c < self.used.len()
                    && !self.used[c]
                    && self.ref_pos[tok].binary_search(&c).is_ok();
                if valid {
                    self.place(i, c, chunks);
                }
            }
            for idx in 0..self.ref_pos[tok].len() {
                let j = self.ref_pos[tok][idx];
                if Some(j) != cont && !self.used[j] {
                    self.place(i, j, chunks + 1);
                }
            }
        }
        // Skipping is allowed only when later occurrences can still fill the
        // quota, so no maximum matching is lost.
        if self.remaining[tok] >= owed {
            self.run(i + 1, chunks, None);
        }
        *self.remaining.get_mut(tok).unwrap() += 1;
    }

    fn place(&mut self, i: usize, j: usize, chunks_after: usize) {
        let tok = self.hyp[i].as_str();
        self.used[j] = true;
        *self.quota.get_mut(tok).unwrap() -= 1;
        self.run(i + 1, chunks_after, Some(j));
        *self.quota.get_mut(tok).unwrap() += 1;
        self.used[j] = false;
    }
}

/// Number of exact unigram matches, and the minimum chunk count over all
/// maximum matchings. A chunk is a maximal run of pairs contiguous on both
/// sides. Returns (0, 0) when the sides share no tokens.
pub(crate) fn matches_and_chunks(hyp: &[String], reference: &[String]) -> (usize, usize) {
    let mut hyp_counts: HashMap<&str, usize> = HashMap::new();
    for t in hyp {
        *hyp_counts.entry(t).or_insert(0) += 1;
    }
    let mut ref_pos: HashMap<&str, Vec<usize>> = HashMap::new();
    for (j, t) in reference.iter().enumerate() {
        ref_pos.entry(t).or_default().push(j);
    }
    let mut quota: HashMap<&str, usize> = HashMap::new();
    let mut matches = 0;
    for (&t, &hc) in &hyp_counts {
        let m = hc.min(ref_pos.get(t).map_or(0, Vec::len));
        if m > 0 {
            quota.insert(t, m);
            matches += m;
        }
    }
    if matches == 0 {
        return (0, 0);
    }
    let mut search = Search {
        hyp,
        ref_pos,
        quota,
        remaining: hyp_counts,
        used: vec![false; reference.len()],
        best: matches + 1,
    };
    search.run(0, 0, None);
    (matches, search.best)
}

/// METEOR restricted to exact surface matches. P = matches/|hyp|,
/// R = matches/|ref|, F = P*R / (alpha*P + (1-alpha)*R); the fragmentation
/// penalty is gamma * (chunks/matches)^beta and the score F * (1 - penalty).
/// Zero when the sides share no tokens.
pub fn meteor_lite(hyp: &[String], reference: &[String], alpha: f64, gamma: f64, beta: f64) -> f64 {
    if hyp.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let (matches, chunks) = matches_and_chunks(hyp, reference);
    if matches == 0 {
        return 0.0;
    }
    let p = matches as f64 / hyp.len() as f64;
    let r = matches as f64 / reference.len() as f64;
    let f = p * r / (alpha * p + (1.0 - alpha) * r);
    let penalty = gamma * (chunks as f64 / matches as f64).powf(beta);
    f * (1.0 - penalty)
}
