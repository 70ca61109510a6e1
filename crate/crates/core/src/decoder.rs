//! Second-order Viterbi search over structural tags.

use crate::error::DecodeError;
use crate::inventory::TagInventory;
use crate::source::{History, ProbSource};
use crate::treebank::{decode_with_words, ChunkTree, PosTag, Repair, StructuralTag, TagSequence};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ViterbiOptions {
    /// Keep only this many states per position.
    pub beam: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scored {
    pub tags: TagSequence,
    /// Sum of log-probabilities along the path.
    pub score: f64,
}

/// One candidate state: its inventory index (`None` for the fallback) and
/// the tag itself.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub index: Option<usize>,
    pub tag: StructuralTag,
}

impl Candidate {
    fn history(&self) -> History<'_> {
        match self.index {
            Some(i) => History::Known(i),
            None => History::Other(&self.tag),
        }
    }
}

/// All inventory states emitting `pos` in tie-break order, or the single
/// fallback `pos/1/NONE`.
pub fn candidates(inventory: &TagInventory, pos: &PosTag) -> Vec<Candidate> {
    let ix = inventory.with_pos(pos);
    if ix.is_empty() {
        return inventory
            .candidates(pos)
            .into_iter()
            .map(|tag| Candidate { index: None, tag })
            .collect();
    }
    ix.iter()
        .map(|&i| Candidate {
            index: Some(i),
            tag: inventory.get(i).clone(),
        })
        .collect()
}

fn log_prob(row: &[f64], c: &Candidate) -> f64 {
    c.index.map_or(0.0, |i| row[i])
}

/// Score of a fixed tag sequence, summed left to right. Tags outside the
/// inventory contribute 0.
pub fn sequence_score(source: &dyn ProbSource, tags: &[StructuralTag]) -> f64 {
    let inv = source.futures();
    let mut score = 0.0;
    for i in 0..tags.len() {
        let h2 = History::of(inv, i.checked_sub(2).map(|k| &tags[k]));
        let h1 = History::of(inv, i.checked_sub(1).map(|k| &tags[k]));
        let row = source.log_probs(h2, h1);
        score += inv.index_of(&tags[i]).map_or(0.0, |y| row[y]);
    }
    score
}

pub fn viterbi(source: &dyn ProbSource, pos: &[PosTag], opts: ViterbiOptions) -> Result<Scored, DecodeError> {
    if pos.is_empty() {
        return Err(DecodeError::EmptyInput);
    }
    let cands: Vec<Vec<Candidate>> = pos.iter().map(|t| candidates(source.futures(), t)).collect();
    let n = pos.len();

    // delta[i][b * |C_i| + c]: best score of a path ending in (b, c) at i,
    // where b indexes C_{i-1} (always 0 at i = 0).
    let mut delta: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut back: Vec<Vec<u32>> = Vec::with_capacity(n);

    let row = source.log_probs(History::Boundary, History::Boundary);
    delta.push(cands[0].iter().map(|c| log_prob(&row, c)).collect());
    back.push(vec![0; cands[0].len()]);
    prune(&mut delta[0], opts.beam);

    if n > 1 {
        let (c0, c1) = (&cands[0], &cands[1]);
        let mut d = vec![f64::NEG_INFINITY; c0.len() * c1.len()];
        for (b, prev) in c0.iter().enumerate() {
            let base = delta[0][b];
            if base == f64::NEG_INFINITY {
                continue;
            }
            let row = source.log_probs(History::Boundary, prev.history());
            for (c, cur) in c1.iter().enumerate() {
                d[b * c1.len() + c] = base + log_prob(&row, cur);
            }
        }
        prune(&mut d, opts.beam);
        delta.push(d);
        back.push(vec![0; c0.len() * c1.len()]);
    }

    for i in 2..n {
        let (ca, cb, cc) = (&cands[i - 2], &cands[i - 1], &cands[i]);
        let mut d = vec![f64::NEG_INFINITY; cb.len() * cc.len()];
        let mut bp = vec![0u32; cb.len() * cc.len()];
        let prev = &delta[i - 1];
        for (a, ta) in ca.iter().enumerate() {
            for (b, tb) in cb.iter().enumerate() {
                let base = prev[a * cb.len() + b];
                if base == f64::NEG_INFINITY {
                    continue;
                }
                let row = source.log_probs(ta.history(), tb.history());
                for (c, tc) in cc.iter().enumerate() {
                    let v = base + log_prob(&row, tc);
                    let k = b * cc.len() + c;
                    if v > d[k] {
                        d[k] = v;
                        bp[k] = a as u32;
                    }
                }
            }
        }
        prune(&mut d, opts.beam);
        delta.push(d);
        back.push(bp);
    }

    // best final state; the first one wins ties
    let last = &delta[n - 1];
    let mut best = 0;
    for (k, &v) in last.iter().enumerate() {
        if v > last[best] {
            best = k;
        }
    }
    let score = last[best];
    let mut path = vec![0usize; n];
    let width = cands[n - 1].len();
    path[n - 1] = best % width;
    if n > 1 {
        path[n - 2] = best / width;
    }
    for i in (2..n).rev() {
        let k = path[i - 1] * cands[i].len() + path[i];
        path[i - 2] = back[i][k] as usize;
    }
    let tags = path.iter().enumerate().map(|(i, &c)| cands[i][c].tag.clone()).collect();
    Ok(Scored { tags, score })
}

fn prune(scores: &mut [f64], beam: Option<usize>) {
    let Some(k) = beam else { return };
    if k == 0 || scores.len() <= k {
        return;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    for &i in &order[k..] {
        scores[i] = f64::NEG_INFINITY;
    }
}

/// A decoded span or sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct Parse {
    pub tags: TagSequence,
    pub tree: ChunkTree,
    pub repairs: Vec<Repair>,
    /// Number of candidate states at each position.
    pub candidates: Vec<usize>,
    pub score: f64,
}

/// Best tag sequence for `pos`, decoded into a tree. `words` may be empty.
pub fn parse_span(
    source: &dyn ProbSource,
    pos: &[PosTag],
    words: &[Option<String>],
    opts: ViterbiOptions,
) -> Result<Parse, DecodeError> {
    let best = viterbi(source, pos, opts)?;
    let decoded = decode_with_words(&best.tags, words);
    Ok(Parse {
        candidates: pos.iter().map(|t| candidates(source.futures(), t).len()).collect(),
        tags: best.tags,
        tree: decoded.tree,
        repairs: decoded.repairs,
        score: best.score,
    })
}
