use std::thread;

use super::{EvalReport, Measure, Mode};
use crate::corpus::FoldPlan;
use crate::decoder::{parse_span, ViterbiOptions};
use crate::error::EvalError;
use crate::source::{ProbSource, Registry, TrainConfig};
use crate::treebank::{encode_tree, ChunkTree, TagSequence};

#[derive(Clone, Debug)]
pub struct CrossValConfig {
    /// Registry name of the probability source.
    pub source: String,
    pub train: TrainConfig,
    pub mode: Mode,
    pub viterbi: ViterbiOptions,
    /// Training sizes for a learning curve; empty for none.
    pub curve: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CurvePoint {
    /// Requested number of training trees, capped per fold at what is there.
    pub size: usize,
    pub report: EvalReport,
}

#[derive(Clone, Debug)]
pub struct CrossValResult {
    pub seed: u64,
    pub folds: Vec<EvalReport>,
    pub mean: EvalReport,
    pub curve: Vec<CurvePoint>,
}

impl CrossValResult {
    /// `size<TAB>recall` lines for one measure.
    pub fn curve_data(&self, measure: Measure) -> String {
        let mut s = String::new();
        for p in &self.curve {
            if let Some(r) = p.report.row(measure) {
                s += &format!("{}\t{}\n", p.size, r.recall);
            }
        }
        s
    }
}

/// Decodes every tree of `test` with `source` and scores the result.
pub fn evaluate(
    source: &dyn ProbSource,
    test: &[&ChunkTree],
    mode: Mode,
    viterbi: ViterbiOptions,
) -> Result<EvalReport, EvalError> {
    let mut gold = Vec::with_capacity(test.len());
    let mut pred = Vec::with_capacity(test.len());
    for (index, t) in test.iter().enumerate() {
        let words: Vec<Option<String>> = t.leaves.iter().map(|l| l.word.clone()).collect();
        let out = parse_span(source, &t.pos_tags(), &words, viterbi).map_err(|source| EvalError::Decode { index, source })?;
        gold.push((*t).clone());
        pred.push(out.tree);
    }
    Ok(EvalReport::compute(&gold, &pred, mode))
}

struct FoldOutcome {
    full: EvalReport,
    curve: Vec<EvalReport>,
}

fn run_fold(
    registry: &Registry,
    encoded: &[TagSequence],
    trees: &[ChunkTree],
    plan: &FoldPlan,
    fold: usize,
    cfg: &CrossValConfig,
) -> Result<FoldOutcome, EvalError> {
    let test: Vec<&ChunkTree> = plan.test_indices(fold).into_iter().map(|i| &trees[i]).collect();
    let train_ix = plan.train_indices(fold);
    let run = |n: usize| -> Result<EvalReport, EvalError> {
        let data: Vec<TagSequence> = train_ix[..n].iter().map(|&i| encoded[i].clone()).collect();
        let src = registry.train(&cfg.source, &data, &cfg.train)?;
        evaluate(&*src, &test, cfg.mode, cfg.viterbi)
    };
    let full = run(train_ix.len())?;
    let curve = cfg
        .curve
        .iter()
        .map(|&s| run(s.min(train_ix.len())))
        .collect::<Result<_, _>>()?;
    Ok(FoldOutcome { full, curve })
}

/// Trains and tests once per fold, folds in parallel. Reports come back in
/// fold order whatever the scheduling.
pub fn cross_validate(
    trees: &[ChunkTree],
    plan: &FoldPlan,
    registry: &Registry,
    cfg: &CrossValConfig,
) -> Result<CrossValResult, EvalError> {
    registry.get(&cfg.source)?;
    let encoded: Vec<TagSequence> = trees
        .iter()
        .enumerate()
        .map(|(index, t)| encode_tree(t).map_err(|source| EvalError::Tree { index, source }))
        .collect::<Result<_, _>>()?;

    let outcomes: Vec<Result<FoldOutcome, EvalError>> = thread::scope(|s| {
        let handles: Vec<_> = (0..plan.folds)
            .map(|f| {
                let encoded = &encoded;
                s.spawn(move || run_fold(registry, encoded, trees, plan, f, cfg))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fold worker panicked")).collect()
    });
    let outcomes: Vec<FoldOutcome> = outcomes.into_iter().collect::<Result<_, _>>()?;

    let folds: Vec<EvalReport> = outcomes.iter().map(|o| o.full.clone()).collect();
    let mean = EvalReport::average(&folds).expect("at least two folds");
    let curve = cfg
        .curve
        .iter()
        .enumerate()
        .map(|(k, &size)| {
            let reps: Vec<EvalReport> = outcomes.iter().map(|o| o.curve[k].clone()).collect();
            CurvePoint {
                size,
                report: EvalReport::average(&reps).expect("at least two folds"),
            }
        })
        .collect();
    Ok(CrossValResult {
        seed: plan.seed,
        folds,
        mean,
        curve,
    })
}
