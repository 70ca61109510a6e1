//! Accuracy measures over tag sequences and trees, and cross-validation.

mod crossval;

pub use crossval::{cross_validate, evaluate, CrossValConfig, CrossValResult, CurvePoint};

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::treebank::{Child, ChunkTree, StructuralTag};

/// Gold, predicted and matching item counts of one measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub gold: u64,
    pub predicted: u64,
    pub correct: u64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

impl Counts {
    pub fn new(gold: u64, predicted: u64, correct: u64) -> Self {
        Counts {
            gold,
            predicted,
            correct,
        }
    }

    /// correct / gold; 1 when there is nothing to find.
    pub fn recall(&self) -> f64 {
        ratio(self.correct, self.gold)
    }

    /// correct / predicted; 1 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        ratio(self.correct, self.predicted)
    }

    pub fn add(&mut self, other: Counts) {
        self.gold += other.gold;
        self.predicted += other.predicted;
        self.correct += other.correct;
    }
}

/// A ratio as a percentage with one decimal, e.g. `95.1`.
pub fn percent(r: f64) -> String {
    format!("{:.1}", 100.0 * r)
}

/// Matches on the REL field of aligned tags.
pub fn tags_accuracy(gold: &[Vec<StructuralTag>], pred: &[Vec<StructuralTag>]) -> Counts {
    assert_eq!(gold.len(), pred.len(), "unaligned sequence lists");
    let mut c = Counts::default();
    for (g, p) in gold.iter().zip(pred) {
        assert_eq!(g.len(), p.len(), "unaligned sequences");
        let n = g.len() as u64;
        let ok = g.iter().zip(p).filter(|(a, b)| a.rel == b.rel).count() as u64;
        c.add(Counts::new(n, n, ok));
    }
    c
}

/// Multiset overlap: every gold item is credited at most once.
fn multiset_match<K: Hash + Eq>(gold: impl IntoIterator<Item = K>, pred: impl IntoIterator<Item = K>) -> Counts {
    let mut pool: HashMap<K, u64> = HashMap::new();
    let mut c = Counts::default();
    for k in gold {
        *pool.entry(k).or_default() += 1;
        c.gold += 1;
    }
    for k in pred {
        c.predicted += 1;
        if let Some(n) = pool.get_mut(&k).filter(|n| **n > 0) {
            *n -= 1;
            c.correct += 1;
        }
    }
    c
}

fn over_pairs(gold: &[ChunkTree], pred: &[ChunkTree], f: impl Fn(&ChunkTree, &ChunkTree) -> Counts) -> Counts {
    assert_eq!(gold.len(), pred.len(), "unaligned tree lists");
    let mut c = Counts::default();
    for (g, p) in gold.iter().zip(pred) {
        c.add(f(g, p));
    }
    c
}

/// Node spans, with labels if `labelled`.
pub fn bracketing(gold: &[ChunkTree], pred: &[ChunkTree], labelled: bool) -> Counts {
    over_pairs(gold, pred, |g, p| {
        let key = |t: &ChunkTree| {
            t.constituents()
                .into_iter()
                .map(|c| (c.start, c.end, labelled.then_some(c.label)))
                .collect::<Vec<_>>()
        };
        multiset_match(key(g), key(p))
    })
}

fn top_chunks(t: &ChunkTree, with_shape: bool) -> Vec<(usize, usize, String)> {
    t.top_level_nodes()
        .into_iter()
        .map(|n| {
            let (s, e) = t.span(Child::Node(n));
            let shape = if with_shape { t.shape(Child::Node(n)) } else { String::new() };
            (s, e, shape)
        })
        .collect()
}

/// Top-level chunks whose whole unlabelled structure is right.
pub fn structural_match(gold: &[ChunkTree], pred: &[ChunkTree]) -> Counts {
    over_pairs(gold, pred, |g, p| multiset_match(top_chunks(g, true), top_chunks(p, true)))
}

/// Top-level chunks whose span is right.
pub fn external_bounds(gold: &[ChunkTree], pred: &[ChunkTree]) -> Counts {
    over_pairs(gold, pred, |g, p| multiset_match(top_chunks(g, false), top_chunks(p, false)))
}

/// Per extracted chunk, or per whole sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Treebank,
    Chunking,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Treebank => "treebank",
            Mode::Chunking => "chunking",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "treebank" => Ok(Mode::Treebank),
            "chunking" => Ok(Mode::Chunking),
            other => Err(format!("unknown mode {other:?} (expected treebank or chunking)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Tags,
    Bracketing,
    Labelled,
    Structural,
    External,
}

impl Measure {
    pub fn label(&self) -> &'static str {
        match self {
            Measure::Tags => "tags",
            Measure::Bracketing => "bracketing",
            Measure::Labelled => "lab. brack.",
            Measure::Structural => "struct. match",
            Measure::External => "ext. bounds",
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Measure::Tags => "tags",
            Measure::Bracketing => "bracketing",
            Measure::Labelled => "labelled",
            Measure::Structural => "structural",
            Measure::External => "external",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub measure: Measure,
    pub counts: Counts,
    pub recall: f64,
    pub precision: f64,
}

impl Row {
    pub fn from_counts(measure: Measure, counts: Counts) -> Self {
        Row {
            measure,
            counts,
            recall: counts.recall(),
            precision: counts.precision(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mode: Mode,
    /// Number of reports averaged into this one.
    pub folds: usize,
    pub rows: Vec<Row>,
}

impl EvalReport {
    /// All measures for aligned gold and predicted trees. External bounds
    /// are reported in chunking mode only.
    pub fn compute(gold: &[ChunkTree], pred: &[ChunkTree], mode: Mode) -> Self {
        let tags = |ts: &[ChunkTree]| -> Vec<Vec<StructuralTag>> {
            ts.iter()
                .map(|t| crate::treebank::encode_tree(t).expect("trees within the depth bound"))
                .collect()
        };
        let mut rows = vec![
            Row::from_counts(Measure::Tags, tags_accuracy(&tags(gold), &tags(pred))),
            Row::from_counts(Measure::Bracketing, bracketing(gold, pred, false)),
            Row::from_counts(Measure::Labelled, bracketing(gold, pred, true)),
            Row::from_counts(Measure::Structural, structural_match(gold, pred)),
        ];
        if mode == Mode::Chunking {
            rows.push(Row::from_counts(Measure::External, external_bounds(gold, pred)));
        }
        EvalReport { mode, folds: 1, rows }
    }

    pub fn row(&self, m: Measure) -> Option<&Row> {
        self.rows.iter().find(|r| r.measure == m)
    }

    /// Mean of per-report recall and precision; counts are summed.
    pub fn average(reports: &[EvalReport]) -> Option<EvalReport> {
        let first = reports.first()?;
        let n = reports.len() as f64;
        let rows = first
            .rows
            .iter()
            .map(|r| {
                let mut counts = Counts::default();
                let (mut rec, mut prec) = (0.0, 0.0);
                for rep in reports {
                    let x = rep.row(r.measure).expect("reports share their measures");
                    counts.add(x.counts);
                    rec += x.recall;
                    prec += x.precision;
                }
                Row {
                    measure: r.measure,
                    counts,
                    recall: rec / n,
                    precision: prec / n,
                }
            })
            .collect();
        Some(EvalReport {
            mode: first.mode,
            folds: reports.iter().map(|r| r.folds).sum(),
            rows,
        })
    }

    /// Plain-text table: measure, total, correct, recall, precision.
    pub fn to_table(&self) -> String {
        let mut s = format!("mode: {}  folds: {}\n", self.mode, self.folds);
        s += &format!("{:<14} {:>9} {:>9} {:>7} {:>7}\n", "measure", "total", "correct", "recall", "prec.");
        for r in &self.rows {
            if r.measure == Measure::Tags {
                s += &format!(
                    "{:<14} {:>9} {:>9} {:>15}\n",
                    r.measure.label(),
                    r.counts.gold,
                    r.counts.correct,
                    format!("{}%", percent(r.recall))
                );
            } else {
                s += &format!(
                    "{:<14} {:>9} {:>9} {:>6}% {:>6}%\n",
                    r.measure.label(),
                    r.counts.gold,
                    r.counts.correct,
                    percent(r.recall),
                    percent(r.precision)
                );
            }
        }
        s
    }

    /// `key=value` lines, full precision.
    pub fn to_key_values(&self) -> String {
        let mut s = format!("mode={}\nfolds={}\n", self.mode, self.folds);
        for r in &self.rows {
            let k = r.measure.key();
            s += &format!("{k}.gold={}\n", r.counts.gold);
            s += &format!("{k}.predicted={}\n", r.counts.predicted);
            s += &format!("{k}.correct={}\n", r.counts.correct);
            s += &format!("{k}.recall={}\n", r.recall);
            s += &format!("{k}.precision={}\n", r.precision);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_sentence;

    fn t(s: &str) -> ChunkTree {
        parse_sentence(s).unwrap()
    }

    #[test]
    fn reported_ratios() {
        assert_eq!(percent(Counts::new(129822, 129822, 123435).recall()), "95.1");
        assert_eq!(percent(Counts::new(56715, 0, 49715).recall()), "87.7");
        assert_eq!(percent(Counts::new(37942, 0, 33450).recall()), "88.2");
        assert_eq!(percent(Counts::new(46599, 0, 43833).recall()), "94.1");
    }

    #[test]
    fn one_flipped_rel() {
        let g = vec![crate::treebank::encode_tree(&t("(NP (ART) (ADJA) (NN))")).unwrap()];
        let mut p = g.clone();
        p[0][2].rel = crate::treebank::RelValue::Close1;
        let c = tags_accuracy(&g, &p);
        assert_eq!((c.correct, c.gold), (2, 3));
        let ten: Vec<Vec<StructuralTag>> = vec![(0..10).map(|_| g[0][1].clone()).collect()];
        let mut flipped = ten.clone();
        flipped[0][4].rel = crate::treebank::RelValue::Other;
        assert_eq!(tags_accuracy(&ten, &flipped).recall(), 0.9);
    }

    #[test]
    fn spurious_node() {
        let g = vec![t("(PP (APPR) (NP (ART) (NP (NN) (NN)))) (NP (NE))")];
        let p = vec![t("(PP (APPR) (NP (ART) (NP (NN) (NN)))) (NP (AP (NE)))")];
        let c = bracketing(&g, &p, true);
        assert_eq!((c.recall(), c.precision()), (1.0, 0.8));
    }

    #[test]
    fn structure_versus_bounds() {
        let g = vec![t("(NP (ART) (NN) (PP (APPR) (NN))) (VVFIN)")];
        let p = vec![t("(NP (NP (ART) (NN)) (PP (APPR) (NN))) (VVFIN)")];
        assert_eq!(structural_match(&g, &p).correct, 0);
        assert_eq!(external_bounds(&g, &p).correct, 1);
        let r = EvalReport::compute(&g, &g, Mode::Chunking);
        assert!(r.rows.iter().all(|r| r.recall == 1.0 && r.precision == 1.0));
        assert_eq!(r.rows.len(), 5);
    }

    #[test]
    fn swapping_swaps_recall_and_precision() {
        let g = vec![t("(NP (ART) (NN) (PP (APPR) (NN))) (VVFIN)")];
        let p = vec![t("(NP (NP (ART) (NN)) (PP (APPR) (NN))) (VVFIN)")];
        for f in [|a: &[ChunkTree], b: &[ChunkTree]| bracketing(a, b, true), structural_match, external_bounds] {
            let (x, y) = (f(&g, &p), f(&p, &g));
            assert_eq!((x.recall(), x.precision()), (y.precision(), y.recall()));
        }
    }

    #[test]
    fn averaging_uses_fold_ratios() {
        let a = EvalReport {
            mode: Mode::Treebank,
            folds: 1,
            rows: vec![Row::from_counts(Measure::Tags, Counts::new(10, 10, 9))],
        };
        let b = EvalReport {
            mode: Mode::Treebank,
            folds: 1,
            rows: vec![Row::from_counts(Measure::Tags, Counts::new(30, 30, 15))],
        };
        let m = EvalReport::average(&[a, b]).unwrap();
        let row = m.row(Measure::Tags).unwrap();
        assert!((row.recall - 0.7).abs() < 1e-12);
        assert_eq!(row.counts, Counts::new(40, 40, 24));
        assert!(m.to_table().contains("70.0%"));
        assert!(m.to_key_values().contains("tags.correct=24"));
    }
}
