//! Trigram baseline over atomic structural tags with deleted-interpolation
//! smoothing.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::ModelError;
use crate::inventory::TagInventory;
use crate::modelio::{check_magic, parse_f64, seal, unseal};
use crate::treebank::StructuralTag;

pub const NGRAM_MAGIC: &str = "structag-ngram";
pub const NGRAM_VERSION: u32 = 1;

/// A history slot: the padding sentinel, an inventory tag, or a tag the
/// table has never seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gram {
    Boundary,
    Tag(u32),
    Unseen,
}

/// N-gram counts with start padding. History counts are the marginals of
/// the next order up, so every seen history's continuations sum to it.
#[derive(Clone, Debug)]
pub struct NgramTable {
    futures: TagInventory,
    unigrams: Vec<u64>,
    bigrams: HashMap<(Gram, u32), u64>,
    trigrams: HashMap<(Gram, Gram, u32), u64>,
    unigram_hist: HashMap<Gram, u64>,
    bigram_hist: HashMap<(Gram, Gram), u64>,
    total: u64,
}

impl NgramTable {
    fn from_trigrams(futures: TagInventory, trigrams: HashMap<(Gram, Gram, u32), u64>) -> Self {
        let mut t = NgramTable {
            unigrams: vec![0; futures.len()],
            futures,
            bigrams: HashMap::new(),
            trigrams,
            unigram_hist: HashMap::new(),
            bigram_hist: HashMap::new(),
            total: 0,
        };
        for (&(h2, h1, y), &c) in &t.trigrams {
            *t.bigrams.entry((h1, y)).or_default() += c;
            *t.bigram_hist.entry((h2, h1)).or_default() += c;
            *t.unigram_hist.entry(h1).or_default() += c;
            t.unigrams[y as usize] += c;
            t.total += c;
        }
        t
    }

    pub fn futures(&self) -> &TagInventory {
        &self.futures
    }

    /// Number of counted tokens.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn gram(&self, s: Option<&StructuralTag>) -> Gram {
        match s {
            None => Gram::Boundary,
            Some(s) => self.futures.index_of(s).map_or(Gram::Unseen, |i| Gram::Tag(i as u32)),
        }
    }

    pub fn unigram(&self, y: &StructuralTag) -> u64 {
        self.futures.index_of(y).map_or(0, |i| self.unigrams[i])
    }

    pub fn bigram(&self, h1: Option<&StructuralTag>, y: &StructuralTag) -> u64 {
        let Some(y) = self.futures.index_of(y) else { return 0 };
        self.bigrams.get(&(self.gram(h1), y as u32)).copied().unwrap_or(0)
    }

    pub fn trigram(&self, h2: Option<&StructuralTag>, h1: Option<&StructuralTag>, y: &StructuralTag) -> u64 {
        let Some(y) = self.futures.index_of(y) else { return 0 };
        self.trigrams
            .get(&(self.gram(h2), self.gram(h1), y as u32))
            .copied()
            .unwrap_or(0)
    }

    /// Σ_y f(h1, y).
    pub fn unigram_history(&self, h1: Option<&StructuralTag>) -> u64 {
        self.unigram_hist.get(&self.gram(h1)).copied().unwrap_or(0)
    }

    /// Σ_y f(h2, h1, y).
    pub fn bigram_history(&self, h2: Option<&StructuralTag>, h1: Option<&StructuralTag>) -> u64 {
        self.bigram_hist.get(&(self.gram(h2), self.gram(h1))).copied().unwrap_or(0)
    }

    pub fn trigram_count(&self) -> usize {
        self.trigrams.len()
    }

    /// Relative frequencies r(y), r(y|h1), r(y|h2,h1) for every future,
    /// zero where the history was never seen.
    fn relative(&self, h2: Gram, h1: Gram) -> [Vec<f64>; 3] {
        let n = self.futures.len();
        let uni: Vec<f64> = self.unigrams.iter().map(|&c| c as f64 / self.total as f64).collect();
        let mut bi = vec![0.0; n];
        let mut tri = vec![0.0; n];
        let hb = self.unigram_hist.get(&h1).copied().unwrap_or(0);
        let ht = self.bigram_hist.get(&(h2, h1)).copied().unwrap_or(0);
        for y in 0..n {
            if hb > 0 {
                bi[y] = self.bigrams.get(&(h1, y as u32)).copied().unwrap_or(0) as f64 / hb as f64;
            }
            if ht > 0 {
                tri[y] = self.trigrams.get(&(h2, h1, y as u32)).copied().unwrap_or(0) as f64 / ht as f64;
            }
        }
        [uni, bi, tri]
    }
}

pub fn count_ngrams(seqs: &[Vec<StructuralTag>]) -> Result<NgramTable, ModelError> {
    if seqs.iter().all(Vec::is_empty) {
        return Err(ModelError::EmptyTraining);
    }
    let futures = TagInventory::from_sequences(seqs);
    let mut trigrams: HashMap<(Gram, Gram, u32), u64> = HashMap::new();
    for seq in seqs {
        let mut h = [Gram::Boundary, Gram::Boundary];
        for s in seq {
            let y = futures.index_of(s).expect("inventory built from these sequences") as u32;
            *trigrams.entry((h[0], h[1], y)).or_default() += 1;
            h = [h[1], Gram::Tag(y)];
        }
    }
    Ok(NgramTable::from_trigrams(futures, trigrams))
}

/// Mixture weights for unigram, bigram and trigram estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationWeights {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den <= 1 {
        0.0
    } else {
        (num - 1) as f64 / (den - 1) as f64
    }
}

/// Deleted interpolation: each trigram's count goes to the order whose
/// estimate, with that trigram removed once, is largest. Ties go to the
/// lower order.
pub fn deleted_interpolation(table: &NgramTable) -> Result<InterpolationWeights, ModelError> {
    if table.trigrams.is_empty() {
        return Err(ModelError::EmptyTraining);
    }
    let mut mass = [0u64; 3];
    for (&(h2, h1, y), &c) in &table.trigrams {
        let d3 = ratio(c, table.bigram_hist[&(h2, h1)]);
        let d2 = ratio(table.bigrams[&(h1, y)], table.unigram_hist[&h1]);
        let d1 = ratio(table.unigrams[y as usize], table.total);
        let k = if d1 >= d2 && d1 >= d3 {
            0
        } else if d2 >= d3 {
            1
        } else {
            2
        };
        mass[k] += c;
    }
    let sum: u64 = mass.iter().sum();
    Ok(InterpolationWeights {
        l1: mass[0] as f64 / sum as f64,
        l2: mass[1] as f64 / sum as f64,
        l3: mass[2] as f64 / sum as f64,
    })
}

/// λ₁r(y) + λ₂r(y|h1) + λ₃r(y|h2,h1); terms with an unseen history are 0.
pub fn interpolated_prob(
    table: &NgramTable,
    w: &InterpolationWeights,
    h2: Option<&StructuralTag>,
    h1: Option<&StructuralTag>,
    y: &StructuralTag,
) -> f64 {
    let Some(yi) = table.futures.index_of(y) else { return 0.0 };
    let [uni, bi, tri] = table.relative(table.gram(h2), table.gram(h1));
    w.l1 * uni[yi] + w.l2 * bi[yi] + w.l3 * tri[yi]
}

/// A counted table with its weights.
#[derive(Clone, Debug)]
pub struct NgramModel {
    pub table: NgramTable,
    pub weights: InterpolationWeights,
}

impl NgramModel {
    pub fn train(seqs: &[Vec<StructuralTag>]) -> Result<Self, ModelError> {
        let table = count_ngrams(seqs)?;
        let weights = deleted_interpolation(&table)?;
        Ok(NgramModel { table, weights })
    }

    /// Interpolated probability of every future, in inventory order.
    pub fn distribution_for(&self, h2: Gram, h1: Gram) -> Vec<f64> {
        let [uni, bi, tri] = self.table.relative(h2, h1);
        let w = &self.weights;
        (0..uni.len())
            .map(|y| w.l1 * uni[y] + w.l2 * bi[y] + w.l3 * tri[y])
            .collect()
    }

    pub fn distribution(&self, h2: Option<&StructuralTag>, h1: Option<&StructuralTag>) -> Vec<f64> {
        self.distribution_for(self.table.gram(h2), self.table.gram(h1))
    }

    pub fn to_text(&self) -> String {
        let w = &self.weights;
        let mut s = format!("{NGRAM_MAGIC} {NGRAM_VERSION}\n");
        s += &format!("lambdas {} {} {}\n", w.l1, w.l2, w.l3);
        s += &format!("futures {}\n", self.table.futures.len());
        for t in self.table.futures.tags() {
            s += &format!("{t}\n");
        }
        let mut tri: Vec<_> = self.table.trigrams.iter().collect();
        tri.sort();
        s += &format!("trigrams {}\n", tri.len());
        let g = |g: &Gram| match g {
            Gram::Tag(i) => i.to_string(),
            _ => "^".to_string(),
        };
        for ((h2, h1, y), c) in tri {
            s += &format!("{}\t{}\t{y}\t{c}\n", g(h2), g(h1));
        }
        seal(s)
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let body = unseal(text)?;
        let mut lines = check_magic(body, NGRAM_MAGIC, NGRAM_VERSION)?;
        let (no, l) = lines.field("lambdas")?;
        let l: Vec<f64> = l.split_whitespace().map(|v| parse_f64(no, v)).collect::<Result<_, _>>()?;
        let [l1, l2, l3] = l[..] else {
            return Err(ModelError::format(no, "expected three weights"));
        };
        let n: usize = lines.parsed("futures")?;
        let mut tags = Vec::with_capacity(n);
        for _ in 0..n {
            let (no, l) = lines.next_line()?;
            tags.push(StructuralTag::parse(l).map_err(|e| ModelError::format(no, e.to_string()))?);
        }
        let futures = TagInventory::new(tags);
        let k: usize = lines.parsed("trigrams")?;
        let mut trigrams = HashMap::with_capacity(k);
        for _ in 0..k {
            let (no, l) = lines.next_line()?;
            let bad = || ModelError::format(no, format!("bad trigram line {l:?}"));
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() != 4 {
                return Err(bad());
            }
            let gram = |s: &str| -> Result<Gram, ModelError> {
                match s {
                    "^" => Ok(Gram::Boundary),
                    _ => match s.parse::<u32>() {
                        Ok(i) if (i as usize) < n => Ok(Gram::Tag(i)),
                        _ => Err(bad()),
                    },
                }
            };
            let y = match gram(f[2])? {
                Gram::Tag(y) => y,
                _ => return Err(bad()),
            };
            let c: u64 = f[3].parse().map_err(|_| bad())?;
            trigrams.insert((gram(f[0])?, gram(f[1])?, y), c);
        }
        lines.end()?;
        Ok(NgramModel {
            table: NgramTable::from_trigrams(futures, trigrams),
            weights: InterpolationWeights { l1, l2, l3 },
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        NgramModel::from_text(&fs::read_to_string(path)?)
    }
}
