use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use structag::ngram::{count_ngrams, deleted_interpolation, NgramModel};
use structag::treebank::random::random_encodable_tree;
use structag::treebank::{encode_tree, StructuralTag};

type Tag = Option<StructuralTag>;

fn sequences(n: usize, seed: u64) -> Vec<Vec<StructuralTag>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| encode_tree(&random_encodable_tree(&mut rng, 4)).unwrap()).collect()
}

#[derive(Default)]
struct Recount {
    uni: HashMap<StructuralTag, u64>,
    bi: HashMap<(Tag, StructuralTag), u64>,
    tri: HashMap<(Tag, Tag, StructuralTag), u64>,
    total: u64,
}

fn recount(seqs: &[Vec<StructuralTag>]) -> Recount {
    let mut r = Recount::default();
    for s in seqs {
        let padded: Vec<Tag> = [None, None].into_iter().chain(s.iter().cloned().map(Some)).collect();
        for w in padded.windows(3) {
            let y = w[2].clone().unwrap();
            *r.uni.entry(y.clone()).or_default() += 1;
            *r.bi.entry((w[1].clone(), y.clone())).or_default() += 1;
            *r.tri.entry((w[0].clone(), w[1].clone(), y)).or_default() += 1;
            r.total += 1;
        }
    }
    r
}

#[test]
fn counts_match_a_rescan() {
    let seqs = sequences(100, 5);
    let t = count_ngrams(&seqs).unwrap();
    let r = recount(&seqs);
    assert_eq!(t.total(), r.total);
    for (y, &c) in &r.uni {
        assert_eq!(t.unigram(y), c);
    }
    for ((h1, y), &c) in &r.bi {
        assert_eq!(t.bigram(h1.as_ref(), y), c);
    }
    for ((h2, h1, y), &c) in &r.tri {
        assert_eq!(t.trigram(h2.as_ref(), h1.as_ref(), y), c);
    }
    assert_eq!(t.trigram_count(), r.tri.len());
    // history counts are the marginals of the next order up
    let mut bh: HashMap<(Tag, Tag), u64> = HashMap::new();
    for ((h2, h1, _), &c) in &r.tri {
        *bh.entry((h2.clone(), h1.clone())).or_default() += c;
    }
    for ((h2, h1), c) in bh {
        assert_eq!(t.bigram_history(h2.as_ref(), h1.as_ref()), c);
    }
    let mut uh: HashMap<Tag, u64> = HashMap::new();
    for ((h1, _), &c) in &r.bi {
        *uh.entry(h1.clone()).or_default() += c;
    }
    for (h1, c) in uh {
        assert_eq!(t.unigram_history(h1.as_ref()), c);
    }
}

#[test]
fn doubling_the_corpus_doubles_counts() {
    let seqs = sequences(30, 2);
    let twice: Vec<_> = seqs.iter().chain(&seqs).cloned().collect();
    let (a, b) = (count_ngrams(&seqs).unwrap(), count_ngrams(&twice).unwrap());
    assert_eq!(2 * a.total(), b.total());
    for s in &seqs {
        for w in s.windows(3) {
            assert_eq!(2 * a.trigram(Some(&w[0]), Some(&w[1]), &w[2]), b.trigram(Some(&w[0]), Some(&w[1]), &w[2]));
        }
    }
}

#[test]
fn interpolation_matches_reference_on_every_history() {
    let seqs = sequences(50, 9);
    let model = NgramModel::train(&seqs).unwrap();
    let w = deleted_interpolation(&model.table).unwrap();
    assert!((w.l1 + w.l2 + w.l3 - 1.0).abs() < 1e-12);
    assert!(w.l1 >= 0.0 && w.l2 >= 0.0 && w.l3 >= 0.0);
    let r = recount(&seqs);
    let futures = model.table.futures().tags().to_vec();
    let histories: Vec<Tag> = std::iter::once(None).chain(futures.iter().cloned().map(Some)).collect();
    let mut seen = 0;
    for h2 in &histories {
        for h1 in &histories {
            let p = model.distribution(h2.as_ref(), h1.as_ref());
            let bi_hist: u64 = futures.iter().map(|y| r.bi.get(&(h1.clone(), y.clone())).copied().unwrap_or(0)).sum();
            let tri_hist: u64 = futures
                .iter()
                .map(|y| r.tri.get(&(h2.clone(), h1.clone(), y.clone())).copied().unwrap_or(0))
                .sum();
            for (i, y) in futures.iter().enumerate() {
                let r1 = r.uni[y] as f64 / r.total as f64;
                let r2 = match bi_hist {
                    0 => 0.0,
                    d => r.bi.get(&(h1.clone(), y.clone())).copied().unwrap_or(0) as f64 / d as f64,
                };
                let r3 = match tri_hist {
                    0 => 0.0,
                    d => r.tri.get(&(h2.clone(), h1.clone(), y.clone())).copied().unwrap_or(0) as f64 / d as f64,
                };
                let expected = w.l1 * r1 + w.l2 * r2 + w.l3 * r3;
                assert!((p[i] - expected).abs() < 1e-12);
            }
            if tri_hist > 0 {
                seen += 1;
                let s: f64 = p.iter().sum();
                assert!((s - 1.0).abs() < 1e-9, "history sums to {s}");
            }
        }
    }
    assert!(seen > 20);
}
