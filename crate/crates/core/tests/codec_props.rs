use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use structag::corpus::{read_corpus, read_tagged, write_corpus_to, write_tagged, Corpus, Format, TaggedSentence};
use structag::treebank::random::{random_encodable_tree, random_tree};
use structag::treebank::{
    decode_tags, encode_tree, pos_projection, validate_tree, PhraseCat, PosTag, RelValue, StructuralTag,
};
use structag::vocab::Vocabulary;

fn rel_strategy() -> impl Strategy<Value = RelValue> {
    (0u8..7).prop_map(|i| RelValue::from_index(i).unwrap())
}

fn tag_strategy() -> impl Strategy<Value = StructuralTag> {
    (
        prop::sample::select(vec!["ART", "NN", "APPR", "ADJA", "VVFIN"]),
        rel_strategy(),
        prop::sample::select(vec!["NONE", "NP", "PP", "AP"]),
    )
        .prop_map(|(t, r, c)| StructuralTag::new(PosTag::new(t).unwrap(), r, PhraseCat::new(c).unwrap()))
}

#[test]
fn encodable_trees_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let t = random_encodable_tree(&mut rng, 6);
        let tags = encode_tree(&t).unwrap();
        let back = decode_tags(&tags);
        assert!(back.repairs.is_empty(), "{t}: {:?}", back.repairs);
        assert_eq!(back.tree, t);
    }
}

#[test]
fn re_encoding_is_stable_for_all_bounded_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let t = random_tree(&mut rng, 6);
        let tags = encode_tree(&t).unwrap();
        let back = decode_tags(&tags);
        assert!(back.repairs.is_empty(), "{t}");
        assert_eq!(encode_tree(&back.tree).unwrap(), tags, "{t}");
    }
}

#[test]
fn precedence_prefers_sibling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let t = random_tree(&mut rng, 5);
        let tags = encode_tree(&t).unwrap();
        let (leaf_parent, _) = t.parents();
        for i in 1..tags.len() {
            if leaf_parent[i].is_some() && leaf_parent[i] == leaf_parent[i - 1] {
                assert_eq!(tags[i].rel, RelValue::Sibling);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn decoding_is_total(seq in prop::collection::vec(tag_strategy(), 1..14)) {
        let d = decode_tags(&seq);
        prop_assert!(validate_tree(&d.tree).is_empty(), "{}", d.tree);
        prop_assert_eq!(d.tree.pos_tags(), pos_projection(&seq));
        // the repaired sequence is a fixed point
        let again = encode_tree(&d.tree).unwrap();
        let d2 = decode_tags(&again);
        prop_assert!(d2.repairs.is_empty());
        prop_assert_eq!(&d2.tree, &d.tree);
    }

    #[test]
    fn decoding_is_deterministic(seq in prop::collection::vec(tag_strategy(), 1..10)) {
        prop_assert_eq!(decode_tags(&seq), decode_tags(&seq));
    }

    #[test]
    fn corpus_files_round_trip(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = (0..n).map(|_| random_encodable_tree(&mut rng, 4)).collect();
        let corpus = Corpus::new(trees, Vocabulary::standard());
        for format in [Format::Bracketed, Format::Columnar] {
            let mut buf = Vec::new();
            write_corpus_to(&corpus, &mut buf, format).unwrap();
            let back = read_corpus(std::str::from_utf8(&buf).unwrap(), format, &Vocabulary::standard()).unwrap();
            prop_assert_eq!(&back, &corpus);
        }
    }
}

#[test]
fn tagged_files_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let list: Vec<TaggedSentence> = (0..50)
        .map(|i| {
            let t = random_tree(&mut rng, 5);
            let tags = encode_tree(&t).unwrap();
            if i % 2 == 0 {
                TaggedSentence::unworded(tags)
            } else {
                let words = (0..tags.len()).map(|k| Some(format!("w{k}"))).collect();
                TaggedSentence::new(words, tags)
            }
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seqs.tsv");
    write_tagged(&list, &path).unwrap();
    let back = read_tagged(&path).unwrap();
    assert_eq!(back.len(), list.len());
    for (a, b) in back.iter().zip(&list) {
        assert_eq!(a.tags, b.tags);
        assert_eq!(a.words, b.words);
    }

    write_tagged(&[], &path).unwrap();
    assert!(read_tagged(&path).unwrap().is_empty());
}
