//! Random tree generation for property tests and benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::codec::encodability_issues;
use super::tree::{ChunkTree, Token, TreeBuilder, MAX_LEAF_DEPTH};
use super::types::{PhraseCat, PosTag};

const POS: [&str; 10] = ["ART", "ADJA", "NN", "APPR", "ADV", "CARD", "NE", "KON", "PROAV", "TRUNC"];
const OUTSIDE_POS: [&str; 4] = ["VVFIN", "VAFIN", "VVPP", "$,"];
const LABELS: [&str; 5] = ["NP", "PP", "AP", "NM", "MPN"];

fn pos<R: Rng>(rng: &mut R, set: &[&str]) -> Token {
    let tag = set.choose(rng).expect("non-empty tag list");
    Token::pos_only(PosTag::new(*tag).expect("valid tag"))
}

fn label<R: Rng>(rng: &mut R) -> PhraseCat {
    PhraseCat::label(*LABELS.choose(rng).expect("non-empty")).expect("valid label")
}

/// Adds one node at nesting level `level` (1 = top-level). Returns the label
/// used, so parents without leaf children can copy it.
fn node<R: Rng>(rng: &mut R, b: &mut TreeBuilder, level: usize) {
    let can_nest = level < MAX_LEAF_DEPTH - 1;
    let arity = rng.random_range(1..=4usize);
    let plan: Vec<bool> = (0..arity).map(|_| can_nest && rng.random_bool(0.3)).collect();
    b.open(label(rng));
    for nested in plan {
        if nested {
            node(rng, b, level + 1);
        } else {
            b.leaf(pos(rng, &POS));
        }
    }
    b.close();
}

/// Any valid tree within the depth bound; top-level items mix chunks and
/// out-of-chunk tokens.
pub fn random_tree<R: Rng>(rng: &mut R, max_items: usize) -> ChunkTree {
    let mut b = TreeBuilder::new();
    let items = rng.random_range(1..=max_items.max(1));
    for _ in 0..items {
        if rng.random_bool(0.3) {
            b.leaf(pos(rng, &OUTSIDE_POS));
        } else {
            node(rng, &mut b, 1);
        }
    }
    relabel_leafless(b.finish())
}

/// Gives nodes without leaf children the label of their first child node,
/// the only label the encoding can carry for them.
fn relabel_leafless(mut tree: ChunkTree) -> ChunkTree {
    use super::tree::Child;
    // children are created after parents, so walk backwards
    for n in (0..tree.nodes.len()).rev() {
        let node = &tree.nodes[n];
        if node.children.iter().any(|c| matches!(c, Child::Leaf(_))) {
            continue;
        }
        if let Some(Child::Node(first)) = node.children.first() {
            tree.nodes[n].label = tree.nodes[*first].label.clone();
        }
    }
    tree
}

/// A random tree from the class reproduced exactly by the codec, sampled by
/// rejection from [`random_tree`] chunk by chunk.
pub fn random_encodable_tree<R: Rng>(rng: &mut R, max_items: usize) -> ChunkTree {
    let mut b = TreeBuilder::new();
    let items = rng.random_range(1..=max_items.max(1));
    for _ in 0..items {
        if rng.random_bool(0.3) {
            b.leaf(pos(rng, &OUTSIDE_POS));
            continue;
        }
        let chunk = loop {
            let mut cb = TreeBuilder::new();
            node(rng, &mut cb, 1);
            let candidate = relabel_leafless(cb.finish());
            if encodability_issues(&candidate).is_empty() {
                break candidate;
            }
        };
        copy_into(&chunk, &mut b);
    }
    b.finish()
}

fn copy_into(tree: &ChunkTree, b: &mut TreeBuilder) {
    use super::tree::Child;
    fn rec(tree: &ChunkTree, c: Child, b: &mut TreeBuilder) {
        match c {
            Child::Leaf(l) => {
                b.leaf(tree.leaves[l].clone());
            }
            Child::Node(n) => {
                b.open_with_func(tree.nodes[n].label.clone(), tree.nodes[n].func.clone());
                for &c in &tree.nodes[n].children {
                    rec(tree, c, b);
                }
                b.close();
            }
        }
    }
    for &c in &tree.top {
        rec(tree, c, b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::validate::validate_tree;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let t = random_tree(&mut rng, 5);
            assert!(validate_tree(&t).is_empty(), "{t}");
            let e = random_encodable_tree(&mut rng, 5);
            assert!(encodability_issues(&e).is_empty(), "{e}");
        }
    }
}
