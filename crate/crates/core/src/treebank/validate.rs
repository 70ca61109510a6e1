use std::fmt;

use super::tree::{Child, ChunkTree, MAX_LEAF_DEPTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Item {
    Leaf(usize),
    Node(usize),
    Root,
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Leaf(i) => write!(f, "leaf {i}"),
            Item::Node(i) => write!(f, "node {i}"),
            Item::Root => f.write_str("virtual root"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A child reference points outside the arena.
    Dangling,
    /// Item is referenced by no parent.
    Orphan,
    /// Item is referenced by more than one parent.
    MultipleParents,
    /// A node reaches itself through its children.
    Cycle,
    EmptyNode,
    /// `NONE` used as a node label.
    NoneLabel,
    /// Children do not cover a contiguous, ordered leaf interval.
    NonContiguous,
    /// Leaf deeper than [`MAX_LEAF_DEPTH`].
    TooDeep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub at: Item,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {}", self.kind, self.at)
    }
}

/// Checks every [`ChunkTree`] invariant; an empty result means the tree is valid.
pub fn validate_tree(tree: &ChunkTree) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_leaves = tree.leaves.len();
    let n_nodes = tree.nodes.len();
    let mut leaf_refs = vec![0usize; n_leaves];
    let mut node_refs = vec![0usize; n_nodes];

    let mut count = |owner: Item, child: Child, out: &mut Vec<Violation>| match child {
        Child::Leaf(l) if l < n_leaves => leaf_refs[l] += 1,
        Child::Node(n) if n < n_nodes => node_refs[n] += 1,
        _ => out.push(Violation {
            kind: ViolationKind::Dangling,
            at: owner,
        }),
    };
    for &c in &tree.top {
        count(Item::Root, c, &mut out);
    }
    for (n, node) in tree.nodes.iter().enumerate() {
        for &c in &node.children {
            count(Item::Node(n), c, &mut out);
        }
        if node.children.is_empty() {
            out.push(Violation {
                kind: ViolationKind::EmptyNode,
                at: Item::Node(n),
            });
        }
        if node.label.is_none() {
            out.push(Violation {
                kind: ViolationKind::NoneLabel,
                at: Item::Node(n),
            });
        }
    }
    for (l, &refs) in leaf_refs.iter().enumerate() {
        match refs {
            0 => out.push(Violation {
                kind: ViolationKind::Orphan,
                at: Item::Leaf(l),
            }),
            1 => {}
            _ => out.push(Violation {
                kind: ViolationKind::MultipleParents,
                at: Item::Leaf(l),
            }),
        }
    }
    for (n, &refs) in node_refs.iter().enumerate() {
        match refs {
            0 => out.push(Violation {
                kind: ViolationKind::Orphan,
                at: Item::Node(n),
            }),
            1 => {}
            _ => out.push(Violation {
                kind: ViolationKind::MultipleParents,
                at: Item::Node(n),
            }),
        }
    }
    if !out.is_empty() {
        // Span and depth checks need a proper forest.
        return out;
    }

    // Walk from the root; anything unreachable now must sit on a cycle.
    let mut visited = vec![false; n_nodes];
    check_children(tree, Item::Root, &tree.top, 0, &mut visited, &mut out);
    for (n, seen) in visited.iter().enumerate() {
        if !seen {
            out.push(Violation {
                kind: ViolationKind::Cycle,
                at: Item::Node(n),
            });
        }
    }
    out
}

/// Checks depth and ordering below `owner`, returning the covered leaf
/// interval, or `None` when it is not contiguous (already reported).
fn check_children(
    tree: &ChunkTree,
    owner: Item,
    children: &[Child],
    depth: usize,
    visited: &mut [bool],
    out: &mut Vec<Violation>,
) -> Option<(usize, usize)> {
    let mut spans = Vec::with_capacity(children.len());
    let mut broken = false;
    for &child in children {
        match child {
            Child::Leaf(l) => {
                if depth + 1 > MAX_LEAF_DEPTH {
                    out.push(Violation {
                        kind: ViolationKind::TooDeep,
                        at: Item::Leaf(l),
                    });
                }
                spans.push((l, l + 1));
            }
            Child::Node(n) => {
                if visited[n] {
                    broken = true;
                    continue;
                }
                visited[n] = true;
                let nested = &tree.nodes[n].children;
                match check_children(tree, Item::Node(n), nested, depth + 1, visited, out) {
                    Some(span) => spans.push(span),
                    None => broken = true,
                }
            }
        }
    }
    if broken {
        return None;
    }
    let chained = spans.windows(2).all(|w| w[0].1 == w[1].0);
    if !chained {
        out.push(Violation {
            kind: ViolationKind::NonContiguous,
            at: owner,
        });
        return None;
    }
    let start = spans.first().map_or(0, |s| s.0);
    let end = spans.last().map_or(0, |s| s.1);
    Some((start, end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::tree::{Node, Token, TreeBuilder};
    use crate::treebank::types::{PhraseCat, PosTag};

    fn tok(s: &str) -> Token {
        Token::pos_only(PosTag::new(s).unwrap())
    }

    fn label(s: &str) -> PhraseCat {
        PhraseCat::label(s).unwrap()
    }

    #[test]
    fn well_formed_pp_is_valid() {
        let mut b = TreeBuilder::new();
        b.open(label("PP"))
            .leaf(tok("APPR"))
            .open(label("NP"))
            .leaf(tok("ART"))
            .leaf(tok("NN"));
        assert!(validate_tree(&b.finish()).is_empty());
    }

    #[test]
    fn skipped_leaf_is_one_contiguity_violation() {
        // NP over leaves 0 and 2, leaf 1 at the root afterwards.
        let tree = ChunkTree {
            leaves: vec![tok("ART"), tok("VVFIN"), tok("NN")],
            nodes: vec![Node {
                label: label("NP"),
                func: None,
                children: vec![Child::Leaf(0), Child::Leaf(2)],
            }],
            top: vec![Child::Node(0), Child::Leaf(1)],
        };
        let v = validate_tree(&tree);
        assert_eq!(
            v,
            vec![Violation {
                kind: ViolationKind::NonContiguous,
                at: Item::Node(0)
            }]
        );
    }

    #[test]
    fn depth_five_leaf_is_one_depth_violation() {
        let mut b = TreeBuilder::new();
        b.open(label("NP"))
            .open(label("NP"))
            .open(label("PP"))
            .open(label("NP"))
            .leaf(tok("NN"));
        let v = validate_tree(&b.finish());
        assert_eq!(
            v,
            vec![Violation {
                kind: ViolationKind::TooDeep,
                at: Item::Leaf(0)
            }]
        );
    }

    #[test]
    fn structural_errors_are_reported() {
        let tree = ChunkTree {
            leaves: vec![tok("NN"), tok("NN")],
            nodes: vec![
                Node {
                    label: PhraseCat::none(),
                    func: None,
                    children: vec![Child::Leaf(0), Child::Leaf(0)],
                },
                Node {
                    label: label("NP"),
                    func: None,
                    children: vec![],
                },
            ],
            top: vec![Child::Node(0), Child::Leaf(7)],
        };
        let kinds: Vec<_> = validate_tree(&tree).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::Dangling));
        assert!(kinds.contains(&ViolationKind::NoneLabel));
        assert!(kinds.contains(&ViolationKind::EmptyNode));
        assert!(kinds.contains(&ViolationKind::MultipleParents));
        assert!(kinds.contains(&ViolationKind::Orphan));
    }

    #[test]
    fn cycles_are_detected() {
        let tree = ChunkTree {
            leaves: vec![tok("NN")],
            nodes: vec![
                Node {
                    label: label("NP"),
                    func: None,
                    children: vec![Child::Leaf(0)],
                },
                Node {
                    label: label("NP"),
                    func: None,
                    children: vec![Child::Node(2)],
                },
                Node {
                    label: label("NP"),
                    func: None,
                    children: vec![Child::Node(1)],
                },
            ],
            top: vec![Child::Node(0)],
        };
        let kinds: Vec<_> = validate_tree(&tree).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::Cycle, ViolationKind::Cycle]);
    }
}
