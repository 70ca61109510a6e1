//! Reversible mapping between chunk trees and structural-tag sequences.
//!
//! A token's REL value records how many open nodes are closed and opened
//! between its predecessor and itself. Parent chains that would reach the
//! virtual root never satisfy a condition, so chunk-initial and out-of-chunk
//! tokens always carry `rel = 1`.
//!
//! Decoding keeps the chain of the previous token as a stack. A close that
//! reaches below the bottom of the stack reveals an ancestor of the
//! chunk-initial token that the `rel = 1` tag could not express; such an
//! ancestor necessarily starts at the chunk's first token.

use std::collections::HashMap;
use std::fmt;

use super::tree::{Child, ChunkTree, Token, TreeBuilder, MAX_LEAF_DEPTH};
use super::types::{PhraseCat, RelValue, StructuralTag, TagSequence};
use super::validate::{validate_tree, Item, Violation};
use crate::error::TreeError;

/// Interior nodes allowed above a single leaf.
const MAX_NODES_ABOVE_LEAF: usize = MAX_LEAF_DEPTH - 1;

/// Encodes a tree as one structural tag per leaf.
pub fn encode_tree(tree: &ChunkTree) -> Result<TagSequence, TreeError> {
    let chains = tree.chains();
    for (leaf, chain) in chains.iter().enumerate() {
        let depth = chain.len() + 1;
        if depth > MAX_LEAF_DEPTH {
            return Err(TreeError::DepthExceeded {
                leaf,
                depth,
                max: MAX_LEAF_DEPTH,
            });
        }
    }
    let mut out = Vec::with_capacity(tree.leaves.len());
    for (i, leaf) in tree.leaves.iter().enumerate() {
        let cat = match chains[i].first() {
            Some(&n) => tree.nodes[n].label.clone(),
            None => PhraseCat::none(),
        };
        let rel = if i == 0 {
            RelValue::Other
        } else {
            relation(&chains[i], &chains[i - 1])
        };
        out.push(StructuralTag::new(leaf.pos.clone(), rel, cat));
    }
    Ok(out)
}

/// First REL condition that holds between the chain of a token (`cur`) and
/// that of its predecessor (`prev`). Chains list interior nodes innermost
/// first, so `chain[k - 1]` is `parent^k`; the virtual root is absent and
/// therefore never equal to anything.
fn relation(cur: &[usize], prev: &[usize]) -> RelValue {
    let same = |a: usize, b: usize| match (cur.get(a - 1), prev.get(b - 1)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    };
    if same(1, 1) {
        RelValue::Sibling
    } else if same(1, 2) {
        RelValue::Close1
    } else if same(1, 3) {
        RelValue::Close2
    } else if same(2, 1) {
        RelValue::Open1
    } else if same(3, 1) {
        RelValue::Open2
    } else if same(2, 2) {
        RelValue::CloseOpen
    } else {
        RelValue::Other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairKind {
    /// The first token carried a REL other than `1`.
    FirstToken,
    /// A close (`+`, `++`, `=`) with no open chunk.
    ClampedClose,
    /// `0`, `-` or `--` following an out-of-chunk token.
    NoOpenChunk,
    /// A REL other than `1` together with `CAT = NONE`.
    NoneCategory,
    /// Revealing the closed-to node would exceed the depth bound.
    DepthLimit,
    /// Fewer nodes opened than requested to stay within the depth bound.
    ClampedOpen,
    /// The token's CAT lost the majority vote for its parent's label.
    LabelConflict,
}

/// One change the decoder made to an ill-formed sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repair {
    pub position: usize,
    pub kind: RepairKind,
    pub original: RelValue,
    pub applied: RelValue,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "token {}: {:?}, rel {} treated as {}",
            self.position, self.kind, self.original, self.applied
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub tree: ChunkTree,
    pub repairs: Vec<Repair>,
}

#[derive(Debug)]
struct Pending {
    children: Vec<Child>,
    /// Categories of directly attached leaves, in leaf order.
    votes: Vec<PhraseCat>,
}

#[derive(Debug, Default)]
struct Decoder {
    nodes: Vec<Pending>,
    top: Vec<Child>,
    /// Chain of the previous token, outermost first.
    stack: Vec<usize>,
    /// Deepest chain seen in the current chunk.
    chunk_depth: usize,
    repairs: Vec<Repair>,
}

impl Decoder {
    fn new_node(&mut self, children: Vec<Child>) -> usize {
        self.nodes.push(Pending {
            children,
            votes: Vec::new(),
        });
        self.nodes.len() - 1
    }

    fn attach(&mut self, child: Child) {
        match self.stack.last() {
            Some(&n) => self.nodes[n].children.push(child),
            None => self.top.push(child),
        }
    }

    fn repair(&mut self, position: usize, kind: RepairKind, original: RelValue, applied: RelValue) {
        self.repairs.push(Repair {
            position,
            kind,
            original,
            applied,
        });
    }

    fn start_chunk(&mut self, leaf: usize, cat: &PhraseCat) {
        self.stack.clear();
        if cat.is_none() {
            self.top.push(Child::Leaf(leaf));
            self.chunk_depth = 0;
        } else {
            let n = self.new_node(vec![Child::Leaf(leaf)]);
            self.nodes[n].votes.push(cat.clone());
            self.top.push(Child::Node(n));
            self.stack.push(n);
            self.chunk_depth = 1;
        }
    }

    /// Wraps the current chunk's outermost node in `count` new ancestors.
    fn reveal(&mut self, count: usize) {
        for _ in 0..count {
            let inner = self.stack[0];
            let outer = self.new_node(vec![Child::Node(inner)]);
            let slot = self
                .top
                .iter()
                .rposition(|&c| c == Child::Node(inner))
                .expect("outermost open node is a top-level item");
            self.top[slot] = Child::Node(outer);
            self.stack.insert(0, outer);
        }
        self.chunk_depth += count;
    }

    fn step(&mut self, i: usize, tag: &StructuralTag) {
        let original = tag.rel;
        let Some((close, open)) = original.moves() else {
            self.start_chunk(i, &tag.cat);
            return;
        };
        if i == 0 {
            self.repair(i, RepairKind::FirstToken, original, RelValue::Other);
            self.start_chunk(i, &tag.cat);
            return;
        }
        if tag.cat.is_none() {
            self.repair(i, RepairKind::NoneCategory, original, RelValue::Other);
            self.start_chunk(i, &tag.cat);
            return;
        }
        if self.stack.is_empty() {
            let kind = if close > 0 {
                RepairKind::ClampedClose
            } else {
                RepairKind::NoOpenChunk
            };
            self.repair(i, kind, original, RelValue::Other);
            self.start_chunk(i, &tag.cat);
            return;
        }
        if self.stack.len() <= close {
            let missing = close + 1 - self.stack.len();
            if self.chunk_depth + missing > MAX_NODES_ABOVE_LEAF {
                self.repair(i, RepairKind::DepthLimit, original, RelValue::Other);
                self.start_chunk(i, &tag.cat);
                return;
            }
            self.reveal(missing);
        }
        let landing = self.stack.len() - close;
        let opened = open.min(MAX_NODES_ABOVE_LEAF - landing);
        if opened < open {
            let applied = RelValue::from_moves(close, opened).unwrap_or(RelValue::Other);
            self.repair(i, RepairKind::ClampedOpen, original, applied);
        }
        self.stack.truncate(landing);
        for _ in 0..opened {
            let n = self.new_node(Vec::new());
            self.attach(Child::Node(n));
            self.stack.push(n);
        }
        self.attach(Child::Leaf(i));
        let parent = *self.stack.last().expect("landing node exists");
        self.nodes[parent].votes.push(tag.cat.clone());
        self.chunk_depth = self.chunk_depth.max(self.stack.len());
    }

    fn label(&self, n: usize, memo: &mut HashMap<usize, PhraseCat>) -> PhraseCat {
        if let Some(l) = memo.get(&n) {
            return l.clone();
        }
        let node = &self.nodes[n];
        let label = match majority(&node.votes) {
            Some(l) => l,
            None => match node.children.iter().find_map(|c| match c {
                Child::Node(m) => Some(*m),
                Child::Leaf(_) => None,
            }) {
                Some(first) => self.label(first, memo),
                // unreachable for decoder-built nodes, which always get a leaf vote or a child node
                None => PhraseCat::label("NP").expect("valid label"),
            },
        };
        memo.insert(n, label.clone());
        label
    }

    fn build(mut self, seq: &[StructuralTag]) -> Decoded {
        let mut memo = HashMap::new();
        for n in 0..self.nodes.len() {
            let label = self.label(n, &mut memo);
            for &c in &self.nodes[n].children {
                if let Child::Leaf(l) = c {
                    if seq[l].cat != label {
                        self.repairs.push(Repair {
                            position: l,
                            kind: RepairKind::LabelConflict,
                            original: seq[l].rel,
                            applied: seq[l].rel,
                        });
                    }
                }
            }
        }
        self.repairs.sort_by_key(|r| r.position);
        let mut builder = TreeBuilder::new();
        for &c in &self.top {
            self.emit(c, seq, &mut builder, &mut memo);
        }
        Decoded {
            tree: builder.finish(),
            repairs: self.repairs,
        }
    }

    fn emit(
        &self,
        child: Child,
        seq: &[StructuralTag],
        builder: &mut TreeBuilder,
        memo: &mut HashMap<usize, PhraseCat>,
    ) {
        match child {
            Child::Leaf(l) => {
                builder.leaf(Token::pos_only(seq[l].tag.clone()));
            }
            Child::Node(n) => {
                builder.open(self.label(n, memo));
                for &c in &self.nodes[n].children {
                    self.emit(c, seq, builder, memo);
                }
                builder.close();
            }
        }
    }
}

/// Most frequent category; ties go to the one voted first.
fn majority(votes: &[PhraseCat]) -> Option<PhraseCat> {
    let mut counts: Vec<(&PhraseCat, usize)> = Vec::new();
    for v in votes {
        match counts.iter_mut().find(|(c, _)| *c == v) {
            Some(entry) => entry.1 += 1,
            None => counts.push((v, 1)),
        }
    }
    let mut best: Option<(&PhraseCat, usize)> = None;
    for (c, n) in counts {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((c, n));
        }
    }
    best.map(|(c, _)| c.clone())
}

/// Rebuilds a tree from structural tags. Total: ill-formed input is repaired
/// and every repair is reported. Leaves carry POS tags only.
pub fn decode_tags(seq: &[StructuralTag]) -> Decoded {
    let mut dec = Decoder::default();
    for (i, tag) in seq.iter().enumerate() {
        dec.step(i, tag);
    }
    dec.build(seq)
}

/// Like [`decode_tags`], but copies word forms from `words` onto the leaves.
pub fn decode_with_words(seq: &[StructuralTag], words: &[Option<String>]) -> Decoded {
    let mut decoded = decode_tags(seq);
    for (leaf, word) in decoded.tree.leaves.iter_mut().zip(words) {
        leaf.word = word.clone();
    }
    decoded
}

/// Reasons a valid tree would not survive `decode_tags(encode_tree(t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodabilityIssue {
    Invalid(Violation),
    /// A node whose only child is another node; the encoding cannot see it.
    UnaryNode(usize),
    /// The transition into this leaf needs a close/open combination that no
    /// REL value expresses, so it would start a new chunk.
    UnrepresentableStep(usize),
    /// A node without directly attached leaves whose label differs from its
    /// first child node's; the label cannot be recovered.
    UnrecoverableLabel(usize),
}

/// Lists what keeps a tree out of the class the codec reproduces exactly.
pub fn encodability_issues(tree: &ChunkTree) -> Vec<EncodabilityIssue> {
    let violations = validate_tree(tree);
    if !violations.is_empty() {
        return violations.into_iter().map(EncodabilityIssue::Invalid).collect();
    }
    let mut out = Vec::new();
    for (n, node) in tree.nodes.iter().enumerate() {
        if let [Child::Node(_)] = node.children.as_slice() {
            out.push(EncodabilityIssue::UnaryNode(n));
        }
        let has_leaf = node.children.iter().any(|c| matches!(c, Child::Leaf(_)));
        if !has_leaf {
            if let Some(Child::Node(first)) = node.children.first() {
                if tree.nodes[*first].label != node.label {
                    out.push(EncodabilityIssue::UnrecoverableLabel(n));
                }
            }
        }
    }
    let chains = tree.chains();
    for i in 1..chains.len() {
        let (cur, prev) = (&chains[i], &chains[i - 1]);
        let (Some(cur_top), Some(prev_top)) = (cur.last(), prev.last()) else {
            continue;
        };
        if cur_top != prev_top {
            continue;
        }
        // lowest common ancestor below the root
        let closed = prev.iter().position(|n| cur.contains(n)).expect("shared top node");
        let opened = cur.iter().position(|n| *n == prev[closed]).expect("shared node");
        if RelValue::from_moves(closed, opened).is_none() {
            out.push(EncodabilityIssue::UnrepresentableStep(i));
        }
    }
    out
}

impl fmt::Display for EncodabilityIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodabilityIssue::Invalid(v) => write!(f, "invalid tree: {v}"),
            EncodabilityIssue::UnaryNode(n) => write!(f, "{} has a single node child", Item::Node(*n)),
            EncodabilityIssue::UnrepresentableStep(l) => {
                write!(f, "transition into {} has no REL value", Item::Leaf(*l))
            }
            EncodabilityIssue::UnrecoverableLabel(n) => {
                write!(f, "label of {} cannot be recovered", Item::Node(*n))
            }
        }
    }
}
