use std::fmt;

use super::types::{PhraseCat, PosTag};

/// Maximum distance, in edges, between a leaf and the virtual root.
pub const MAX_LEAF_DEPTH: usize = 4;

/// Leaf of a [`ChunkTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub word: Option<String>,
    pub pos: PosTag,
    /// Grammatical function label, carried through but never predicted.
    pub func: Option<String>,
}

impl Token {
    pub fn new(word: Option<String>, pos: PosTag) -> Self {
        Token {
            word,
            pos,
            func: None,
        }
    }

    pub fn pos_only(pos: PosTag) -> Self {
        Token::new(None, pos)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Child {
    Leaf(usize),
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: PhraseCat,
    pub func: Option<String>,
    pub children: Vec<Child>,
}

/// A depth-limited constituency tree stored as an arena.
///
/// `top` lists the children of the virtual root. Trees built through
/// [`TreeBuilder`] number their nodes in pre-order, but nothing relies on
/// that: equality compares structure, not arena positions.
#[derive(Clone, Debug, Default)]
pub struct ChunkTree {
    pub leaves: Vec<Token>,
    pub nodes: Vec<Node>,
    pub top: Vec<Child>,
}

impl ChunkTree {
    /// A tree whose tokens all hang off the virtual root.
    pub fn flat(tokens: Vec<Token>) -> Self {
        let top = (0..tokens.len()).map(Child::Leaf).collect();
        ChunkTree {
            leaves: tokens,
            nodes: Vec::new(),
            top,
        }
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn pos_tags(&self) -> Vec<PosTag> {
        self.leaves.iter().map(|l| l.pos.clone()).collect()
    }

    /// Parent of every leaf and node (`None` = virtual root). Assumes every
    /// item has at most one parent; later references win otherwise.
    pub fn parents(&self) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut leaf_parent = vec![None; self.leaves.len()];
        let mut node_parent = vec![None; self.nodes.len()];
        for (n, node) in self.nodes.iter().enumerate() {
            for child in &node.children {
                match *child {
                    Child::Leaf(l) if l < leaf_parent.len() => leaf_parent[l] = Some(n),
                    Child::Node(m) if m < node_parent.len() => node_parent[m] = Some(n),
                    _ => {}
                }
            }
        }
        (leaf_parent, node_parent)
    }

    /// Interior nodes above each leaf, innermost first. Requires a valid tree.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let (leaf_parent, node_parent) = self.parents();
        leaf_parent
            .iter()
            .map(|&p| {
                let mut chain = Vec::new();
                let mut cur = p;
                while let Some(n) = cur {
                    if chain.len() > self.nodes.len() {
                        break;
                    }
                    chain.push(n);
                    cur = node_parent[n];
                }
                chain
            })
            .collect()
    }

    /// Leaf interval `[start, end)` covered by a child. Requires a valid tree.
    pub fn span(&self, child: Child) -> (usize, usize) {
        match child {
            Child::Leaf(l) => (l, l + 1),
            Child::Node(n) => {
                let children = &self.nodes[n].children;
                let first = children.first().map(|&c| self.span(c).0).unwrap_or(0);
                let last = children.last().map(|&c| self.span(c).1).unwrap_or(0);
                (first, last)
            }
        }
    }

    /// Every interior node with its span and label, in pre-order.
    pub fn constituents(&self) -> Vec<Constituent> {
        let mut out = Vec::new();
        for &child in &self.top {
            self.collect_constituents(child, 0, &mut out);
        }
        out
    }

    fn collect_constituents(&self, child: Child, depth: usize, out: &mut Vec<Constituent>) {
        if let Child::Node(n) = child {
            let (start, end) = self.span(child);
            out.push(Constituent {
                start,
                end,
                label: self.nodes[n].label.clone(),
                top_level: depth == 0,
            });
            for &c in &self.nodes[n].children {
                self.collect_constituents(c, depth + 1, out);
            }
        }
    }

    /// Spans of the top-level nodes.
    pub fn top_level_nodes(&self) -> Vec<usize> {
        self.top
            .iter()
            .filter_map(|c| match c {
                Child::Node(n) => Some(*n),
                Child::Leaf(_) => None,
            })
            .collect()
    }

    /// Unlabelled bracketing of a subtree, leaves shown by index. Two chunks
    /// over the same span have the same shape iff these strings are equal.
    pub fn shape(&self, child: Child) -> String {
        let mut s = String::new();
        self.write_shape(child, &mut s);
        s
    }

    fn write_shape(&self, child: Child, out: &mut String) {
        match child {
            Child::Leaf(l) => out.push_str(&l.to_string()),
            Child::Node(n) => {
                out.push('(');
                for (i, &c) in self.nodes[n].children.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    self.write_shape(c, out);
                }
                out.push(')');
            }
        }
    }

    /// A copy of one child as a tree of its own, leaves renumbered from 0.
    pub fn subtree(&self, child: Child) -> ChunkTree {
        fn rec(tree: &ChunkTree, c: Child, b: &mut TreeBuilder) {
            match c {
                Child::Leaf(l) => {
                    b.leaf(tree.leaves[l].clone());
                }
                Child::Node(n) => {
                    let node = &tree.nodes[n];
                    b.open_with_func(node.label.clone(), node.func.clone());
                    for &c in &node.children {
                        rec(tree, c, b);
                    }
                    b.close();
                }
            }
        }
        let mut b = TreeBuilder::new();
        rec(self, child, &mut b);
        b.finish()
    }

    /// Bracketed rendering of one sentence: `(CAT (POS word) ...)`.
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        for (i, &c) in self.top.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            self.write_bracketed(c, &mut out);
        }
        out
    }

    fn write_bracketed(&self, child: Child, out: &mut String) {
        match child {
            Child::Leaf(l) => {
                let leaf = &self.leaves[l];
                out.push('(');
                out.push_str(leaf.pos.as_str());
                if let Some(func) = &leaf.func {
                    out.push('-');
                    out.push_str(func);
                }
                if let Some(word) = &leaf.word {
                    out.push(' ');
                    out.push_str(&escape_word(word));
                }
                out.push(')');
            }
            Child::Node(n) => {
                let node = &self.nodes[n];
                out.push('(');
                out.push_str(node.label.as_str());
                if let Some(func) = &node.func {
                    out.push('-');
                    out.push_str(func);
                }
                for &c in &node.children {
                    out.push(' ');
                    self.write_bracketed(c, out);
                }
                out.push(')');
            }
        }
    }

    fn child_eq(&self, a: Child, other: &ChunkTree, b: Child) -> bool {
        match (a, b) {
            (Child::Leaf(x), Child::Leaf(y)) => {
                x == y && self.leaves.get(x) == other.leaves.get(y)
            }
            (Child::Node(x), Child::Node(y)) => {
                let (Some(nx), Some(ny)) = (self.nodes.get(x), other.nodes.get(y)) else {
                    return false;
                };
                nx.label == ny.label
                    && nx.func == ny.func
                    && nx.children.len() == ny.children.len()
                    && nx
                        .children
                        .iter()
                        .zip(&ny.children)
                        .all(|(&ca, &cb)| self.child_eq(ca, other, cb))
            }
            _ => false,
        }
    }
}

/// Structural equality: same leaves, same bracketing, same labels.
impl PartialEq for ChunkTree {
    fn eq(&self, other: &Self) -> bool {
        self.leaves == other.leaves
            && self.top.len() == other.top.len()
            && self
                .top
                .iter()
                .zip(&other.top)
                .all(|(&a, &b)| self.child_eq(a, other, b))
    }
}

impl Eq for ChunkTree {}

impl fmt::Display for ChunkTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracketed())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constituent {
    pub start: usize,
    pub end: usize,
    pub label: PhraseCat,
    pub top_level: bool,
}

pub(crate) fn escape_word(word: &str) -> String {
    word.replace('(', "-LRB-").replace(')', "-RRB-")
}

pub(crate) fn unescape_word(word: &str) -> String {
    word.replace("-LRB-", "(").replace("-RRB-", ")")
}

/// Builds a [`ChunkTree`] left to right, numbering nodes in pre-order.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    tree: ChunkTree,
    open: Vec<usize>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(&mut self, label: PhraseCat) -> &mut Self {
        self.open_with_func(label, None)
    }

    pub fn open_with_func(&mut self, label: PhraseCat, func: Option<String>) -> &mut Self {
        let id = self.tree.nodes.len();
        self.tree.nodes.push(Node {
            label,
            func,
            children: Vec::new(),
        });
        self.attach(Child::Node(id));
        self.open.push(id);
        self
    }

    pub fn leaf(&mut self, token: Token) -> &mut Self {
        let id = self.tree.leaves.len();
        self.tree.leaves.push(token);
        self.attach(Child::Leaf(id));
        self
    }

    pub fn close(&mut self) -> &mut Self {
        self.open.pop();
        self
    }

    pub fn depth(&self) -> usize {
        self.open.len()
    }

    fn attach(&mut self, child: Child) {
        match self.open.last() {
            Some(&n) => self.tree.nodes[n].children.push(child),
            None => self.tree.top.push(child),
        }
    }

    pub fn finish(self) -> ChunkTree {
        self.tree
    }
}
