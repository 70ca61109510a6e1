//! Treebank files, chunk extraction and cross-validation folds.

pub mod columnar;
pub mod folds;
pub mod plain;

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

pub use columnar::{append_columnar, parse_columnar, write_columnar, TaggedSentence};
pub use folds::{make_folds, FoldPlan};
pub use plain::{parse_pos_lines, PosSentence};

use crate::error::CorpusError;
use crate::treebank::{
    decode_with_words, encode_tree, parse_sentence, validate_tree, Child, ChunkTree, PhraseCat,
    ViolationKind,
};
use crate::vocab::Vocabulary;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// One sentence per line in bracketed notation.
    Bracketed,
    /// Structural tags, one token per line.
    Columnar,
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "brk" | "tree" | "trees" | "mrg" => Some(Format::Bracketed),
            "tsv" | "col" | "tags" | "conll" => Some(Format::Columnar),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bracketed" | "brk" => Ok(Format::Bracketed),
            "columnar" | "col" => Ok(Format::Columnar),
            other => Err(format!("unknown corpus format {other:?} (expected bracketed or columnar)")),
        }
    }
}

/// Sentences (or chunks) together with the vocabulary they were checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corpus {
    pub sentences: Vec<ChunkTree>,
    pub vocab: Vocabulary,
}

impl Corpus {
    pub fn new(sentences: Vec<ChunkTree>, vocab: Vocabulary) -> Self {
        Corpus { sentences, vocab }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Structural-tag view of every sentence, word forms included.
    pub fn tagged(&self) -> Result<Vec<TaggedSentence>, CorpusError> {
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let tags = encode_tree(t).map_err(|source| CorpusError::Tree { line: i + 1, source })?;
                Ok(TaggedSentence::new(t.leaves.iter().map(|l| l.word.clone()).collect(), tags))
            })
            .collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            sentences: indices.iter().map(|&i| self.sentences[i].clone()).collect(),
            vocab: self.vocab.clone(),
        }
    }
}

pub fn load_corpus(path: &Path, format: Format, vocab: &Vocabulary) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(&text, format, vocab)
}

pub fn read_corpus(text: &str, format: Format, vocab: &Vocabulary) -> Result<Corpus, CorpusError> {
    let sentences = match format {
        Format::Bracketed => read_bracketed(text, vocab)?,
        Format::Columnar => read_columnar_trees(text, vocab)?,
    };
    Ok(Corpus::new(sentences, vocab.clone()))
}

fn read_bracketed(text: &str, vocab: &Vocabulary) -> Result<Vec<ChunkTree>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tree = parse_sentence(line).map_err(|e| CorpusError::parse(line_no, e.to_string()))?;
        check_tree(&tree, line_no, vocab)?;
        out.push(tree);
    }
    Ok(out)
}

fn read_columnar_trees(text: &str, vocab: &Vocabulary) -> Result<Vec<ChunkTree>, CorpusError> {
    let mut out = Vec::new();
    for s in parse_columnar(text)? {
        for (k, tag) in s.tags.iter().enumerate() {
            check_symbols(vocab, s.lines[k], Some(&tag.tag), Some(&tag.cat))?;
        }
        let decoded = decode_with_words(&s.tags, &s.words);
        if let Some(r) = decoded.repairs.first() {
            return Err(CorpusError::parse(
                s.lines[r.position],
                format!("ill-formed structural tag sequence ({r})"),
            ));
        }
        check_tree(&decoded.tree, s.lines[0], vocab)?;
        out.push(decoded.tree);
    }
    Ok(out)
}

fn check_symbols(
    vocab: &Vocabulary,
    line: usize,
    tag: Option<&crate::treebank::PosTag>,
    cat: Option<&PhraseCat>,
) -> Result<(), CorpusError> {
    if let Some(t) = tag {
        if !vocab.knows_tag(t) {
            return Err(CorpusError::Undeclared {
                line,
                kind: "POS tag",
                symbol: t.to_string(),
            });
        }
    }
    if let Some(c) = cat {
        if !vocab.knows_cat(c) {
            return Err(CorpusError::Undeclared {
                line,
                kind: "phrase category",
                symbol: c.to_string(),
            });
        }
    }
    Ok(())
}

fn check_tree(tree: &ChunkTree, line: usize, vocab: &Vocabulary) -> Result<(), CorpusError> {
    for leaf in &tree.leaves {
        check_symbols(vocab, line, Some(&leaf.pos), None)?;
    }
    for node in &tree.nodes {
        check_symbols(vocab, line, None, Some(&node.label))?;
    }
    if let Some(v) = validate_tree(tree).first() {
        if v.kind == ViolationKind::TooDeep {
            // report through the codec for the depth in the message
            if let Err(source) = encode_tree(tree) {
                return Err(CorpusError::Tree { line, source });
            }
        }
        return Err(CorpusError::parse(line, format!("invalid tree: {v}")));
    }
    Ok(())
}

pub fn write_corpus(corpus: &Corpus, path: &Path, format: Format) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    write_corpus_to(corpus, &mut out, format).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn write_corpus_to<W: Write>(corpus: &Corpus, out: &mut W, format: Format) -> std::io::Result<()> {
    match format {
        Format::Bracketed => {
            for t in &corpus.sentences {
                writeln!(out, "{}", t.to_bracketed())?;
            }
            Ok(())
        }
        Format::Columnar => {
            let tagged = corpus
                .tagged()
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()))?;
            write_columnar(out, &tagged)
        }
    }
}

/// Writes tag sequences (with optional words) in the columnar format.
pub fn write_tagged(sentences: &[TaggedSentence], path: &Path) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err)?);
    write_columnar(&mut out, sentences).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn read_tagged(path: &Path) -> Result<Vec<TaggedSentence>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_columnar(&text)
}

/// Default chunk categories: noun, prepositional and adjective phrases plus
/// multi-token numerals standing in for complex adverbials.
pub fn default_chunk_categories() -> BTreeSet<PhraseCat> {
    ["NP", "PP", "AP", "NM"]
        .into_iter()
        .map(|c| PhraseCat::label(c).expect("valid label"))
        .collect()
}

/// One tree per maximal node whose label is in `categories`, in sentence
/// order. Tokens outside such nodes are dropped.
pub fn extract_chunks(corpus: &Corpus, categories: &BTreeSet<PhraseCat>) -> Corpus {
    let mut chunks = Vec::new();
    for tree in &corpus.sentences {
        for &c in &tree.top {
            collect_maximal(tree, c, categories, &mut chunks);
        }
    }
    Corpus::new(chunks, corpus.vocab.clone())
}

fn collect_maximal(tree: &ChunkTree, child: Child, categories: &BTreeSet<PhraseCat>, out: &mut Vec<ChunkTree>) {
    let Child::Node(n) = child else { return };
    if categories.contains(&tree.nodes[n].label) {
        out.push(tree.subtree(child));
    } else {
        for &c in &tree.nodes[n].children {
            collect_maximal(tree, c, categories, out);
        }
    }
}
