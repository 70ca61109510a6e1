//! Columnar tag streams: `word TAB pos TAB rel TAB cat`, one token per line,
//! a blank line between sequences. Missing word forms are written as `_`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use crate::error::CorpusError;
use crate::treebank::{PosTag, StructuralTag, TagSequence};

pub const HEADER: &str = "#word\tpos\trel\tcat";

/// A tag sequence with the word forms it was read with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub words: Vec<Option<String>>,
    pub tags: TagSequence,
    /// Source line of each token (1-based); empty for in-memory data.
    pub lines: Vec<usize>,
}

impl TaggedSentence {
    pub fn new(words: Vec<Option<String>>, tags: TagSequence) -> Self {
        TaggedSentence {
            words,
            tags,
            lines: Vec::new(),
        }
    }

    pub fn unworded(tags: TagSequence) -> Self {
        TaggedSentence::new(vec![None; tags.len()], tags)
    }
}

fn field(word: &Option<String>) -> &str {
    match word.as_deref() {
        Some(w) if !w.is_empty() => w,
        _ => "_",
    }
}

pub fn write_columnar<W: Write>(out: &mut W, sentences: &[TaggedSentence]) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        for (k, tag) in s.tags.iter().enumerate() {
            let word = s.words.get(k).unwrap_or(&None);
            writeln!(out, "{}\t{}\t{}\t{}", field(word), tag.tag, tag.rel, tag.cat)?;
        }
    }
    Ok(())
}

/// Appends sentences to a columnar file, writing the header if the file is
/// new or empty. Existing content is never rewritten.
pub fn append_columnar(path: &Path, sentences: &[TaggedSentence]) -> Result<(), CorpusError> {
    let io = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let fresh = file.metadata().map_err(io)?.len() == 0;
    let mut buf = Vec::new();
    if fresh {
        write_columnar(&mut buf, sentences).map_err(io)?;
    } else {
        for s in sentences {
            writeln!(buf).map_err(io)?;
            for (k, tag) in s.tags.iter().enumerate() {
                let word = s.words.get(k).unwrap_or(&None);
                writeln!(buf, "{}\t{}\t{}\t{}", field(word), tag.tag, tag.rel, tag.cat).map_err(io)?;
            }
        }
    }
    file.write_all(&buf).map_err(io)
}

pub fn parse_columnar(text: &str) -> Result<Vec<TaggedSentence>, CorpusError> {
    let mut out = Vec::new();
    let mut cur = TaggedSentence::new(Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !cur.tags.is_empty() {
                out.push(std::mem::replace(&mut cur, TaggedSentence::new(Vec::new(), Vec::new())));
            }
            continue;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 4 {
            return Err(CorpusError::parse(line_no, format!("expected 4 columns, found {}", fields.len())));
        }
        let bad = |e: crate::error::SymbolError| CorpusError::parse(line_no, e.to_string());
        let tag = StructuralTag::new(
            fields[1].parse::<PosTag>().map_err(bad)?,
            fields[2].parse().map_err(bad)?,
            fields[3].parse().map_err(bad)?,
        );
        let word = match fields[0] {
            "_" | "" => None,
            w => Some(w.to_string()),
        };
        cur.words.push(word);
        cur.tags.push(tag);
        cur.lines.push(line_no);
    }
    if !cur.tags.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appending_keeps_earlier_sentences() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("saved.tsv");
        let one = TaggedSentence::new(
            vec![Some("der".into()), Some("Mann".into())],
            vec![StructuralTag::parse("ART/1/NP").unwrap(), StructuralTag::parse("NN/0/NP").unwrap()],
        );
        let two = TaggedSentence::unworded(vec![StructuralTag::parse("VVFIN/1/NONE").unwrap()]);
        append_columnar(&path, std::slice::from_ref(&one)).unwrap();
        let first = std::fs::read_to_string(&path).unwrap();
        append_columnar(&path, std::slice::from_ref(&two)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&first));
        let back = parse_columnar(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].tags, one.tags);
        assert_eq!(back[1].tags, two.tags);
        assert_eq!(text.matches(HEADER).count(), 1);
    }

    #[test]
    fn empty_list_writes_header_only() {
        let mut buf = Vec::new();
        write_columnar(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{HEADER}\n"));
        assert!(parse_columnar(&format!("{HEADER}\n")).unwrap().is_empty());
    }

    #[test]
    fn bad_rel_symbol_reports_line() {
        let text = format!("{HEADER}\nder\tART\t1\tNP\nMann\tNN\t≠\tNP\n");
        match parse_columnar(&text) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reads_two_sequences() {
        let text = "der\tART\t1\tNP\nMann\tNN\t0\tNP\n\n_\tVVFIN\t1\tNONE\n";
        let s = parse_columnar(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].words[1].as_deref(), Some("Mann"));
        assert_eq!(s[1].words[0], None);
        assert_eq!(s[1].lines, vec![4]);
    }
}
