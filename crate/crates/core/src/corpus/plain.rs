//! Parser input: one sequence per line, tokens written `word/POS` or `POS`.

use crate::error::CorpusError;
use crate::treebank::PosTag;
use crate::vocab::Vocabulary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosSentence {
    pub words: Vec<Option<String>>,
    pub tags: Vec<PosTag>,
}

/// Input line and tag of a token outside the vocabulary.
pub type UnknownTag = (usize, PosTag);

/// Reads POS input; tags outside `vocab` are returned as-is and listed in
/// the second element as `(line, tag)` so callers can flag them.
pub fn parse_pos_lines(text: &str, vocab: &Vocabulary) -> Result<(Vec<PosSentence>, Vec<UnknownTag>), CorpusError> {
    let mut out = Vec::new();
    let mut unknown = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut s = PosSentence {
            words: Vec::new(),
            tags: Vec::new(),
        };
        for token in line.split_whitespace() {
            let (word, tag) = match token.rfind('/') {
                Some(k) if k > 0 && k + 1 < token.len() => (Some(token[..k].to_string()), &token[k + 1..]),
                _ => (None, token),
            };
            let tag = PosTag::new(tag).map_err(|e| CorpusError::parse(i + 1, e.to_string()))?;
            if !vocab.knows_tag(&tag) {
                unknown.push((i + 1, tag.clone()));
            }
            s.words.push(word);
            s.tags.push(tag);
        }
        out.push(s);
    }
    Ok((out, unknown))
}
