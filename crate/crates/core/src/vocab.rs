//! Declared tag and label inventories.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::CorpusError;
use crate::treebank::{PhraseCat, PosTag};

const DEFAULT_TAGS: &str = include_str!("../data/stts.tags");
const DEFAULT_LABELS: &str = include_str!("../data/negra.labels");

/// Sets of POS tags and phrase labels a corpus may use. `None` accepts any
/// symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub tags: Option<BTreeSet<PosTag>>,
    pub labels: Option<BTreeSet<PhraseCat>>,
}

impl Vocabulary {
    /// The shipped STTS subset and NeGra phrase labels.
    pub fn standard() -> Self {
        Vocabulary {
            tags: Some(parse_list(DEFAULT_TAGS, |s| PosTag::new(s).ok()).expect("bundled tag list")),
            labels: Some(parse_list(DEFAULT_LABELS, |s| PhraseCat::label(s).ok()).expect("bundled label list")),
        }
    }

    pub fn permissive() -> Self {
        Vocabulary::default()
    }

    pub fn from_files(tags: Option<&Path>, labels: Option<&Path>) -> Result<Self, CorpusError> {
        let standard = Vocabulary::standard();
        let tags = match tags {
            Some(p) => Some(read_list(p, |s| PosTag::new(s).ok())?),
            None => standard.tags,
        };
        let labels = match labels {
            Some(p) => Some(read_list(p, |s| PhraseCat::label(s).ok())?),
            None => standard.labels,
        };
        Ok(Vocabulary { tags, labels })
    }

    pub fn knows_tag(&self, tag: &PosTag) -> bool {
        self.tags.as_ref().is_none_or(|t| t.contains(tag))
    }

    /// `NONE` is always accepted as a structural-tag category.
    pub fn knows_cat(&self, cat: &PhraseCat) -> bool {
        cat.is_none() || self.labels.as_ref().is_none_or(|l| l.contains(cat))
    }
}

fn read_list<T: Ord>(path: &Path, parse: impl Fn(&str) -> Option<T>) -> Result<BTreeSet<T>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_list(&text, parse)
}

/// One symbol per line, optional description after whitespace, `#` comments.
pub fn parse_list<T: Ord>(text: &str, parse: impl Fn(&str) -> Option<T>) -> Result<BTreeSet<T>, CorpusError> {
    let mut out = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let symbol = line.split_whitespace().next().unwrap_or_default();
        let value = parse(symbol).ok_or_else(|| CorpusError::parse(i + 1, format!("invalid symbol {symbol:?}")))?;
        out.insert(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_lists_cover_the_documented_symbols() {
        let v = Vocabulary::standard();
        for t in ["ADJA", "ADV", "APPR", "APPRART", "ART", "CARD", "KON", "NE", "NN", "PROAV", "TRUNC", "VAFIN", "VAINF", "VMFIN", "VVFIN", "VVPP"] {
            assert!(v.knows_tag(&PosTag::new(t).unwrap()), "{t}");
        }
        for c in ["AP", "MPN", "NM", "NP", "PP", "S", "VP"] {
            assert!(v.knows_cat(&PhraseCat::label(c).unwrap()), "{c}");
        }
        assert!(!v.knows_tag(&PosTag::new("XYZ").unwrap()));
        assert!(v.knows_cat(&PhraseCat::none()));
    }

    #[test]
    fn permissive_accepts_anything() {
        let v = Vocabulary::permissive();
        assert!(v.knows_tag(&PosTag::new("XYZ").unwrap()));
        assert!(v.knows_cat(&PhraseCat::label("QQ").unwrap()));
    }
}
