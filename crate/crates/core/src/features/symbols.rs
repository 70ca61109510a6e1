use std::collections::HashMap;

use crate::treebank::{PhraseCat, PosTag, StructuralTag};

/// Code of the sentence-start sentinel, for every attribute.
pub const BOUNDARY: u32 = u32::MAX;
/// Code of a tag or category never seen in training.
pub const UNKNOWN: u32 = u32::MAX - 1;

/// A structural tag (or the boundary sentinel) as three integer codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TagCode {
    pub rel: u32,
    pub tag: u32,
    pub cat: u32,
}

impl TagCode {
    pub const BOUNDARY: TagCode = TagCode {
        rel: BOUNDARY,
        tag: BOUNDARY,
        cat: BOUNDARY,
    };

    pub fn sibl(&self) -> u32 {
        match self.rel {
            BOUNDARY => BOUNDARY,
            0 => 1,
            _ => 0,
        }
    }
}

/// Interns POS tags and categories seen in training.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    tags: HashMap<PosTag, u32>,
    cats: HashMap<PhraseCat, u32>,
}

impl SymbolTable {
    pub fn from_tags<'a>(tags: impl IntoIterator<Item = &'a StructuralTag>) -> Self {
        let mut t = SymbolTable::default();
        for s in tags {
            t.intern(s);
        }
        t
    }

    pub fn intern(&mut self, s: &StructuralTag) -> TagCode {
        TagCode {
            rel: s.rel.index() as u32,
            tag: self.intern_tag(&s.tag),
            cat: self.intern_cat(&s.cat),
        }
    }

    pub fn intern_tag(&mut self, t: &PosTag) -> u32 {
        let next = self.tags.len() as u32;
        *self.tags.entry(t.clone()).or_insert(next)
    }

    pub fn intern_cat(&mut self, c: &PhraseCat) -> u32 {
        let next = self.cats.len() as u32;
        *self.cats.entry(c.clone()).or_insert(next)
    }

    /// `None` stands for the boundary sentinel.
    pub fn code(&self, s: Option<&StructuralTag>) -> TagCode {
        match s {
            None => TagCode::BOUNDARY,
            Some(s) => TagCode {
                rel: s.rel.index() as u32,
                tag: self.tags.get(&s.tag).copied().unwrap_or(UNKNOWN),
                cat: self.cats.get(&s.cat).copied().unwrap_or(UNKNOWN),
            },
        }
    }

    pub fn tag_code(&self, t: &PosTag) -> u32 {
        self.tags.get(t).copied().unwrap_or(UNKNOWN)
    }

    pub fn cat_code(&self, c: &PhraseCat) -> u32 {
        self.cats.get(c).copied().unwrap_or(UNKNOWN)
    }
}
