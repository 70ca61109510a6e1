use std::fmt;
use std::str::FromStr;

use crate::error::SymbolError;

/// A part-of-speech tag such as `ART` or `NN`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosTag(String);

impl PosTag {
    pub fn new(symbol: impl Into<String>) -> Result<Self, SymbolError> {
        let symbol = symbol.into();
        if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
            return Err(SymbolError::InvalidPos(symbol));
        }
        Ok(PosTag(symbol))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PosTag {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PosTag::new(s)
    }
}

/// Phrasal category of a token's parent. The reserved symbol `NONE` marks
/// tokens attached directly to the virtual root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhraseCat(String);

impl PhraseCat {
    pub const NONE_SYMBOL: &'static str = "NONE";

    pub fn new(symbol: impl Into<String>) -> Result<Self, SymbolError> {
        let symbol = symbol.into();
        if symbol.is_empty() || symbol.chars().any(char::is_whitespace) {
            return Err(SymbolError::InvalidCat(symbol));
        }
        Ok(PhraseCat(symbol))
    }

    /// A category usable as a node label; rejects `NONE`.
    pub fn label(symbol: impl Into<String>) -> Result<Self, SymbolError> {
        let cat = PhraseCat::new(symbol)?;
        if cat.is_none() {
            return Err(SymbolError::NoneAsLabel);
        }
        Ok(cat)
    }

    pub fn none() -> Self {
        PhraseCat(Self::NONE_SYMBOL.to_string())
    }

    pub fn is_none(&self) -> bool {
        self.0 == Self::NONE_SYMBOL
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PhraseCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for PhraseCat {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PhraseCat::new(s)
    }
}

/// How a token's parent chain relates to its predecessor's.
///
/// Declaration order is the precedence order used by the encoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelValue {
    /// Same parent.
    Sibling,
    /// Parent is the predecessor's grandparent (one node closed).
    Close1,
    /// Parent is the predecessor's great-grandparent (two nodes closed).
    Close2,
    /// Grandparent is the predecessor's parent (one node opened).
    Open1,
    /// Great-grandparent is the predecessor's parent (two nodes opened).
    Open2,
    /// Shared grandparent: one node closed, one opened.
    CloseOpen,
    /// No local relation.
    Other,
}

impl RelValue {
    pub const ALL: [RelValue; 7] = [
        RelValue::Sibling,
        RelValue::Close1,
        RelValue::Close2,
        RelValue::Open1,
        RelValue::Open2,
        RelValue::CloseOpen,
        RelValue::Other,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            RelValue::Sibling => "0",
            RelValue::Close1 => "+",
            RelValue::Close2 => "++",
            RelValue::Open1 => "-",
            RelValue::Open2 => "--",
            RelValue::CloseOpen => "=",
            RelValue::Other => "1",
        }
    }

    /// Position in the precedence list, also used as a compact code.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<RelValue> {
        RelValue::ALL.get(i as usize).copied()
    }

    /// Number of open nodes closed and opened between predecessor and token,
    /// for every value except [`RelValue::Other`].
    pub fn moves(self) -> Option<(usize, usize)> {
        match self {
            RelValue::Sibling => Some((0, 0)),
            RelValue::Close1 => Some((1, 0)),
            RelValue::Close2 => Some((2, 0)),
            RelValue::Open1 => Some((0, 1)),
            RelValue::Open2 => Some((0, 2)),
            RelValue::CloseOpen => Some((1, 1)),
            RelValue::Other => None,
        }
    }

    pub fn from_moves(closed: usize, opened: usize) -> Option<RelValue> {
        RelValue::ALL
            .into_iter()
            .find(|r| r.moves() == Some((closed, opened)))
    }
}

impl fmt::Display for RelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for RelValue {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelValue::ALL
            .into_iter()
            .find(|r| r.symbol() == s)
            .ok_or_else(|| SymbolError::InvalidRel(s.to_string()))
    }
}

/// The triple of POS tag, structural relation and parent category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuralTag {
    pub tag: PosTag,
    pub rel: RelValue,
    pub cat: PhraseCat,
}

impl StructuralTag {
    pub fn new(tag: PosTag, rel: RelValue, cat: PhraseCat) -> Self {
        StructuralTag { tag, rel, cat }
    }

    /// Parses `TAG/REL/CAT`, e.g. `ART/1/NP`.
    pub fn parse(s: &str) -> Result<Self, SymbolError> {
        let mut parts = s.splitn(3, '/');
        let (Some(tag), Some(rel), Some(cat)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(SymbolError::InvalidTriple(s.to_string()));
        };
        Ok(StructuralTag {
            tag: tag.parse()?,
            rel: rel.parse()?,
            cat: cat.parse()?,
        })
    }

    /// Chunk-initial or out-of-chunk tokens carry `rel = 1`.
    pub fn is_outside(&self) -> bool {
        self.rel == RelValue::Other && self.cat.is_none()
    }
}

impl fmt::Display for StructuralTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.tag, self.rel, self.cat)
    }
}

/// One structural tag per token of a sentence or chunk.
pub type TagSequence = Vec<StructuralTag>;

/// Projects a tag sequence onto its POS tags.
pub fn pos_projection(seq: &[StructuralTag]) -> Vec<PosTag> {
    seq.iter().map(|s| s.tag.clone()).collect()
}
