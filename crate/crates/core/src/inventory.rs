//! The set of structural tags seen in training, grouped by POS tag.

use std::collections::HashMap;

use crate::treebank::{PhraseCat, PosTag, RelValue, StructuralTag};

/// Futures of a model, sorted by POS tag, then REL symbol, then category.
/// Within one POS tag this is the decoder's tie-break order.
#[derive(Clone, Debug, Default)]
pub struct TagInventory {
    tags: Vec<StructuralTag>,
    index: HashMap<StructuralTag, usize>,
    by_pos: HashMap<PosTag, Vec<usize>>,
}

fn sort_key(s: &StructuralTag) -> (&str, &str, &str) {
    (s.tag.as_str(), s.rel.symbol(), s.cat.as_str())
}

impl TagInventory {
    pub fn new(tags: impl IntoIterator<Item = StructuralTag>) -> Self {
        let mut tags: Vec<StructuralTag> = tags.into_iter().collect();
        tags.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
        tags.dedup();
        let mut index = HashMap::with_capacity(tags.len());
        let mut by_pos: HashMap<PosTag, Vec<usize>> = HashMap::new();
        for (i, t) in tags.iter().enumerate() {
            index.insert(t.clone(), i);
            by_pos.entry(t.tag.clone()).or_default().push(i);
        }
        TagInventory { tags, index, by_pos }
    }

    pub fn from_sequences(seqs: &[Vec<StructuralTag>]) -> Self {
        TagInventory::new(seqs.iter().flatten().cloned())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[StructuralTag] {
        &self.tags
    }

    pub fn get(&self, i: usize) -> &StructuralTag {
        &self.tags[i]
    }

    pub fn index_of(&self, s: &StructuralTag) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Indices of every future emitting `pos`, in tie-break order.
    pub fn with_pos(&self, pos: &PosTag) -> &[usize] {
        self.by_pos.get(pos).map_or(&[], Vec::as_slice)
    }

    /// Candidate states for `pos`: the inventory entries emitting it, or
    /// the single fallback `pos/1/NONE` if there are none.
    pub fn candidates(&self, pos: &PosTag) -> Vec<StructuralTag> {
        match self.by_pos.get(pos) {
            Some(ix) => ix.iter().map(|&i| self.tags[i].clone()).collect(),
            None => vec![StructuralTag::new(pos.clone(), RelValue::Other, PhraseCat::none())],
        }
    }

    /// Distinct POS tags, sorted.
    pub fn pos_tags(&self) -> Vec<PosTag> {
        let mut v: Vec<PosTag> = self.by_pos.keys().cloned().collect();
        v.sort();
        v
    }

    /// Distinct categories other than `NONE`, sorted.
    pub fn labels(&self) -> Vec<PhraseCat> {
        let mut v: Vec<PhraseCat> = self.tags.iter().map(|t| t.cat.clone()).filter(|c| !c.is_none()).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> StructuralTag {
        StructuralTag::parse(s).unwrap()
    }

    #[test]
    fn grouping_and_fallback() {
        let inv = TagInventory::new(
            ["NN/0/NP", "NN/1/NP", "NN/0/PP", "NN/-/NP", "ART/1/NP", "NN/0/NP"].map(st),
        );
        assert_eq!(inv.len(), 5);
        let nn = inv.candidates(&PosTag::new("NN").unwrap());
        let got: Vec<String> = nn.iter().map(ToString::to_string).collect();
        assert_eq!(got, ["NN/-/NP", "NN/0/NP", "NN/0/PP", "NN/1/NP"]);
        assert!(nn.iter().all(|s| s.tag.as_str() == "NN"));
        assert_eq!(inv.candidates(&PosTag::new("FOO").unwrap()), vec![st("FOO/1/NONE")]);
        assert_eq!(inv.labels().len(), 2);
    }
}
