use std::collections::HashMap;

use crate::error::ModelError;
use crate::inventory::TagInventory;
use crate::treebank::StructuralTag;

/// One observed (history, future) pair with its count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub history: u32,
    pub future: u32,
    pub count: u64,
}

/// Training contexts grouped by history. Histories are pairs of inventory
/// indices, `None` being the sentence-start sentinel.
#[derive(Clone, Debug)]
pub struct EventSpace {
    pub futures: TagInventory,
    pub histories: Vec<[Option<u32>; 2]>,
    pub history_counts: Vec<u64>,
    pub events: Vec<Event>,
}

impl EventSpace {
    pub fn from_sequences(seqs: &[Vec<StructuralTag>]) -> Result<Self, ModelError> {
        if seqs.iter().all(Vec::is_empty) {
            return Err(ModelError::EmptyTraining);
        }
        let futures = TagInventory::from_sequences(seqs);
        let mut hist_ix: HashMap<[Option<u32>; 2], u32> = HashMap::new();
        let mut event_ix: HashMap<(u32, u32), usize> = HashMap::new();
        let mut space = EventSpace {
            futures,
            histories: Vec::new(),
            history_counts: Vec::new(),
            events: Vec::new(),
        };
        for seq in seqs {
            let codes: Vec<u32> = seq
                .iter()
                .map(|s| space.futures.index_of(s).expect("inventory built from these sequences") as u32)
                .collect();
            for i in 0..codes.len() {
                let key = [i.checked_sub(2).map(|k| codes[k]), i.checked_sub(1).map(|k| codes[k])];
                let h = *hist_ix.entry(key).or_insert_with(|| {
                    space.histories.push(key);
                    space.history_counts.push(0);
                    (space.histories.len() - 1) as u32
                });
                space.history_counts[h as usize] += 1;
                let e = *event_ix.entry((h, codes[i])).or_insert_with(|| {
                    space.events.push(Event {
                        history: h,
                        future: codes[i],
                        count: 0,
                    });
                    space.events.len() - 1
                });
                space.events[e].count += 1;
            }
        }
        Ok(space)
    }

    /// Number of training contexts.
    pub fn total(&self) -> u64 {
        self.history_counts.iter().sum()
    }

    pub fn history_tags(&self, h: usize) -> [Option<&StructuralTag>; 2] {
        self.histories[h].map(|x| x.map(|i| self.futures.get(i as usize)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_add_up() {
        let seq: Vec<StructuralTag> = ["ART/1/NP", "NN/0/NP", "APPR/1/PP", "NN/0/PP"]
            .map(|s| StructuralTag::parse(s).unwrap())
            .to_vec();
        let ev = EventSpace::from_sequences(&[seq.clone(), seq]).unwrap();
        assert_eq!(ev.total(), 8);
        assert_eq!(ev.events.iter().map(|e| e.count).sum::<u64>(), 8);
        assert_eq!(ev.histories.len(), 4);
        assert!(ev.events.iter().all(|e| e.count == 2));
        assert!(matches!(EventSpace::from_sequences(&[vec![]]), Err(ModelError::EmptyTraining)));
    }
}
