use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::FoldError;

/// Assignment of sentences to cross-validation folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: usize,
    pub seed: u64,
    /// Fold of each sentence, by sentence index.
    pub assignments: Vec<usize>,
    /// Seeded permutation the folds were dealt from.
    pub order: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.order.iter().copied().filter(|&i| self.assignments[i] == fold).collect()
    }

    /// Training sentences for `fold`, in shuffled order so that prefixes are
    /// random subsamples.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.order.iter().copied().filter(|&i| self.assignments[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.folds];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Deals a seeded permutation of `sentences` indices round-robin into `k` folds.
pub fn make_folds(sentences: usize, k: usize, seed: u64) -> Result<FoldPlan, FoldError> {
    if k < 2 {
        return Err(FoldError::TooFewFolds(k));
    }
    if k > sentences {
        return Err(FoldError::TooManyFolds { folds: k, sentences });
    }
    let mut order: Vec<usize> = (0..sentences).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; sentences];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        folds: k,
        seed,
        assignments,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_sentences_ten_folds() {
        let plan = make_folds(10, 10, 3).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1; 10]);
    }

    #[test]
    fn full_corpus_size() {
        let plan = make_folds(12_000, 10, 7).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1_200; 10]);
        assert_eq!(plan.train_indices(0).len(), 10_800);
    }

    #[test]
    fn deterministic_and_balanced() {
        assert_eq!(make_folds(103, 10, 5).unwrap(), make_folds(103, 10, 5).unwrap());
        assert_ne!(make_folds(103, 10, 5).unwrap().order, make_folds(103, 10, 6).unwrap().order);
        for s in make_folds(103, 10, 5).unwrap().fold_sizes() {
            assert!(s == 10 || s == 11);
        }
    }

    #[test]
    fn partition() {
        let plan = make_folds(57, 4, 1).unwrap();
        let mut seen = vec![0; 57];
        for f in 0..4 {
            for i in plan.test_indices(f) {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn errors() {
        assert_eq!(make_folds(5, 1, 0), Err(FoldError::TooFewFolds(1)));
        assert_eq!(make_folds(5, 6, 0), Err(FoldError::TooManyFolds { folds: 6, sentences: 5 }));
    }
}
