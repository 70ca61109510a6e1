//! Conditional maximum-entropy model over structural-tag trigram contexts.

mod events;
mod iis;
mod io;

pub use events::{Event, EventSpace};
pub use iis::{solve_update, train_iis, IisConfig};
pub use io::{load_model, model_from_text, model_to_text, save_model, MAXENT_MAGIC, MAXENT_VERSION};

use crate::error::ModelError;
use crate::features::{FeatureSet, TagCode};
use crate::inventory::TagInventory;
use crate::treebank::StructuralTag;

/// What training did.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingMeta {
    pub iterations: usize,
    pub converged: bool,
    pub cutoff: usize,
    pub prior_variance: Option<f64>,
    /// Conditional log-likelihood of the training data before the first
    /// iteration and after each one.
    pub log_likelihood: Vec<f64>,
    /// Updates that hit the step bound.
    pub clamped_updates: usize,
}

#[derive(Clone, Debug)]
pub struct MaxentModel {
    features: FeatureSet,
    futures: TagInventory,
    future_codes: Vec<TagCode>,
    meta: TrainingMeta,
}

impl MaxentModel {
    pub fn new(features: FeatureSet, futures: TagInventory, meta: TrainingMeta) -> Self {
        let future_codes = futures.tags().iter().map(|s| features.symbols().code(Some(s))).collect();
        MaxentModel {
            features,
            futures,
            future_codes,
            meta,
        }
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn futures(&self) -> &TagInventory {
        &self.futures
    }

    pub fn meta(&self) -> &TrainingMeta {
        &self.meta
    }

    pub(crate) fn future_codes(&self) -> &[TagCode] {
        &self.future_codes
    }

    /// Sum of active weights for every future, in inventory order.
    pub fn scores(&self, prev2: Option<&StructuralTag>, prev1: Option<&StructuralTag>) -> Vec<f64> {
        let sym = self.features.symbols();
        self.scores_for_codes(sym.code(prev2), sym.code(prev1))
    }

    pub(crate) fn scores_for_codes(&self, h2: TagCode, h1: TagCode) -> Vec<f64> {
        let inst = self.features.instances();
        let mut active = Vec::new();
        self.future_codes
            .iter()
            .map(|&y| {
                active.clear();
                self.features.active_codes(&[h2, h1, y], &mut active);
                active.iter().map(|&f| inst[f as usize].weight).sum()
            })
            .collect()
    }

    /// p(y | history) for every future.
    pub fn distribution(&self, prev2: Option<&StructuralTag>, prev1: Option<&StructuralTag>) -> Vec<f64> {
        normalize(&self.scores(prev2, prev1))
    }

    /// log p(y | history) for every future.
    pub fn log_distribution(&self, prev2: Option<&StructuralTag>, prev1: Option<&StructuralTag>) -> Vec<f64> {
        log_normalize(&self.scores(prev2, prev1))
    }

    pub fn conditional_prob(
        &self,
        prev2: Option<&StructuralTag>,
        prev1: Option<&StructuralTag>,
        future: &StructuralTag,
    ) -> Result<f64, ModelError> {
        let y = self
            .futures
            .index_of(future)
            .ok_or_else(|| ModelError::UndefinedFuture(future.to_string()))?;
        Ok(self.distribution(prev2, prev1)[y])
    }
}

fn max_of(scores: &[f64]) -> f64 {
    scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn normalize(scores: &[f64]) -> Vec<f64> {
    let m = max_of(scores);
    let e: Vec<f64> = scores.iter().map(|s| (s - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

pub(crate) fn log_normalize(scores: &[f64]) -> Vec<f64> {
    let m = max_of(scores);
    let z: f64 = scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln() + m;
    scores.iter().map(|s| s - z).collect()
}

/// Empirical expectation of every feature, Σ p̃(x,y) f(x,y).
pub fn empirical_expectations(features: &FeatureSet, events: &EventSpace) -> Vec<f64> {
    let mut out = vec![0.0; features.len()];
    let n = events.total() as f64;
    let sym = features.symbols();
    let mut active = Vec::new();
    for e in &events.events {
        let [h2, h1] = events.history_tags(e.history as usize);
        let y = events.futures.get(e.future as usize);
        active.clear();
        features.active_codes(&[sym.code(h2), sym.code(h1), sym.code(Some(y))], &mut active);
        for &f in &active {
            out[f as usize] += e.count as f64 / n;
        }
    }
    out
}

/// Model expectation of every feature, Σ_x p̃(x) Σ_y p(y|x) f(x,y), with
/// y ranging over the model's futures.
pub fn expected_counts(model: &MaxentModel, events: &EventSpace) -> Vec<f64> {
    let mut out = vec![0.0; model.features.len()];
    let n = events.total() as f64;
    let sym = model.features.symbols();
    let mut active = Vec::new();
    for (h, &count) in events.history_counts.iter().enumerate() {
        let [h2, h1] = events.history_tags(h);
        let (c2, c1) = (sym.code(h2), sym.code(h1));
        let p = normalize(&model.scores_for_codes(c2, c1));
        for (y, &code) in model.future_codes.iter().enumerate() {
            active.clear();
            model.features.active_codes(&[c2, c1, code], &mut active);
            for &f in &active {
                out[f as usize] += count as f64 / n * p[y];
            }
        }
    }
    out
}

/// Largest |model − empirical| feature expectation.
pub fn max_residual(model: &MaxentModel, events: &EventSpace) -> f64 {
    let emp = empirical_expectations(&model.features, events);
    expected_counts(model, events)
        .iter()
        .zip(&emp)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Conditional log-likelihood of the events under the model.
pub fn log_likelihood(model: &MaxentModel, events: &EventSpace) -> f64 {
    let sym = model.features.symbols();
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; events.histories.len()];
    let mut ll = 0.0;
    for e in &events.events {
        let lp = cache[e.history as usize].get_or_insert_with(|| {
            let [h2, h1] = events.history_tags(e.history as usize);
            log_normalize(&model.scores_for_codes(sym.code(h2), sym.code(h1)))
        });
        ll += e.count as f64 * lp[e.future as usize];
    }
    ll
}
