//! Contextual probability sources behind one interface, looked up by name.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use parking_lot::RwLock;

use crate::error::ModelError;
use crate::features::{default_patterns, extract_features, FeaturePattern};
use crate::inventory::TagInventory;
use crate::maxent::{self, train_iis, EventSpace, IisConfig, MaxentModel};
use crate::modelio::magic_of;
use crate::ngram::{Gram, NgramModel, NGRAM_MAGIC};
use crate::treebank::StructuralTag;

/// A history slot as seen by a source.
#[derive(Clone, Copy, Debug)]
pub enum History<'a> {
    Boundary,
    /// Index into the source's future inventory.
    Known(usize),
    /// A tag outside the inventory.
    Other(&'a StructuralTag),
}

impl<'a> History<'a> {
    pub fn of(inventory: &TagInventory, s: Option<&'a StructuralTag>) -> Self {
        match s {
            None => History::Boundary,
            Some(s) => inventory.index_of(s).map_or(History::Other(s), History::Known),
        }
    }

    fn key(&self) -> Option<u32> {
        match self {
            History::Boundary => Some(u32::MAX),
            History::Known(i) => Some(*i as u32),
            History::Other(_) => None,
        }
    }

    fn tag<'b>(&self, inventory: &'b TagInventory) -> Option<&'b StructuralTag>
    where
        'a: 'b,
    {
        match *self {
            History::Boundary => None,
            History::Known(i) => Some(inventory.get(i)),
            History::Other(s) => Some(s),
        }
    }
}

/// Summary of a loaded model.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceInfo {
    pub kind: String,
    pub futures: usize,
    pub tags: Vec<String>,
    pub labels: Vec<String>,
    pub features: Option<usize>,
    pub iterations: Option<usize>,
    pub log_likelihood: Vec<f64>,
    pub lambdas: Option<[f64; 3]>,
}

pub trait ProbSource: Send + Sync {
    /// Registry name.
    fn kind(&self) -> &'static str;
    fn futures(&self) -> &TagInventory;
    /// log p(y | h2, h1) for every future, in inventory order.
    fn log_probs(&self, h2: History, h1: History) -> Arc<[f64]>;
    fn info(&self) -> SourceInfo;
    /// Serialized model file.
    fn to_text(&self) -> String;
}

/// Memoizes distributions of inventory histories.
#[derive(Debug, Default)]
struct Cache(RwLock<HashMap<(u32, u32), Row>>);

type Row = Arc<[f64]>;

impl Cache {
    fn get_or(&self, h2: History, h1: History, compute: impl FnOnce() -> Vec<f64>) -> Arc<[f64]> {
        let (Some(k2), Some(k1)) = (h2.key(), h1.key()) else {
            return compute().into();
        };
        if let Some(v) = self.0.read().get(&(k2, k1)) {
            return v.clone();
        }
        let v: Arc<[f64]> = compute().into();
        self.0.write().entry((k2, k1)).or_insert(v).clone()
    }
}

fn base_info(kind: &str, futures: &TagInventory) -> SourceInfo {
    SourceInfo {
        kind: kind.to_string(),
        futures: futures.len(),
        tags: futures.pos_tags().iter().map(ToString::to_string).collect(),
        labels: futures.labels().iter().map(ToString::to_string).collect(),
        features: None,
        iterations: None,
        log_likelihood: Vec::new(),
        lambdas: None,
    }
}

#[derive(Debug)]
pub struct MaxentSource {
    model: MaxentModel,
    cache: Cache,
}

impl MaxentSource {
    pub fn new(model: MaxentModel) -> Self {
        MaxentSource {
            model,
            cache: Cache::default(),
        }
    }

    pub fn model(&self) -> &MaxentModel {
        &self.model
    }
}

impl ProbSource for MaxentSource {
    fn kind(&self) -> &'static str {
        "maxent"
    }

    fn futures(&self) -> &TagInventory {
        self.model.futures()
    }

    fn log_probs(&self, h2: History, h1: History) -> Arc<[f64]> {
        self.cache.get_or(h2, h1, || {
            let inv = self.model.futures();
            self.model.log_distribution(h2.tag(inv), h1.tag(inv))
        })
    }

    fn info(&self) -> SourceInfo {
        let meta = self.model.meta();
        SourceInfo {
            features: Some(self.model.features().len()),
            iterations: Some(meta.iterations),
            log_likelihood: meta.log_likelihood.clone(),
            ..base_info(self.kind(), self.futures())
        }
    }

    fn to_text(&self) -> String {
        maxent::model_to_text(&self.model)
    }
}

#[derive(Debug)]
pub struct InterpolationSource {
    model: NgramModel,
    cache: Cache,
}

impl InterpolationSource {
    pub fn new(model: NgramModel) -> Self {
        InterpolationSource {
            model,
            cache: Cache::default(),
        }
    }

    pub fn model(&self) -> &NgramModel {
        &self.model
    }
}

impl ProbSource for InterpolationSource {
    fn kind(&self) -> &'static str {
        "interpolation"
    }

    fn futures(&self) -> &TagInventory {
        self.model.table.futures()
    }

    fn log_probs(&self, h2: History, h1: History) -> Arc<[f64]> {
        self.cache.get_or(h2, h1, || {
            let gram = |h: History| match h {
                History::Boundary => Gram::Boundary,
                History::Known(i) => Gram::Tag(i as u32),
                History::Other(s) => self.model.table.gram(Some(s)),
            };
            let p = self.model.distribution_for(gram(h2), gram(h1));
            p.into_iter().map(f64::ln).collect()
        })
    }

    fn info(&self) -> SourceInfo {
        let w = self.model.weights;
        SourceInfo {
            lambdas: Some([w.l1, w.l2, w.l3]),
            ..base_info(self.kind(), self.futures())
        }
    }

    fn to_text(&self) -> String {
        self.model.to_text()
    }
}

/// Settings shared by all trainers; each uses what applies to it.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub patterns: Vec<FeaturePattern>,
    pub cutoff: usize,
    pub iis: IisConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            patterns: default_patterns(),
            cutoff: 1,
            iis: IisConfig::default(),
        }
    }
}

pub type TrainFn = fn(&[Vec<StructuralTag>], &TrainConfig) -> Result<Box<dyn ProbSource>, ModelError>;
pub type LoadFn = fn(&str) -> Result<Box<dyn ProbSource>, ModelError>;

#[derive(Clone, Copy)]
pub struct SourceEntry {
    pub name: &'static str,
    /// First word of the model file.
    pub magic: &'static str,
    pub train: TrainFn,
    pub load: LoadFn,
}

fn train_maxent(data: &[Vec<StructuralTag>], cfg: &TrainConfig) -> Result<Box<dyn ProbSource>, ModelError> {
    let events = EventSpace::from_sequences(data)?;
    let features = extract_features(data, &cfg.patterns, cfg.cutoff);
    Ok(Box::new(MaxentSource::new(train_iis(&events, features, cfg.cutoff, &cfg.iis))))
}

fn load_maxent(text: &str) -> Result<Box<dyn ProbSource>, ModelError> {
    Ok(Box::new(MaxentSource::new(maxent::model_from_text(text)?)))
}

fn train_interpolation(data: &[Vec<StructuralTag>], _: &TrainConfig) -> Result<Box<dyn ProbSource>, ModelError> {
    Ok(Box::new(InterpolationSource::new(NgramModel::train(data)?)))
}

fn load_interpolation(text: &str) -> Result<Box<dyn ProbSource>, ModelError> {
    Ok(Box::new(InterpolationSource::new(NgramModel::from_text(text)?)))
}

/// Named trainers and loaders.
#[derive(Clone)]
pub struct Registry {
    entries: Vec<SourceEntry>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { entries: Vec::new() }
    }

    /// `maxent` and `interpolation`.
    pub fn standard() -> Self {
        let mut r = Registry::empty();
        r.register(SourceEntry {
            name: "maxent",
            magic: maxent::MAXENT_MAGIC,
            train: train_maxent,
            load: load_maxent,
        });
        r.register(SourceEntry {
            name: "interpolation",
            magic: NGRAM_MAGIC,
            train: train_interpolation,
            load: load_interpolation,
        });
        r
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, entry: SourceEntry) {
        self.entries.retain(|e| e.name != entry.name);
        self.entries.push(entry);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn get(&self, name: &str) -> Result<&SourceEntry, ModelError> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| ModelError::UnknownSource(name.to_string()))
    }

    pub fn train(
        &self,
        name: &str,
        data: &[Vec<StructuralTag>],
        cfg: &TrainConfig,
    ) -> Result<Box<dyn ProbSource>, ModelError> {
        (self.get(name)?.train)(data, cfg)
    }

    /// Picks the loader from the file's first word.
    pub fn load_text(&self, text: &str) -> Result<Box<dyn ProbSource>, ModelError> {
        let magic = magic_of(text).unwrap_or_default();
        let entry = self
            .entries
            .iter()
            .find(|e| e.magic == magic)
            .ok_or_else(|| ModelError::UnknownSource(magic.to_string()))?;
        (entry.load)(text)
    }

    pub fn load(&self, path: &Path) -> Result<Box<dyn ProbSource>, ModelError> {
        self.load_text(&fs::read_to_string(path)?)
    }
}

pub fn save_source(source: &dyn ProbSource, path: &Path) -> Result<(), ModelError> {
    fs::write(path, source.to_text())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Vec<Vec<StructuralTag>> {
        ["ART/1/NP NN/0/NP", "APPR/1/PP ART/-/NP NN/0/NP", "VVFIN/1/NONE ART/1/NP NN/0/NP"]
            .iter()
            .map(|l| l.split_whitespace().map(|s| StructuralTag::parse(s).unwrap()).collect())
            .collect()
    }

    #[test]
    fn registry_trains_and_reloads_both_sources() {
        let reg = Registry::standard();
        assert_eq!(reg.names(), vec!["maxent", "interpolation"]);
        for name in reg.names() {
            let src = reg.train(name, &data(), &TrainConfig::default()).unwrap();
            assert_eq!(src.kind(), name);
            let back = reg.load_text(&src.to_text()).unwrap();
            assert_eq!(back.kind(), name);
            assert_eq!(back.info(), src.info());
            let h = History::Known(0);
            assert_eq!(&*back.log_probs(History::Boundary, h), &*src.log_probs(History::Boundary, h));
        }
        assert!(matches!(reg.get("gis"), Err(ModelError::UnknownSource(_))));
        assert!(matches!(reg.load_text("nonsense 1\n"), Err(ModelError::UnknownSource(_))));
    }

    #[test]
    fn distributions_are_normalized_for_seen_histories() {
        let reg = Registry::standard();
        for name in reg.names() {
            let src = reg.train(name, &data(), &TrainConfig::default()).unwrap();
            let n = src.futures().len();
            for a in 0..n {
                for h2 in [History::Boundary, History::Known(a)] {
                    let lp = src.log_probs(h2, History::Known(a));
                    let s: f64 = lp.iter().map(|x| x.exp()).sum();
                    if name == "maxent" {
                        assert!((s - 1.0).abs() < 1e-9);
                    } else {
                        assert!(s <= 1.0 + 1e-9);
                    }
                }
            }
        }
    }
}
