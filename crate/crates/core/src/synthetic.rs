//! Seeded synthetic treebank and a table-driven probability source.
//!
//! The grammar produces German-like clauses with noun, prepositional and
//! adjective phrases. Prepositional phrases after a noun attach either to the
//! noun phrase or to the clause, with odds that depend on the surrounding
//! words' tags, so a model has to learn the attachment from context.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use parking_lot::RwLock;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::inventory::TagInventory;
use crate::source::{History, ProbSource, SourceInfo};
use crate::treebank::{encodability_issues, ChunkTree, PhraseCat, PosTag, RelValue, StructuralTag, Token, TreeBuilder};

const LEXICON: &[(&str, &[&str])] = &[
    ("ART", &["der", "die", "das", "ein", "eine", "den", "dem"]),
    ("PPOSAT", &["sein", "ihre", "unser"]),
    ("PDAT", &["diese", "jener"]),
    ("PIAT", &["viele", "einige", "alle"]),
    ("NN", &["Mann", "Frau", "Hut", "Haus", "Stadt", "Zug", "Brief", "Garten", "Tisch", "Kind"]),
    ("NE", &["Anna", "Berlin", "Otto", "Hamburg", "Peter"]),
    ("PIS", &["man", "alles", "niemand"]),
    ("PDS", &["das", "dies"]),
    ("ADJA", &["alte", "neuen", "kleinen", "rote", "schnelle"]),
    ("ADV", &["sehr", "recht", "ziemlich", "heute", "oft"]),
    ("PTKNEG", &["nicht"]),
    ("PROAV", &["dabei", "darauf", "deshalb"]),
    ("ADJD", &["schnell", "gut", "spät"]),
    ("APPR", &["mit", "in", "auf", "aus", "nach", "von"]),
    ("APPRART", &["im", "zum", "vom", "am"]),
    ("CARD", &["zwei", "drei", "zehn"]),
    ("PPER", &["er", "sie", "wir"]),
    ("PRELS", &["der", "die", "das"]),
    ("KOUS", &["weil", "dass", "ob"]),
    ("VVFIN", &["sieht", "kauft", "schreibt", "findet", "baut"]),
    ("VAFIN", &["hat", "ist", "wird"]),
    ("VMFIN", &["kann", "muss", "will"]),
    ("VVINF", &["sehen", "kaufen", "bauen"]),
    ("VVPP", &["gesehen", "gekauft", "gebaut"]),
    ("PTKVZ", &["an", "auf", "ab"]),
    ("KON", &["und", "oder"]),
    ("$,", &[","]),
    ("$.", &["."]),
];

fn cat(s: &str) -> PhraseCat {
    PhraseCat::label(s).expect("valid label")
}

/// Tags inflected inside noun phrases, written `ART.dat.sgf`.
const INFLECTED: [&str; 7] = ["ART", "PPOSAT", "PDAT", "PIAT", "ADJA", "NN", "PRELS"];

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    b: TreeBuilder,
    case: &'static str,
    /// Number and gender of the current noun phrase, e.g. `sgf`.
    agr: &'static str,
}

impl Gen<'_> {
    fn word(&mut self, pos: &str) {
        let words = LEXICON.iter().find(|(p, _)| *p == pos).expect("tag in lexicon").1;
        let w = words.choose(self.rng).expect("non-empty word list");
        let tag = if INFLECTED.contains(&pos) {
            PosTag::new(format!("{pos}.{}.{}", self.case, self.agr))
        } else {
            PosTag::new(pos)
        };
        self.b.leaf(Token::new(Some((*w).to_string()), tag.expect("valid tag")));
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    /// One tag drawn by weight.
    fn pick(&mut self, options: &[(&'static str, f64)]) -> &'static str {
        let total: f64 = options.iter().map(|o| o.1).sum();
        let mut r = self.rng.random::<f64>() * total;
        for &(tag, w) in options {
            if r < w {
                return tag;
            }
            r -= w;
        }
        options[options.len() - 1].0
    }

    /// Adjectives before the noun: bare ADJA, a pair, or an AP with a
    /// degree adverb.
    fn premodifiers(&mut self) {
        match self.pick(&[("none", 0.62), ("one", 0.22), ("two", 0.06), ("ap", 0.1)]) {
            "one" => self.word("ADJA"),
            "two" => {
                self.word("ADJA");
                self.word("ADJA");
            }
            "ap" => {
                self.b.open(cat("AP"));
                let adv = self.pick(&[("ADV", 0.8), ("PTKNEG", 0.2)]);
                self.word(adv);
                self.word("ADJA");
                self.b.close();
            }
            _ => {}
        }
    }

    /// Determiner, adjectives and head noun, without opening a node.
    fn nominal(&mut self) {
        self.agr = self.pick(&[("sgm", 0.25), ("sgf", 0.25), ("sgn", 0.2), ("plm", 0.1), ("plf", 0.1), ("pln", 0.1)]);
        match self.pick(&[("ART", 0.6), ("PPOSAT", 0.12), ("PDAT", 0.08), ("PIAT", 0.08), ("CARD", 0.07), ("NM", 0.05)]) {
            "NM" => {
                self.b.open(cat("NM"));
                self.word("CARD");
                self.word("CARD");
                self.b.close();
            }
            d => self.word(d),
        }
        self.premodifiers();
        self.word("NN");
        if self.chance(0.05) {
            self.word("NE");
        }
    }

    /// A PP whose object is flat, for use inside a noun phrase.
    fn flat_pp(&mut self) {
        let case = self.pick(&[("dat", 0.6), ("acc", 0.4)]);
        let outer = std::mem::replace(&mut self.case, case);
        self.b.open(cat("PP"));
        if self.chance(0.08) {
            self.word("ADV");
        }
        if self.chance(0.3) {
            self.word("APPRART");
            self.premodifiers();
            self.word("NN");
        } else {
            self.word("APPR");
            match self.pick(&[("nominal", 0.75), ("NE", 0.15), ("PDS", 0.05), ("PIS", 0.05)]) {
                "nominal" => self.nominal(),
                t => self.word(t),
            }
        }
        self.b.close();
        self.case = outer;
    }

    /// A noun phrase. `attach` is the chance that a following PP is taken
    /// into it.
    fn np(&mut self, attach: f64) -> bool {
        let kind = self.pick(&[
            ("PPER", 0.12),
            ("pron", 0.06),
            ("NE", 0.07),
            ("MPN", 0.04),
            ("coord", 0.07),
            ("full", 0.64),
        ]);
        match kind {
            "PPER" | "pron" | "NE" => {
                self.b.open(cat("NP"));
                let t = match kind {
                    "pron" => self.pick(&[("PIS", 0.5), ("PDS", 0.5)]),
                    t => t,
                };
                self.word(t);
                self.b.close();
                false
            }
            "MPN" => {
                self.b.open(cat("MPN"));
                self.word("NE");
                self.word("NE");
                self.b.close();
                false
            }
            "coord" => {
                self.b.open(cat("NP"));
                self.b.open(cat("NP"));
                self.nominal();
                self.b.close();
                self.word("KON");
                self.b.open(cat("NP"));
                self.nominal();
                self.b.close();
                self.b.close();
                false
            }
            _ => {
                self.b.open(cat("NP"));
                self.nominal();
                // a genitive attribute competes with the PP for the slot
                if self.chance(0.1) {
                    let outer = std::mem::replace(&mut self.case, "gen");
                    self.agr = self.pick(&[("sgm", 0.4), ("sgf", 0.3), ("pln", 0.3)]);
                    self.b.open(cat("NP"));
                    self.word("ART");
                    self.premodifiers();
                    self.word("NN");
                    self.b.close();
                    self.b.close();
                    self.case = outer;
                    return false;
                }
                let took = self.chance(attach);
                if took {
                    self.flat_pp();
                }
                self.b.close();
                took
            }
        }
    }

    /// A clause-level PP. Its object is a nested NP when it has a
    /// determiner; the object may itself take a flat PP.
    fn clause_pp(&mut self) {
        self.case = self.pick(&[("dat", 0.6), ("acc", 0.4)]);
        self.b.open(cat("PP"));
        if self.chance(0.25) {
            self.word("APPRART");
            self.premodifiers();
            self.word("NN");
        } else {
            self.word("APPR");
            match self.pick(&[("NP", 0.7), ("NE", 0.15), ("PDS", 0.05), ("PPER", 0.1)]) {
                "NP" => {
                    self.b.open(cat("NP"));
                    self.nominal();
                    if self.chance(0.15) {
                        self.flat_pp();
                    }
                    self.b.close();
                }
                t => self.word(t),
            }
        }
        self.b.close();
    }

    fn adverbial(&mut self) {
        match self.pick(&[("ADV", 0.5), ("PTKNEG", 0.2), ("PROAV", 0.2), ("AP", 0.1)]) {
            "AP" => {
                self.b.open(cat("AP"));
                self.word("ADV");
                self.word("ADJD");
                self.b.close();
            }
            t => self.word(t),
        }
    }

    /// Middle field: objects, adverbials and PPs in varying order.
    fn middle(&mut self, object_attach: f64) {
        if self.chance(0.25) {
            self.adverbial();
        }
        if self.chance(0.8) {
            self.case = self.pick(&[("acc", 0.7), ("dat", 0.3)]);
            let took = self.np(object_attach);
            if !took && self.chance(0.45) {
                self.clause_pp();
            }
        }
        if self.chance(0.15) {
            self.adverbial();
        }
        if self.chance(0.25) {
            self.clause_pp();
        }
        if self.chance(0.1) {
            self.word("ADJD");
        }
    }

    fn main_clause(&mut self) {
        let fronted_pp = self.chance(0.25);
        if fronted_pp {
            self.clause_pp();
        } else {
            // subjects rarely take a PP
            self.case = "nom";
            self.np(0.15);
        }
        let finite = self.pick(&[("VVFIN", 0.55), ("VAFIN", 0.25), ("VMFIN", 0.2)]);
        self.word(finite);
        if fronted_pp {
            self.case = "nom";
            self.np(0.1);
        }
        // objects right after the verb usually take the PP
        self.middle(0.55);
        match finite {
            "VAFIN" => self.word("VVPP"),
            "VMFIN" => self.word("VVINF"),
            _ if self.chance(0.15) => self.word("PTKVZ"),
            _ => {}
        }
    }

    /// Verb-final clause introduced by a complementizer or relative pronoun.
    fn subordinate(&mut self) {
        let rel = self.chance(0.4);
        if rel {
            self.case = self.pick(&[("nom", 0.6), ("acc", 0.3), ("dat", 0.1)]);
            self.b.open(cat("NP"));
            self.word("PRELS");
            self.b.close();
        } else {
            self.word("KOUS");
            self.case = "nom";
            self.np(0.1);
        }
        self.middle(0.35);
        if self.chance(0.3) {
            self.word("VVPP");
            self.word("VAFIN");
        } else {
            self.word("VVFIN");
        }
    }

    fn sentence(&mut self) {
        self.main_clause();
        match self.pick(&[("end", 0.65), ("sub", 0.2), ("coord", 0.15)]) {
            "sub" => {
                self.word("$,");
                self.subordinate();
            }
            "coord" => {
                self.word("$,");
                if self.chance(0.5) {
                    self.word("KON");
                }
                self.main_clause();
            }
            _ => {}
        }
        self.word("$.");
    }
}

/// One sentence from the grammar, resampled until the codec reproduces it.
pub fn synthetic_sentence(rng: &mut ChaCha8Rng) -> ChunkTree {
    loop {
        let mut g = Gen {
            rng,
            b: TreeBuilder::new(),
            case: "nom",
            agr: "sgm",
        };
        g.sentence();
        let t = g.b.finish();
        if encodability_issues(&t).is_empty() {
            return t;
        }
    }
}

/// `n` sentences from a fixed seed.
pub fn synthetic_treebank(n: usize, seed: u64) -> Vec<ChunkTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| synthetic_sentence(&mut rng)).collect()
}

/// A source whose log-probabilities are drawn at random per history, or all
/// equal. Used to check the decoder against exhaustive search.
#[derive(Debug)]
pub struct TableSource {
    futures: TagInventory,
    seed: u64,
    uniform: bool,
    rows: RwLock<HashMap<u64, Arc<[f64]>>>,
}

impl TableSource {
    /// Random values in [-10, 0), fixed by `seed` and the history.
    pub fn random(futures: TagInventory, seed: u64) -> Self {
        TableSource {
            futures,
            seed,
            uniform: false,
            rows: RwLock::default(),
        }
    }

    /// Every future has probability 1/|Y| under every history.
    pub fn uniform(futures: TagInventory) -> Self {
        TableSource {
            futures,
            seed: 0,
            uniform: true,
            rows: RwLock::default(),
        }
    }

    /// A random inventory over `pos_count` POS tags with 1 to `max_per_pos`
    /// states each.
    pub fn random_inventory<R: Rng>(rng: &mut R, pos_count: usize, max_per_pos: usize) -> TagInventory {
        let cats = ["NONE", "NP", "PP", "AP"];
        let mut tags = Vec::new();
        for p in 0..pos_count {
            let pos = PosTag::new(format!("P{p}")).expect("valid tag");
            let mut all: Vec<(RelValue, &str)> = RelValue::ALL
                .iter()
                .flat_map(|&r| cats.iter().map(move |&c| (r, c)))
                .collect();
            let k = rng.random_range(1..=max_per_pos.min(all.len()));
            let (chosen, _) = all.partial_shuffle(rng, k);
            for &mut (rel, c) in chosen {
                let cat = PhraseCat::new(c).expect("valid category");
                tags.push(StructuralTag::new(pos.clone(), rel, cat));
            }
        }
        TagInventory::new(tags)
    }

    fn row_seed(&self, h2: History, h1: History) -> u64 {
        fn put(h: History, s: &mut DefaultHasher) {
            match h {
                History::Boundary => 0u8.hash(s),
                History::Known(i) => (1u8, i).hash(s),
                History::Other(t) => (2u8, t).hash(s),
            }
        }
        let mut s = DefaultHasher::new();
        self.seed.hash(&mut s);
        put(h2, &mut s);
        put(h1, &mut s);
        s.finish()
    }
}

impl ProbSource for TableSource {
    fn kind(&self) -> &'static str {
        "table"
    }

    fn futures(&self) -> &TagInventory {
        &self.futures
    }

    fn log_probs(&self, h2: History, h1: History) -> Arc<[f64]> {
        let n = self.futures.len();
        if self.uniform {
            return vec![-(n as f64).ln(); n].into();
        }
        let key = self.row_seed(h2, h1);
        if let Some(row) = self.rows.read().get(&key) {
            return row.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let row: Arc<[f64]> = (0..n).map(|_| rng.random_range(-10.0..0.0)).collect();
        self.rows.write().entry(key).or_insert(row).clone()
    }

    fn info(&self) -> SourceInfo {
        SourceInfo {
            kind: self.kind().to_string(),
            futures: self.futures.len(),
            tags: self.futures.pos_tags().iter().map(ToString::to_string).collect(),
            labels: self.futures.labels().iter().map(ToString::to_string).collect(),
            features: None,
            iterations: None,
            log_likelihood: Vec::new(),
            lambdas: None,
        }
    }

    fn to_text(&self) -> String {
        let mut s = format!("table {} {}\n", self.seed, self.uniform);
        for t in self.futures.tags() {
            s += &format!("{t}\n");
        }
        s
    }
}

/// Count of each POS tag over a treebank, for summaries.
pub fn pos_histogram(trees: &[ChunkTree]) -> HashMap<String, usize> {
    let mut h = HashMap::new();
    for t in trees {
        for p in t.pos_tags() {
            *h.entry(p.to_string()).or_default() += 1;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::{decode_with_words, encode_tree};

    #[test]
    fn treebank_is_seeded_and_encodable() {
        let a = synthetic_treebank(200, 3);
        let b = synthetic_treebank(200, 3);
        assert_eq!(a.iter().map(|t| t.to_bracketed()).collect::<Vec<_>>(), b.iter().map(|t| t.to_bracketed()).collect::<Vec<_>>());
        for t in &a {
            let tags = encode_tree(t).unwrap();
            let words: Vec<_> = t.leaves.iter().map(|l| l.word.clone()).collect();
            assert_eq!(decode_with_words(&tags, &words).tree, *t);
        }
        let h = pos_histogram(&a);
        for p in ["APPR", "KON", "$,", "VVFIN", "ADJA.nom.", "NN.gen."] {
            assert!(h.keys().any(|k| k.starts_with(p)), "{p} never generated");
        }
    }

    #[test]
    fn both_attachments_occur() {
        let trees = synthetic_treebank(300, 11);
        let mut inside = 0;
        let mut outside = 0;
        for t in &trees {
            for tag in encode_tree(t).unwrap() {
                if tag.tag.as_str() == "APPR" {
                    match tag.rel {
                        RelValue::Open1 => inside += 1,
                        RelValue::Other => outside += 1,
                        _ => {}
                    }
                }
            }
        }
        assert!(inside > 50 && outside > 50, "{inside} {outside}");
    }

    #[test]
    fn table_rows_are_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inv = TableSource::random_inventory(&mut rng, 3, 8);
        let src = TableSource::random(inv.clone(), 9);
        let a = src.log_probs(History::Boundary, History::Known(0));
        let b = src.log_probs(History::Boundary, History::Known(0));
        assert_eq!(a, b);
        assert_ne!(a, src.log_probs(History::Known(0), History::Known(0)));
        let u = TableSource::uniform(inv);
        assert!(u.log_probs(History::Boundary, History::Boundary).iter().all(|&x| x == u.log_probs(History::Boundary, History::Boundary)[0]));
    }
}
