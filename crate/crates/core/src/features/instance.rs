use std::collections::HashMap;
use std::fmt;

use super::pattern::{AttributeMask, FeaturePattern};
use super::symbols::{SymbolTable, TagCode, BOUNDARY};
use crate::treebank::{PhraseCat, PosTag, RelValue, StructuralTag};

/// 1 iff the token is a sibling of its predecessor.
pub fn rel_sibl(tag: &StructuralTag) -> u8 {
    u8::from(tag.rel == RelValue::Sibling)
}

/// A trigram context. `None` in a history slot is the sentence-start
/// sentinel.
#[derive(Clone, Copy, Debug)]
pub struct Context<'a> {
    pub prev2: Option<&'a StructuralTag>,
    pub prev1: Option<&'a StructuralTag>,
    pub future: &'a StructuralTag,
}

impl<'a> Context<'a> {
    /// The context of position `i` in `seq`, padded at the start.
    pub fn at(seq: &'a [StructuralTag], i: usize) -> Self {
        Context {
            prev2: i.checked_sub(2).map(|k| &seq[k]),
            prev1: i.checked_sub(1).map(|k| &seq[k]),
            future: &seq[i],
        }
    }

    fn slot(&self, p: usize) -> Option<&'a StructuralTag> {
        match p {
            0 => self.prev2,
            1 => self.prev1,
            _ => Some(self.future),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value<T> {
    Boundary,
    Is(T),
}

fn matches<T: PartialEq>(want: Option<&Value<T>>, got: Option<&T>) -> bool {
    match want {
        None => true,
        Some(Value::Boundary) => got.is_none(),
        Some(Value::Is(v)) => got == Some(v),
    }
}

/// Values required at one context position; `None` fields are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub rel: Option<Value<RelValue>>,
    pub sibl: Option<Value<bool>>,
    pub tag: Option<Value<PosTag>>,
    pub cat: Option<Value<PhraseCat>>,
}

impl Constraint {
    fn from_tag(mask: &AttributeMask, s: Option<&StructuralTag>) -> Constraint {
        fn pick<T>(on: bool, s: Option<&StructuralTag>, f: impl Fn(&StructuralTag) -> T) -> Option<Value<T>> {
            on.then(|| s.map_or(Value::Boundary, |s| Value::Is(f(s))))
        }
        Constraint {
            rel: pick(mask.rel, s, |s| s.rel),
            sibl: pick(mask.sibl, s, |s| s.rel == RelValue::Sibling),
            tag: pick(mask.tag, s, |s| s.tag.clone()),
            cat: pick(mask.cat, s, |s| s.cat.clone()),
        }
    }
}

/// A pattern filled with concrete values, carrying a weight.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureInstance {
    /// Index into the owning pattern list.
    pub pattern: usize,
    pub positions: [Option<Constraint>; 3],
    pub weight: f64,
}

impl FeatureInstance {
    pub fn from_context(pattern: &FeaturePattern, index: usize, ctx: &Context) -> Self {
        let mut positions: [Option<Constraint>; 3] = Default::default();
        for (p, mask) in pattern.positions.iter().enumerate() {
            positions[p] = mask.as_ref().map(|m| Constraint::from_tag(m, ctx.slot(p)));
        }
        FeatureInstance {
            pattern: index,
            positions,
            weight: 0.0,
        }
    }

    /// Constrained values in pattern order: `^` for the boundary, `=X`
    /// otherwise.
    pub fn value_fields(&self) -> Vec<String> {
        fn field<T: fmt::Display>(v: &Value<T>) -> String {
            match v {
                Value::Boundary => "^".to_string(),
                Value::Is(x) => format!("={x}"),
            }
        }
        let mut out = Vec::new();
        for c in self.positions.iter().flatten() {
            if let Some(v) = &c.rel {
                out.push(field(v));
            }
            if let Some(v) = &c.sibl {
                out.push(field(&match v {
                    Value::Boundary => Value::Boundary,
                    Value::Is(b) => Value::Is(u8::from(*b)),
                }));
            }
            if let Some(v) = &c.tag {
                out.push(field(v));
            }
            if let Some(v) = &c.cat {
                out.push(field(v));
            }
        }
        out
    }

    /// Inverse of [`FeatureInstance::value_fields`].
    pub fn from_fields(pattern: &FeaturePattern, index: usize, fields: &[&str], weight: f64) -> Result<Self, String> {
        fn parse<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Value<T>, String> {
            match s {
                "^" => Ok(Value::Boundary),
                _ => match s.strip_prefix('=') {
                    Some(v) => f(v).map(Value::Is),
                    None => Err(format!("bad value field {s:?}")),
                },
            }
        }
        let mut it = fields.iter();
        let mut next = || it.next().copied().ok_or_else(|| "too few value fields".to_string());
        let mut positions: [Option<Constraint>; 3] = Default::default();
        for (p, mask) in pattern.positions.iter().enumerate() {
            let Some(m) = mask else { continue };
            let mut c = Constraint::default();
            if m.rel {
                c.rel = Some(parse(next()?, |v| v.parse::<RelValue>().map_err(|e| e.to_string()))?);
            }
            if m.sibl {
                c.sibl = Some(parse(next()?, |v| match v {
                    "1" => Ok(true),
                    "0" => Ok(false),
                    _ => Err(format!("bad sibling flag {v:?}")),
                })?);
            }
            if m.tag {
                c.tag = Some(parse(next()?, |v| v.parse::<PosTag>().map_err(|e| e.to_string()))?);
            }
            if m.cat {
                c.cat = Some(parse(next()?, |v| v.parse::<PhraseCat>().map_err(|e| e.to_string()))?);
            }
            positions[p] = Some(c);
        }
        if fields.len() != pattern_width(pattern) {
            return Err(format!("expected {} value fields, found {}", pattern_width(pattern), fields.len()));
        }
        Ok(FeatureInstance {
            pattern: index,
            positions,
            weight,
        })
    }
}

fn pattern_width(p: &FeaturePattern) -> usize {
    p.positions
        .iter()
        .flatten()
        .map(|m| usize::from(m.rel) + usize::from(m.sibl) + usize::from(m.tag) + usize::from(m.cat))
        .sum()
}

impl fmt::Display for FeatureInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {}", self.pattern, self.value_fields().join(" "))
    }
}

/// Attribute unification of an instance against a context.
pub fn is_active(f: &FeatureInstance, ctx: &Context) -> bool {
    f.positions
        .iter()
        .enumerate()
        .all(|(p, c)| c.as_ref().is_none_or(|c| c.admits(ctx.slot(p))))
}

impl Constraint {
    fn admits(&self, s: Option<&StructuralTag>) -> bool {
        let sibl = s.map(|s| s.rel == RelValue::Sibling);
        matches(self.rel.as_ref(), s.map(|s| &s.rel))
            && matches(self.sibl.as_ref(), sibl.as_ref())
            && matches(self.tag.as_ref(), s.map(|s| &s.tag))
            && matches(self.cat.as_ref(), s.map(|s| &s.cat))
    }
}

type FeatureKey = (u16, [u32; 9]);

fn key_from_codes(index: usize, pattern: &FeaturePattern, codes: &[TagCode; 3]) -> FeatureKey {
    let mut v = [0u32; 9];
    for (p, mask) in pattern.positions.iter().enumerate() {
        let Some(m) = mask else { continue };
        let c = codes[p];
        if m.rel {
            v[3 * p] = c.rel;
        } else if m.sibl {
            v[3 * p] = c.sibl();
        }
        if m.tag {
            v[3 * p + 1] = c.tag;
        }
        if m.cat {
            v[3 * p + 2] = c.cat;
        }
    }
    (index as u16, v)
}

/// Extracted instances with a per-pattern lookup index.
#[derive(Clone, Debug)]
pub struct FeatureSet {
    patterns: Vec<FeaturePattern>,
    symbols: SymbolTable,
    instances: Vec<FeatureInstance>,
    index: HashMap<FeatureKey, u32>,
}

impl FeatureSet {
    /// Builds the index. Symbols of instance values missing from `symbols`
    /// are added so they can never collide with unknown context values.
    pub fn new(patterns: Vec<FeaturePattern>, mut symbols: SymbolTable, instances: Vec<FeatureInstance>) -> Self {
        let mut index = HashMap::with_capacity(instances.len());
        for (i, f) in instances.iter().enumerate() {
            let mut v = [0u32; 9];
            for (p, c) in f.positions.iter().enumerate() {
                let Some(c) = c else { continue };
                let code = |b: &Value<u32>| match b {
                    Value::Boundary => BOUNDARY,
                    Value::Is(x) => *x,
                };
                if let Some(r) = &c.rel {
                    v[3 * p] = code(&map_value(r, |r| r.index() as u32));
                } else if let Some(s) = &c.sibl {
                    v[3 * p] = code(&map_value(s, |b| u32::from(*b)));
                }
                if let Some(t) = &c.tag {
                    v[3 * p + 1] = code(&map_value(t, |t| symbols.intern_tag(t)));
                }
                if let Some(k) = &c.cat {
                    v[3 * p + 2] = code(&map_value(k, |k| symbols.intern_cat(k)));
                }
            }
            index.insert((f.pattern as u16, v), i as u32);
        }
        FeatureSet {
            patterns,
            symbols,
            instances,
            index,
        }
    }

    pub fn patterns(&self) -> &[FeaturePattern] {
        &self.patterns
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn instances(&self) -> &[FeatureInstance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn set_weights(&mut self, weights: &[f64]) {
        for (f, w) in self.instances.iter_mut().zip(weights) {
            f.weight = *w;
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.instances.iter().map(|f| f.weight).collect()
    }

    /// Indices of the instances active on `ctx`, at most one per pattern.
    pub fn active_set(&self, ctx: &Context) -> Vec<usize> {
        let codes = [
            self.symbols.code(ctx.prev2),
            self.symbols.code(ctx.prev1),
            self.symbols.code(Some(ctx.future)),
        ];
        let mut out = Vec::new();
        self.active_codes(&codes, &mut out);
        out.into_iter().map(|i| i as usize).collect()
    }

    /// Appends active instance indices for an encoded context.
    pub fn active_codes(&self, codes: &[TagCode; 3], out: &mut Vec<u32>) {
        for (i, p) in self.patterns.iter().enumerate() {
            if let Some(&f) = self.index.get(&key_from_codes(i, p, codes)) {
                out.push(f);
            }
        }
    }
}

fn map_value<T, U>(v: &Value<T>, f: impl FnOnce(&T) -> U) -> Value<U> {
    match v {
        Value::Boundary => Value::Boundary,
        Value::Is(x) => Value::Is(f(x)),
    }
}

/// Instantiates every pattern on every training context and keeps the
/// instances seen at least `cutoff` times, in order of first occurrence.
pub fn extract_features(seqs: &[Vec<StructuralTag>], patterns: &[FeaturePattern], cutoff: usize) -> FeatureSet {
    let symbols = SymbolTable::from_tags(seqs.iter().flatten());
    let mut counts: HashMap<FeatureKey, (usize, usize)> = HashMap::new();
    let mut first: Vec<FeatureInstance> = Vec::new();
    for seq in seqs {
        for i in 0..seq.len() {
            let ctx = Context::at(seq, i);
            let codes = [symbols.code(ctx.prev2), symbols.code(ctx.prev1), symbols.code(Some(ctx.future))];
            for (k, p) in patterns.iter().enumerate() {
                let key = key_from_codes(k, p, &codes);
                let entry = counts.entry(key).or_insert_with(|| {
                    first.push(FeatureInstance::from_context(p, k, &ctx));
                    (first.len() - 1, 0)
                });
                entry.1 += 1;
            }
        }
    }
    let mut keep = vec![false; first.len()];
    for (slot, n) in counts.values() {
        keep[*slot] = *n >= cutoff.max(1);
    }
    let instances = first.into_iter().zip(keep).filter(|(_, k)| *k).map(|(f, _)| f).collect();
    FeatureSet::new(patterns.to_vec(), symbols, instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::pattern::{default_patterns, parse_patterns};
    use rand::seq::IndexedRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn st(s: &str) -> StructuralTag {
        StructuralTag::parse(s).unwrap()
    }

    fn fig4_partial() -> FeatureInstance {
        let pattern = &parse_patterns("- | r,t | r,t,c").unwrap()[0];
        FeatureInstance::from_fields(pattern, 0, &["=0", "=ADJA", "=0", "=NN", "=NP"], 0.0).unwrap()
    }

    #[test]
    fn sibling_flag() {
        assert_eq!(rel_sibl(&st("NN/0/NP")), 1);
        assert_eq!(rel_sibl(&st("NN/+/NP")), 0);
        assert_eq!(rel_sibl(&st("NN/1/NP")), 0);
    }

    #[test]
    fn partial_trigram_activation() {
        let f = fig4_partial();
        let (a, b) = (st("ADJA/0/NP"), st("NN/0/NP"));
        for h2 in [None, Some(st("ART/1/NP")), Some(st("APPR/1/PP"))] {
            let ctx = Context { prev2: h2.as_ref(), prev1: Some(&a), future: &b };
            assert!(is_active(&f, &ctx));
        }
        let wrong = st("NN/0/PP");
        assert!(!is_active(&f, &Context { prev2: None, prev1: Some(&a), future: &wrong }));
        assert!(!is_active(&f, &Context { prev2: None, prev1: None, future: &b }));
    }

    #[test]
    fn unigram_ignores_history() {
        let pattern = &parse_patterns("- | - | r,t,c").unwrap()[0];
        let f = FeatureInstance::from_fields(pattern, 0, &["=1", "=APPR", "=PP"], 0.0).unwrap();
        let y = st("APPR/1/PP");
        let hist = [st("ART/1/NP"), st("NN/0/NP"), st("VVFIN/1/NONE")];
        let results: Vec<bool> = [
            (None, None),
            (None, Some(&hist[0])),
            (Some(&hist[0]), Some(&hist[1])),
            (Some(&hist[1]), Some(&hist[2])),
        ]
        .into_iter()
        .map(|(prev2, prev1)| is_active(&f, &Context { prev2, prev1, future: &y }))
        .collect();
        assert_eq!(results, vec![true; 4]);
    }

    #[test]
    fn extraction_merges_duplicates_and_applies_cutoff() {
        let unigram = parse_patterns("- | - | r,t,c").unwrap();
        let seq = vec![st("ART/1/NP"), st("NN/0/NP"), st("NN/0/NP")];
        let fs = extract_features(std::slice::from_ref(&seq), &unigram, 1);
        assert_eq!(fs.len(), 2);
        assert!(fs.instances().iter().all(|f| f.weight == 0.0));
        let fs = extract_features(&[seq], &unigram, 2);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs.instances()[0].value_fields(), vec!["=0", "=NN", "=NP"]);
    }

    #[test]
    fn fields_round_trip() {
        let patterns = default_patterns();
        let seq = vec![st("APPR/1/PP"), st("ART/-/NP"), st("NN/0/NP")];
        let fs = extract_features(std::slice::from_ref(&seq), &patterns, 1);
        for f in fs.instances() {
            let fields = f.value_fields();
            let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
            let back = FeatureInstance::from_fields(&patterns[f.pattern], f.pattern, &refs, 0.0).unwrap();
            assert_eq!(&back, f);
        }
        assert!(FeatureInstance::from_fields(&patterns[0], 0, &["=0"], 0.0).is_err());
    }

    fn random_tag(rng: &mut ChaCha8Rng) -> StructuralTag {
        let tag = *["ART", "NN", "APPR", "ADJA"].choose(rng).unwrap();
        let cat = *["NP", "PP", "NONE"].choose(rng).unwrap();
        let rel = RelValue::from_index(rng.random_range(0..7)).unwrap();
        StructuralTag::new(PosTag::new(tag).unwrap(), rel, PhraseCat::new(cat).unwrap())
    }

    #[test]
    fn index_agrees_with_unification() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let patterns = default_patterns();
        let train: Vec<Vec<StructuralTag>> = (0..40)
            .map(|_| (0..rng.random_range(1..6)).map(|_| random_tag(&mut rng)).collect())
            .collect();
        let fs = extract_features(&train, &patterns, 1);
        for _ in 0..1000 {
            let h2 = rng.random_bool(0.8).then(|| random_tag(&mut rng));
            let h1 = (h2.is_some() || rng.random_bool(0.8)).then(|| random_tag(&mut rng));
            let y = random_tag(&mut rng);
            let ctx = Context { prev2: h2.as_ref(), prev1: h1.as_ref(), future: &y };
            let mut fast = fs.active_set(&ctx);
            fast.sort_unstable();
            let slow: Vec<usize> = (0..fs.len()).filter(|&i| is_active(&fs.instances()[i], &ctx)).collect();
            assert_eq!(fast, slow);
            let mut per_pattern: Vec<usize> = fast.iter().map(|&i| fs.instances()[i].pattern).collect();
            per_pattern.dedup();
            assert_eq!(per_pattern.len(), fast.len());
        }
        // training contexts activate one instance of every pattern
        for seq in &train {
            for i in 0..seq.len() {
                assert_eq!(fs.active_set(&Context::at(seq, i)).len(), patterns.len());
            }
        }
    }

    #[test]
    fn boundary_history_with_unseen_future() {
        let patterns = default_patterns();
        let seq = vec![st("ART/1/NP"), st("NN/0/NP")];
        let fs = extract_features(&[seq], &patterns, 1);
        let y = st("XY/1/NP");
        let active = fs.active_set(&Context { prev2: None, prev1: None, future: &y });
        assert!(!active.is_empty());
        for &i in &active {
            let f = &fs.instances()[i];
            let wants_boundary = f.positions[..2].iter().flatten().any(|c| {
                c.rel == Some(Value::Boundary)
                    || c.sibl == Some(Value::Boundary)
                    || c.tag == Some(Value::Boundary)
                    || c.cat == Some(Value::Boundary)
            });
            assert!(wants_boundary, "{f}");
        }
    }
}
