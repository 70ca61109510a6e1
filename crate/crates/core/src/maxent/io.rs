//! Text model format.
//!
//! ```text
//! structag-maxent 1
//! iterations 3
//! converged false
//! cutoff 1
//! prior none
//! clamped 0
//! loglik -812.4 -503.1 -455.9 -441.0
//! futures 2
//! ART/1/NP
//! NN/0/NP
//! patterns 1
//! - | - | r,t,c
//! features 1
//! 0<TAB>=1<TAB>=ART<TAB>=NP<TAB>0.6931471805599453
//! checksum sha256 <hex digest of everything above>
//! ```
//!
//! Feature lines hold the pattern index, one field per constrained
//! attribute (`=value`, or `^` for the sentence boundary) and the weight,
//! printed so that it parses back to the same bits.

use std::fs;
use std::path::Path;

use super::{MaxentModel, TrainingMeta};
use crate::error::ModelError;
use crate::features::{parse_patterns, FeatureInstance, FeatureSet, SymbolTable};
use crate::inventory::TagInventory;
use crate::modelio::{check_magic, parse_f64, seal, unseal};
use crate::treebank::StructuralTag;

pub const MAXENT_MAGIC: &str = "structag-maxent";
pub const MAXENT_VERSION: u32 = 1;

pub fn model_to_text(model: &MaxentModel) -> String {
    let meta = model.meta();
    let mut s = format!("{MAXENT_MAGIC} {MAXENT_VERSION}\n");
    s += &format!("iterations {}\n", meta.iterations);
    s += &format!("converged {}\n", meta.converged);
    s += &format!("cutoff {}\n", meta.cutoff);
    match meta.prior_variance {
        Some(v) => s += &format!("prior {v}\n"),
        None => s += "prior none\n",
    }
    s += &format!("clamped {}\n", meta.clamped_updates);
    s += "loglik";
    for x in &meta.log_likelihood {
        s += &format!(" {x}");
    }
    s.push('\n');
    s += &format!("futures {}\n", model.futures().len());
    for t in model.futures().tags() {
        s += &format!("{t}\n");
    }
    let patterns = model.features().patterns();
    s += &format!("patterns {}\n", patterns.len());
    for p in patterns {
        s += &format!("{p}\n");
    }
    s += &format!("features {}\n", model.features().len());
    for f in model.features().instances() {
        s += &format!("{}\t{}\t{}\n", f.pattern, f.value_fields().join("\t"), f.weight);
    }
    seal(s)
}

pub fn model_from_text(text: &str) -> Result<MaxentModel, ModelError> {
    let body = unseal(text)?;
    let mut lines = check_magic(body, MAXENT_MAGIC, MAXENT_VERSION)?;
    let iterations = lines.parsed("iterations")?;
    let converged = lines.parsed("converged")?;
    let cutoff = lines.parsed("cutoff")?;
    let (no, prior) = lines.field("prior")?;
    let prior_variance = match prior {
        "none" => None,
        v => Some(parse_f64(no, v)?),
    };
    let clamped_updates = lines.parsed("clamped")?;
    let (no, ll) = lines.field("loglik")?;
    let log_likelihood = ll.split_whitespace().map(|v| parse_f64(no, v)).collect::<Result<_, _>>()?;

    let n: usize = lines.parsed("futures")?;
    let mut futures = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, l) = lines.next_line()?;
        futures.push(StructuralTag::parse(l).map_err(|e| ModelError::format(no, e.to_string()))?);
    }
    let futures = TagInventory::new(futures);
    if futures.len() != n {
        return Err(ModelError::format(no, "duplicate futures"));
    }

    let n: usize = lines.parsed("patterns")?;
    let mut text = String::new();
    for _ in 0..n {
        text += lines.next_line()?.1;
        text.push('\n');
    }
    let patterns = if n == 0 { Vec::new() } else { parse_patterns(&text)? };

    let n: usize = lines.parsed("features")?;
    let mut instances = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, l) = lines.next_line()?;
        let fields: Vec<&str> = l.split('\t').collect();
        if fields.len() < 2 {
            return Err(ModelError::format(no, "truncated feature line"));
        }
        let pid: usize = fields[0]
            .parse()
            .map_err(|_| ModelError::format(no, format!("bad pattern index {:?}", fields[0])))?;
        let pattern = patterns
            .get(pid)
            .ok_or_else(|| ModelError::format(no, format!("pattern {pid} not declared")))?;
        let weight = parse_f64(no, fields[fields.len() - 1])?;
        let f = FeatureInstance::from_fields(pattern, pid, &fields[1..fields.len() - 1], weight)
            .map_err(|m| ModelError::format(no, m))?;
        instances.push(f);
    }
    lines.end()?;

    let symbols = SymbolTable::from_tags(futures.tags());
    let meta = TrainingMeta {
        iterations,
        converged,
        cutoff,
        prior_variance,
        log_likelihood,
        clamped_updates,
    };
    Ok(MaxentModel::new(FeatureSet::new(patterns, symbols, instances), futures, meta))
}

pub fn save_model(model: &MaxentModel, path: &Path) -> Result<(), ModelError> {
    fs::write(path, model_to_text(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<MaxentModel, ModelError> {
    model_from_text(&fs::read_to_string(path)?)
}
