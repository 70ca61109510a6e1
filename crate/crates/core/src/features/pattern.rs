use std::fmt;

use crate::error::PatternError;

const DEFAULT_PATTERNS: &str = include_str!("../../data/default.patterns");

/// Context positions, oldest first.
pub const POSITIONS: [&str; 3] = ["i-2", "i-1", "i"];

/// Which attributes of one context position a pattern constrains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AttributeMask {
    pub rel: bool,
    /// Only whether `rel` is `0`; excludes `rel`.
    pub sibl: bool,
    pub tag: bool,
    pub cat: bool,
}

impl AttributeMask {
    pub fn is_empty(&self) -> bool {
        !(self.rel || self.sibl || self.tag || self.cat)
    }

    fn parse(field: &str, line: usize) -> Result<AttributeMask, PatternError> {
        let err = |message: String| PatternError::Syntax { line, message };
        let mut m = AttributeMask::default();
        for attr in field.split(',').map(str::trim) {
            let slot = match attr {
                "r" => &mut m.rel,
                "r~sibl" => &mut m.sibl,
                "t" => &mut m.tag,
                "c" => &mut m.cat,
                other => return Err(err(format!("unknown attribute {other:?}"))),
            };
            if *slot {
                return Err(err(format!("attribute {attr:?} repeated")));
            }
            *slot = true;
        }
        if m.rel && m.sibl {
            return Err(err("r and r~sibl are mutually exclusive".into()));
        }
        Ok(m)
    }
}

impl fmt::Display for AttributeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [(self.rel, "r"), (self.sibl, "r~sibl"), (self.tag, "t"), (self.cat, "c")];
        let parts: Vec<&str> = names.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect();
        f.write_str(&parts.join(","))
    }
}

/// An attribute mask over the trigram context `i-2 | i-1 | i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeaturePattern {
    pub id: usize,
    pub positions: [Option<AttributeMask>; 3],
}

impl FeaturePattern {
    /// 3 for trigram patterns, 2 for bigram, 1 for unigram.
    pub fn order(&self) -> usize {
        match self.positions {
            [Some(_), _, _] => 3,
            [None, Some(_), _] => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for FeaturePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, pos) in self.positions.iter().enumerate() {
            if p > 0 {
                f.write_str(" | ")?;
            }
            match pos {
                Some(m) => write!(f, "{m}")?,
                None => f.write_str("-")?,
            }
        }
        Ok(())
    }
}

/// Parses a pattern file. Ids are assigned in file order, starting at 0.
pub fn parse_patterns(text: &str) -> Result<Vec<FeaturePattern>, PatternError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or_default().trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(PatternError::Syntax {
                line,
                message: format!("expected 3 positions separated by '|', found {}", fields.len()),
            });
        }
        let mut positions = [None; 3];
        for (p, field) in fields.iter().enumerate() {
            if *field != "-" {
                positions[p] = Some(AttributeMask::parse(field, line)?);
            }
        }
        if positions[2].is_none() {
            return Err(PatternError::Syntax {
                line,
                message: "the future position must be constrained".into(),
            });
        }
        out.push(FeaturePattern { id: out.len(), positions });
    }
    if out.is_empty() {
        return Err(PatternError::Empty);
    }
    Ok(out)
}

/// The 22 shipped patterns: 11 trigram, 8 bigram, 3 unigram.
pub fn default_patterns() -> Vec<FeaturePattern> {
    parse_patterns(DEFAULT_PATTERNS).expect("bundled pattern file")
}

pub fn write_patterns(patterns: &[FeaturePattern]) -> String {
    patterns.iter().map(|p| format!("{p}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_shape() {
        let p = default_patterns();
        assert_eq!(p.len(), 22);
        let count = |o| p.iter().filter(|x| x.order() == o).count();
        assert_eq!((count(3), count(2), count(1)), (11, 8, 3));
        assert!(p.iter().enumerate().all(|(i, x)| x.id == i));
    }

    #[test]
    fn patterns_print_and_reparse() {
        let p = default_patterns();
        assert_eq!(parse_patterns(&write_patterns(&p)).unwrap(), p);
        assert_eq!(p[3].to_string(), "t | r~sibl,c | r,t,c");
    }

    #[test]
    fn syntax_errors() {
        for bad in ["r,t | r", "r,r~sibl | - | r", "- | - | -", "x | - | r", "r,r | - | t"] {
            assert!(matches!(parse_patterns(bad), Err(PatternError::Syntax { line: 1, .. })), "{bad}");
        }
        assert!(matches!(parse_patterns("# nothing\n"), Err(PatternError::Empty)));
    }
}
