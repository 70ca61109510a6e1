//! Shared plumbing for the text model formats: a magic first line, `key
//! value` header lines and a trailing SHA-256 checksum line.

use sha2::{Digest, Sha256};

use crate::error::ModelError;

const CHECKSUM_KEY: &str = "checksum sha256 ";

fn digest(body: &str) -> String {
    let hash = Sha256::digest(body.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// Appends the checksum line.
pub fn seal(mut body: String) -> String {
    if !body.ends_with('\n') {
        body.push('\n');
    }
    let sum = digest(&body);
    body.push_str(CHECKSUM_KEY);
    body.push_str(&sum);
    body.push('\n');
    body
}

/// Verifies and strips the checksum line.
pub fn unseal(text: &str) -> Result<&str, ModelError> {
    let trimmed = text.strip_suffix('\n').unwrap_or(text);
    let cut = trimmed.rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = trimmed.split_at(cut);
    match last.strip_prefix(CHECKSUM_KEY) {
        Some(sum) if sum == digest(body) => Ok(body),
        _ => Err(ModelError::Checksum),
    }
}

/// Checks the `<magic> <version>` line.
pub fn check_magic<'a>(body: &'a str, magic: &str, version: u32) -> Result<Lines<'a>, ModelError> {
    let mut lines = Lines::new(body);
    let (_, first) = lines.next_line()?;
    let Some(rest) = first.strip_prefix(magic).and_then(|r| r.strip_prefix(' ')) else {
        return Err(ModelError::WrongKind {
            expected: magic.to_string(),
        });
    };
    if rest != version.to_string() {
        return Err(ModelError::Version {
            found: rest.to_string(),
            expected: version,
        });
    }
    Ok(lines)
}

/// The magic word of a model text, if it has a first line.
pub fn magic_of(text: &str) -> Option<&str> {
    text.lines().next()?.split_whitespace().next()
}

/// Line cursor with 1-based numbers for error messages.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    pub fn next_line(&mut self) -> Result<(usize, &'a str), ModelError> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l))
            }
            None => Err(ModelError::format(self.last + 1, "unexpected end of model")),
        }
    }

    /// Reads `key value` and returns the value.
    pub fn field(&mut self, key: &str) -> Result<(usize, &'a str), ModelError> {
        let (no, line) = self.next_line()?;
        match line.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok((no, rest.trim_start())),
            _ => Err(ModelError::format(no, format!("expected {key:?}"))),
        }
    }

    pub fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ModelError> {
        let (no, v) = self.field(key)?;
        v.parse().map_err(|_| ModelError::format(no, format!("bad value for {key}: {v:?}")))
    }

    pub fn end(mut self) -> Result<(), ModelError> {
        match self.inner.next() {
            None => Ok(()),
            Some((i, _)) => Err(ModelError::format(i + 1, "trailing content")),
        }
    }
}

pub fn parse_f64(no: usize, s: &str) -> Result<f64, ModelError> {
    let v: f64 = s.parse().map_err(|_| ModelError::format(no, format!("bad number {s:?}")))?;
    if !v.is_finite() {
        return Err(ModelError::format(no, format!("non-finite number {s:?}")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seal_and_unseal() {
        let text = seal("demo 1\nx 2\n".to_string());
        assert_eq!(unseal(&text).unwrap(), "demo 1\nx 2\n");
        assert!(matches!(unseal(&text[..text.len() - 10]), Err(ModelError::Checksum)));
        assert!(matches!(unseal(&text.replace("x 2", "x 3")), Err(ModelError::Checksum)));
        assert!(matches!(unseal("demo 1\n"), Err(ModelError::Checksum)));
        let mut l = check_magic(unseal(&text).unwrap(), "demo", 1).unwrap();
        assert_eq!(l.parsed::<u32>("x").unwrap(), 2);
        assert!(matches!(check_magic("demo 2\n", "demo", 1), Err(ModelError::Version { .. })));
        assert!(matches!(check_magic("other 1\n", "demo", 1), Err(ModelError::WrongKind { .. })));
    }
}
