//! Bracketed notation for one sentence: `(CAT child ...)` for nodes,
//! `(POS word)` or `(POS)` for leaves. A `-FUNC` suffix on a label carries a
//! grammatical function. Parentheses inside words are written `-LRB-`/`-RRB-`.

use thiserror::Error;

use super::tree::{unescape_word, ChunkTree, Token, TreeBuilder};
use super::types::{PhraseCat, PosTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct BracketError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(s: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in s.char_indices() {
        let boundary = ch == '(' || ch == ')' || ch.is_whitespace();
        if boundary {
            if let Some(st) = start.take() {
                out.push((st, Tok::Atom(&s[st..i])));
            }
            match ch {
                '(' => out.push((i, Tok::Open)),
                ')' => out.push((i, Tok::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st, Tok::Atom(&s[st..])));
    }
    out
}

fn split_func(label: &str) -> (&str, Option<String>) {
    match label.find('-') {
        Some(i) if i > 0 && i + 1 < label.len() => (&label[..i], Some(label[i + 1..].to_string())),
        _ => (label, None),
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
    builder: TreeBuilder,
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> BracketError {
        let column = self.toks.get(self.pos).map_or(self.end, |t| t.0) + 1;
        BracketError {
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn item(&mut self) -> Result<(), BracketError> {
        if self.peek() != Some(&Tok::Open) {
            return Err(self.err("expected '('"));
        }
        self.pos += 1;
        let label = match self.peek() {
            Some(Tok::Atom(a)) => *a,
            _ => return Err(self.err("expected a label after '('")),
        };
        self.pos += 1;
        let (symbol, func) = split_func(label);
        match self.peek() {
            Some(Tok::Open) => {
                let cat = PhraseCat::label(symbol).map_err(|e| self.err(e.to_string()))?;
                self.builder.open_with_func(cat, func);
                while self.peek() == Some(&Tok::Open) {
                    self.item()?;
                }
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.err("expected ')' closing node"));
                }
                self.pos += 1;
                self.builder.close();
            }
            Some(Tok::Close) | Some(Tok::Atom(_)) => {
                let pos = PosTag::new(symbol).map_err(|e| self.err(e.to_string()))?;
                let word = match self.peek() {
                    Some(Tok::Atom(w)) => {
                        let w = unescape_word(w);
                        self.pos += 1;
                        Some(w)
                    }
                    _ => None,
                };
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.err("expected ')' after leaf"));
                }
                self.pos += 1;
                let mut token = Token::new(word, pos);
                token.func = func;
                self.builder.leaf(token);
            }
            None => return Err(self.err("unexpected end of input")),
        }
        Ok(())
    }
}

/// Parses one sentence; the empty string yields an empty tree.
pub fn parse_sentence(s: &str) -> Result<ChunkTree, BracketError> {
    let mut p = Parser {
        toks: tokenize(s),
        pos: 0,
        end: s.len(),
        builder: TreeBuilder::new(),
    };
    while p.pos < p.toks.len() {
        if p.peek() == Some(&Tok::Close) {
            return Err(p.err("unbalanced ')'"));
        }
        p.item()?;
    }
    Ok(p.builder.finish())
}
