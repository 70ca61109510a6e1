//! Partial parsing of POS-tagged text with structural tags.

pub mod error;
pub mod eval;
pub mod features;
pub mod inventory;
pub mod maxent;
pub mod modelio;
pub mod ngram;
pub mod source;
pub mod synthetic;
pub mod corpus;
pub mod decoder;
pub mod treebank;
pub mod vocab;
