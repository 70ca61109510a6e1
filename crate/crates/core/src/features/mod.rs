//! Feature patterns over trigram contexts, their instantiation from training
//! data, and activation lookup.

mod instance;
mod pattern;
mod symbols;

pub use instance::{extract_features, is_active, rel_sibl, Constraint, Context, FeatureInstance, FeatureSet, Value};
pub use pattern::{default_patterns, parse_patterns, write_patterns, AttributeMask, FeaturePattern, POSITIONS};
pub use symbols::{SymbolTable, TagCode, BOUNDARY, UNKNOWN};
