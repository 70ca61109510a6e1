//! Tokens, chunk trees, structural tags and the codec between them.

pub mod bracket;
pub mod codec;
pub mod random;
pub mod tree;
pub mod types;
pub mod validate;

pub use bracket::{parse_sentence, BracketError};
pub use codec::{decode_tags, decode_with_words, encodability_issues, encode_tree, Decoded, EncodabilityIssue, Repair, RepairKind};
pub use tree::{Child, ChunkTree, Constituent, Node, Token, TreeBuilder, MAX_LEAF_DEPTH};
pub use types::{pos_projection, PhraseCat, PosTag, RelValue, StructuralTag, TagSequence};
pub use validate::{validate_tree, Item, Violation, ViolationKind};
