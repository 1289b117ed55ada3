//! Subdivision operators and operator words.

pub mod apply;
pub mod net;
pub mod word;

pub use apply::{apply_a, apply_b, apply_factor, apply_r, apply_v, apply_word, RoundInfo, Step};
pub use net::{apply_word_net, trace_word, Trace};
pub use word::{classify_word, parse_valid_word, parse_word, BParams, Factor, OperatorWord, WordClass};
