//! Comparison-counting laboratory for heap-based sorting.
pub mod binomial_queue;
pub mod combinatorics;
pub mod error;
pub mod experiment;
pub mod heap_core;
pub mod probe;
pub mod run_partition;
pub mod trie_model;
pub mod uniformity_lab;
pub use error::{Error, Result};
