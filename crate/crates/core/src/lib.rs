//! Algorithmic core of the gextext pipeline.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std`: tokenization and dictionary matching, the
//! covariance-sign graph inference with geodesic similarity, ontology-based
//! reference metrics, a small GloVe baseline, Spearman evaluation and a
//! planted-graph corpus generator. File formats, the command line and network
//! access live in the `gextext` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod eval;
pub mod glove;
pub mod graph;
pub mod ontology;
pub mod similarity;
pub mod stats;
pub mod synth;
pub mod vocab;

pub use corpus::{tokenize_chunk, Chunk, TokenizedChunk};
pub use error::{Error, Result};
pub use graph::{InferredGraph, PairCounts};
pub use similarity::{SimilarityKind, SimilarityMatrix};
pub use vocab::{OccurrenceMatrix, Vocabulary};
