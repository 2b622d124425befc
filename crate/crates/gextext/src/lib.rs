//! File formats, corpus parsers, the PubMed client and the command-line
//! front end for the `gextext-core` pipeline.

pub use gextext_core as core;

pub mod cli;
pub mod error;
pub mod fetch;
pub mod formats;
pub mod input;
pub mod jsonl;
pub mod manifest;
pub mod medline;
pub mod obo;

pub use error::{Error, Result};
