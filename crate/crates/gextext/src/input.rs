//! Loading corpora and term lists from disk.

use std::path::Path;

use gextext_core::corpus::tokenize_chunk;
use gextext_core::{Chunk, TokenizedChunk};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formats;
use crate::jsonl::parse_jsonl;
use crate::medline::parse_medline;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CorpusFormat {
    Medline,
    Jsonl,
}

impl CorpusFormat {
    /// `.jsonl` and `.json` are JSON lines; `.txt`, `.medline` and `.nbib`
    /// are Medline.
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "json" | "ndjson" => Some(CorpusFormat::Jsonl),
            "txt" | "medline" | "nbib" => Some(CorpusFormat::Medline),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CorpusFormat::Medline => "medline",
            CorpusFormat::Jsonl => "jsonl",
        }
    }
}

pub fn resolve_format(path: &Path, format: Option<CorpusFormat>) -> Result<CorpusFormat> {
    format.or_else(|| CorpusFormat::from_extension(path)).ok_or_else(|| {
        Error::Usage(format!(
            "cannot infer the corpus format of {}; pass --format",
            path.display()
        ))
    })
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Chunk>> {
    let reader = formats::open(path)?;
    let chunks = match format {
        CorpusFormat::Jsonl => parse_jsonl(reader)?,
        CorpusFormat::Medline => {
            let parsed = parse_medline(reader)?;
            if parsed.skipped_without_abstract + parsed.skipped_without_pmid > 0 {
                log::info!(
                    "{}: skipped {} records without abstract and {} without PMID",
                    path.display(),
                    parsed.skipped_without_abstract,
                    parsed.skipped_without_pmid
                );
            }
            parsed.chunks
        }
    };
    if chunks.is_empty() {
        return Err(gextext_core::Error::EmptyCorpus.into());
    }
    Ok(chunks)
}

/// Draws `k` chunks without replacement, keeping corpus order.
pub fn sample_chunks(chunks: Vec<Chunk>, k: usize, seed: u64) -> Result<Vec<Chunk>> {
    if k == 0 {
        return Err(Error::Usage("--sample must be at least 1".into()));
    }
    if k >= chunks.len() {
        if k > chunks.len() {
            log::warn!("--sample {k} exceeds corpus size {}; using every chunk", chunks.len());
        }
        return Ok(chunks);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, chunks.len(), k).into_vec();
    picked.sort_unstable();
    let mut keep = vec![false; chunks.len()];
    for i in picked {
        keep[i] = true;
    }
    Ok(chunks
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect())
}

pub fn tokenize_parallel(chunks: &[Chunk]) -> Vec<TokenizedChunk> {
    chunks.par_iter().map(tokenize_chunk).collect()
}

/// Terms to score: the restricted terms of an occurrence matrix, or every
/// term of a vocabulary file.
pub fn load_terms(vocab: Option<&Path>, occurrence: Option<&Path>) -> Result<Vec<String>> {
    match (vocab, occurrence) {
        (_, Some(path)) => Ok(formats::read_occurrence(path)?.terms().terms().to_vec()),
        (Some(path), None) => Ok(formats::read_vocabulary(path)?.terms().to_vec()),
        (None, None) => Err(Error::Usage("one of --vocab or --occurrence is required".into())),
    }
}
