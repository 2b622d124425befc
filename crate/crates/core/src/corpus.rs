//! Chunks of corpus text and their 1–3-gram token sets.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

/// Longest n-gram generated per chunk.
pub const MAX_GRAM: usize = 3;

/// One unit of co-occurrence context, typically a single abstract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub id: String,
    pub text: String,
}

impl Chunk {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Chunk {
            id: id.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedChunk {
    pub id: String,
    pub tokens: Vec<String>,
    /// Every contiguous 1-, 2- and 3-token window, joined by single spaces.
    pub grams: BTreeSet<String>,
}

/// Lowercases `text` and splits it on every character that is not a letter
/// or digit, dropping empty fragments.
///
/// Lowercasing uses the simple (single character) mapping, so `İ` becomes
/// `i` rather than `i` followed by a combining dot.
pub fn normalize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            let lower = ch.to_lowercase().next().unwrap_or(ch);
            current.push(lower);
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// All distinct n-grams of `tokens` for n in `1..=MAX_GRAM`.
pub fn grams(tokens: &[String]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for n in 1..=MAX_GRAM {
        for window in tokens.windows(n) {
            out.insert(window.join(" "));
        }
    }
    out
}

pub fn tokenize_chunk(chunk: &Chunk) -> TokenizedChunk {
    let tokens = normalize(&chunk.text);
    let grams = grams(&tokens);
    TokenizedChunk {
        id: chunk.id.clone(),
        tokens,
        grams,
    }
}

pub fn tokenize_corpus(chunks: &[Chunk]) -> Vec<TokenizedChunk> {
    chunks.iter().map(tokenize_chunk).collect()
}
