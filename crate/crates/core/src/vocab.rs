//! Target vocabulary and the binary chunk × term occurrence matrix.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{normalize, TokenizedChunk, MAX_GRAM};
use crate::error::{Error, Result};

/// Ordered set of normalized query terms, each 1 to 3 tokens long.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: BTreeMap<String, usize>,
}

/// A vocabulary input line that did not become a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedLine {
    /// 1-based line number.
    pub line: usize,
    pub text: String,
    pub tokens: usize,
}

impl Vocabulary {
    /// Builds a vocabulary from already-normalized terms, keeping the first
    /// occurrence of duplicates.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for term in terms {
            vocab.push(term.into());
        }
        vocab
    }

    /// Normalizes each line exactly as chunk text is normalized. Lines with
    /// zero or more than three tokens are dropped and returned alongside.
    pub fn load<I, S>(lines: I) -> Result<(Self, Vec<DroppedLine>)>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut vocab = Vocabulary::default();
        let mut dropped = Vec::new();
        for (i, line) in lines.into_iter().enumerate() {
            let line = line.as_ref();
            let tokens = normalize(line);
            if tokens.is_empty() || tokens.len() > MAX_GRAM {
                // blank lines are not worth reporting
                if !line.trim().is_empty() {
                    dropped.push(DroppedLine {
                        line: i + 1,
                        text: String::from(line),
                        tokens: tokens.len(),
                    });
                }
                continue;
            }
            vocab.push(tokens.join(" "));
        }
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        Ok((vocab, dropped))
    }

    fn push(&mut self, term: String) {
        if !self.index.contains_key(&term) {
            self.index.insert(term.clone(), self.terms.len());
            self.terms.push(term);
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn get(&self, i: usize) -> Option<&str> {
        self.terms.get(i).map(String::as_str)
    }
}

/// Binary n × p indicator of which vocabulary terms occur in which chunks.
///
/// Stored sparsely: one sorted list of column indices per chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceMatrix {
    chunk_ids: Vec<String>,
    terms: Vocabulary,
    rows: Vec<Vec<u32>>,
}

impl OccurrenceMatrix {
    /// Assembles a matrix from explicit rows, checking every invariant:
    /// one row per chunk, column indices in range, and no all-zero column.
    pub fn from_rows(chunk_ids: Vec<String>, terms: Vocabulary, mut rows: Vec<Vec<u32>>) -> Result<Self> {
        if chunk_ids.len() != rows.len() {
            return Err(Error::InvalidOccurrence(format!(
                "{} chunk ids but {} rows",
                chunk_ids.len(),
                rows.len()
            )));
        }
        if chunk_ids.is_empty() || terms.is_empty() {
            return Err(Error::EmptyOccurrenceMatrix);
        }
        let p = terms.len();
        let mut column_seen = vec![false; p];
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            for &j in row.iter() {
                let j = j as usize;
                if j >= p {
                    return Err(Error::InvalidOccurrence(format!(
                        "column {j} out of range for {p} terms"
                    )));
                }
                column_seen[j] = true;
            }
        }
        if let Some(j) = column_seen.iter().position(|seen| !seen) {
            return Err(Error::InvalidOccurrence(format!(
                "term `{}` never occurs",
                terms.terms()[j]
            )));
        }
        Ok(OccurrenceMatrix { chunk_ids, terms, rows })
    }

    /// Number of chunks.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Number of (restricted) terms.
    pub fn p(&self) -> usize {
        self.terms.len()
    }

    pub fn chunk_ids(&self) -> &[String] {
        &self.chunk_ids
    }

    pub fn terms(&self) -> &Vocabulary {
        &self.terms
    }

    /// Sorted term columns present in chunk `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.p()];
        for row in &self.rows {
            for &j in row {
                sums[j as usize] += 1;
            }
        }
        sums
    }

    /// Number of nonzero cells.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0u8; self.p()];
                for &j in row {
                    dense[j as usize] = 1;
                }
                dense
            })
            .collect()
    }
}

/// Marks each vocabulary term present in a chunk's gram set, then drops the
/// terms that occur nowhere.
///
/// Matching is gram-set membership: a term matches iff its token sequence
/// appears contiguously, so a term nested inside a longer one also matches.
pub fn build_occurrence_matrix(corpus: &[TokenizedChunk], vocab: &Vocabulary) -> Result<OccurrenceMatrix> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let raw: Vec<Vec<u32>> = corpus.iter().map(|chunk| match_chunk(chunk, vocab)).collect();

    let mut used = vec![false; vocab.len()];
    for row in &raw {
        for &j in row {
            used[j as usize] = true;
        }
    }
    // old column -> new column
    let mut remap = vec![u32::MAX; vocab.len()];
    let mut kept = Vec::new();
    for (j, term) in vocab.terms().iter().enumerate() {
        if used[j] {
            remap[j] = kept.len() as u32;
            kept.push(term.clone());
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyOccurrenceMatrix);
    }
    let rows = raw
        .into_iter()
        .map(|row| {
            let mut row: Vec<u32> = row.into_iter().map(|j| remap[j as usize]).collect();
            row.sort_unstable();
            row
        })
        .collect();
    let chunk_ids = corpus.iter().map(|c| c.id.clone()).collect();
    Ok(OccurrenceMatrix {
        chunk_ids,
        terms: Vocabulary::from_terms(kept),
        rows,
    })
}

/// Vocabulary columns (sorted) whose term is one of the chunk's grams.
pub fn match_chunk(chunk: &TokenizedChunk, vocab: &Vocabulary) -> Vec<u32> {
    let mut row: Vec<u32> = if chunk.grams.len() < vocab.len() {
        chunk
            .grams
            .iter()
            .filter_map(|g| vocab.position(g))
            .map(|j| j as u32)
            .collect()
    } else {
        vocab
            .terms()
            .iter()
            .enumerate()
            .filter(|(_, t)| chunk.grams.contains(t.as_str()))
            .map(|(j, _)| j as u32)
            .collect()
    };
    row.sort_unstable();
    row
}
