//! A small GloVe baseline: windowed co-occurrence counts over the whole
//! corpus vocabulary, AdaGrad training of the weighted least-squares
//! objective, and cosine similarity between target terms.
//!
//! Defaults follow common GloVe settings (`x_max = 10`, `alpha = 0.75`,
//! 15 epochs, learning rate 0.05, window 5, minimum count 1).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::TokenizedChunk;
use crate::error::{Error, Result};
use crate::similarity::{SimilarityKind, SimilarityMatrix};

pub const DEFAULT_WINDOW: usize = 5;

/// The corpus word list `W` with frequencies, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusVocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: BTreeMap<String, u32>,
}

impl CorpusVocabulary {
    /// Counts every token and keeps words seen at least `min_count` times,
    /// ordered by descending count then lexicographically.
    pub fn build(corpus: &[TokenizedChunk], min_count: u64) -> Self {
        let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
        for chunk in corpus {
            for t in &chunk.tokens {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut entries: Vec<(&str, u64)> = freq.into_iter().filter(|&(_, c)| c >= min_count.max(1)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let words: Vec<String> = entries.iter().map(|(w, _)| String::from(*w)).collect();
        let counts = entries.iter().map(|&(_, c)| c).collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        CorpusVocabulary { words, counts, index }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn position(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Symmetric distance-weighted co-occurrence counts, one entry per
/// unordered pair `(i, j)` with `i <= j`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooccurrenceCounts {
    entries: BTreeMap<(u32, u32), f64>,
}

impl CooccurrenceCounts {
    pub fn add(&mut self, a: u32, b: u32, weight: f64) {
        let key = if a <= b { (a, b) } else { (b, a) };
        *self.entries.entry(key).or_default() += weight;
    }

    pub fn get(&self, a: u32, b: u32) -> f64 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.entries.iter().map(|(&(a, b), &x)| (a, b, x))
    }
}

/// Adds `1 / d` for every pair of in-vocabulary tokens `d <= window`
/// positions apart within a chunk. Out-of-vocabulary tokens still occupy
/// their position.
pub fn window_cooccurrence(corpus: &[TokenizedChunk], vocab: &CorpusVocabulary, window: usize) -> CooccurrenceCounts {
    let mut counts = CooccurrenceCounts::default();
    for chunk in corpus {
        let ids: Vec<Option<u32>> = chunk.tokens.iter().map(|t| vocab.position(t)).collect();
        for (t, &left) in ids.iter().enumerate() {
            let Some(left) = left else { continue };
            for d in 1..=window {
                match ids.get(t + d) {
                    Some(&Some(right)) => counts.add(left, right, 1.0 / d as f64),
                    Some(None) => {}
                    None => break,
                }
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GloveParams {
    pub x_max: f64,
    pub alpha: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for GloveParams {
    fn default() -> Self {
        GloveParams {
            x_max: 10.0,
            alpha: 0.75,
            epochs: 15,
            learning_rate: 0.05,
            seed: 42,
        }
    }
}

/// Trained parameters. The representation of word `i` is the sum of its
/// main and context vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub dims: usize,
    pub main: Vec<f64>,
    pub context: Vec<f64>,
    pub bias_main: Vec<f64>,
    pub bias_context: Vec<f64>,
    /// Mean weighted squared residual over the entries of each epoch,
    /// measured before each entry's update.
    pub epoch_loss: Vec<f64>,
}

impl Embedding {
    pub fn rows(&self) -> usize {
        self.bias_main.len()
    }

    pub fn main_vector(&self, i: usize) -> &[f64] {
        &self.main[i * self.dims..(i + 1) * self.dims]
    }

    pub fn context_vector(&self, i: usize) -> &[f64] {
        &self.context[i * self.dims..(i + 1) * self.dims]
    }

    /// `w_i . c_j + b_i + b~_j - ln x`.
    pub fn residual(&self, i: usize, j: usize, x: f64) -> f64 {
        dot(self.main_vector(i), self.context_vector(j)) + self.bias_main[i] + self.bias_context[j] - libm::log(x)
    }

    pub fn word_vectors(&self, words: &[String]) -> WordVectors {
        assert_eq!(words.len(), self.rows());
        let data = self.main.iter().zip(&self.context).map(|(a, b)| a + b).collect();
        WordVectors::new(words.to_vec(), self.dims, data).expect("shape checked")
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn weight(x: f64, x_max: f64, alpha: f64) -> f64 {
    if x < x_max {
        libm::pow(x / x_max, alpha)
    } else {
        1.0
    }
}

/// Fits `rows` word vectors to `counts` with AdaGrad over shuffled nonzero
/// entries. Each unordered pair is trained in both orientations. Fully
/// determined by `params.seed`.
pub fn train_glove(counts: &CooccurrenceCounts, rows: usize, dims: usize, params: &GloveParams) -> Result<Embedding> {
    if counts.is_empty() {
        return Err(Error::EmptyCooccurrence);
    }
    if dims == 0 {
        return Err(Error::InvalidParameter("dims must be at least 1".into()));
    }
    let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * counts.len());
    for (a, b, x) in counts.iter() {
        if a as usize >= rows || b as usize >= rows {
            return Err(Error::InvalidParameter(alloc::format!(
                "pair ({a}, {b}) outside {rows} rows"
            )));
        }
        entries.push((a, b, x));
        if a != b {
            entries.push((b, a, x));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let scale = dims as f64;
    let mut init = |len: usize| -> Vec<f64> { (0..len).map(|_| (rng.random::<f64>() - 0.5) / scale).collect() };
    let mut emb = Embedding {
        dims,
        main: init(rows * dims),
        context: init(rows * dims),
        bias_main: init(rows),
        bias_context: init(rows),
        epoch_loss: Vec::with_capacity(params.epochs),
    };
    let mut grad_main = vec![1.0; rows * dims];
    let mut grad_context = vec![1.0; rows * dims];
    let mut grad_bias_main = vec![1.0; rows];
    let mut grad_bias_context = vec![1.0; rows];

    for epoch in 0..params.epochs {
        entries.shuffle(&mut rng);
        let mut loss = 0.0;
        for &(i, j, x) in &entries {
            let (i, j) = (i as usize, j as usize);
            let diff = emb.residual(i, j, x);
            let fdiff = weight(x, params.x_max, params.alpha) * diff;
            loss += fdiff * diff;
            let step = params.learning_rate * fdiff;
            let (wi, cj) = (i * dims, j * dims);
            for k in 0..dims {
                let g_main = step * emb.context[cj + k];
                let g_context = step * emb.main[wi + k];
                emb.main[wi + k] -= g_main / libm::sqrt(grad_main[wi + k]);
                emb.context[cj + k] -= g_context / libm::sqrt(grad_context[cj + k]);
                grad_main[wi + k] += g_main * g_main;
                grad_context[cj + k] += g_context * g_context;
            }
            emb.bias_main[i] -= step / libm::sqrt(grad_bias_main[i]);
            emb.bias_context[j] -= step / libm::sqrt(grad_bias_context[j]);
            grad_bias_main[i] += step * step;
            grad_bias_context[j] += step * step;
        }
        let loss = loss / entries.len() as f64;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        emb.epoch_loss.push(loss);
    }
    Ok(emb)
}

/// Final word representations, one row per word.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectors {
    words: Vec<String>,
    dims: usize,
    data: Vec<f64>,
    index: BTreeMap<String, usize>,
}

impl WordVectors {
    pub fn new(words: Vec<String>, dims: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != words.len() * dims {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} values for {} words of {dims} dims",
                data.len(),
                words.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "non-finite vector component {v}"
            )));
        }
        let mut index = BTreeMap::new();
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidParameter(alloc::format!("duplicate word `{w}`")));
            }
        }
        Ok(WordVectors {
            words,
            dims,
            data,
            index,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vector(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosineSimilarity {
    pub matrix: SimilarityMatrix,
    /// Terms none of whose words have a vector.
    pub dropped: Vec<String>,
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = libm::sqrt(dot(a, a));
    let nb = libm::sqrt(dot(b, b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine similarity between term vectors. A multi-word term is represented
/// by the mean of its in-vocabulary word vectors.
pub fn cosine_similarity_matrix(vectors: &WordVectors, terms: &[String]) -> Result<CosineSimilarity> {
    let mut labels = Vec::new();
    let mut term_vectors: Vec<Vec<f64>> = Vec::new();
    let mut dropped = Vec::new();
    for term in terms {
        let mut sum = vec![0.0; vectors.dims()];
        let mut found = 0usize;
        for word in term.split(' ') {
            if let Some(v) = vectors.get(word) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                found += 1;
            }
        }
        if found == 0 {
            dropped.push(term.clone());
            continue;
        }
        for s in &mut sum {
            *s /= found as f64;
        }
        labels.push(term.clone());
        term_vectors.push(sum);
    }
    if labels.is_empty() {
        return Err(Error::NoEmbeddableTerms);
    }
    let matrix = SimilarityMatrix::from_fn(SimilarityKind::Cosine, labels, |i, j| {
        cosine(&term_vectors[i], &term_vectors[j])
    });
    Ok(CosineSimilarity { matrix, dropped })
}
