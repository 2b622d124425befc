//! Covariance-sign edge inference and geodesic similarity.
//!
//! Two terms are joined when their occurrence indicators have strictly
//! positive covariance over the chunks. The sign test is done on the integral
//! sufficient statistics: with `n` chunks, per-term counts `r` and pairwise
//! co-occurrence counts `c`, the population covariance is
//! `c_ij / n - r_i r_j / n^2`, which has the sign of `n c_ij - r_i r_j`.
//! Similarity between two terms is then the inverse hop distance on the
//! inferred graph, or zero when no path exists.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::similarity::{SimilarityKind, SimilarityMatrix};
use crate::vocab::OccurrenceMatrix;

/// Sufficient statistics of the occurrence matrix for its covariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCounts {
    terms: Vec<String>,
    n: u64,
    occurrences: Vec<u64>,
    /// Dense symmetric p × p; the diagonal equals `occurrences`.
    cooccurrences: Vec<u64>,
}

impl PairCounts {
    pub fn from_matrix(x: &OccurrenceMatrix) -> Self {
        let p = x.p();
        let mut occurrences = vec![0u64; p];
        let mut cooccurrences = vec![0u64; p * p];
        for row in x.rows() {
            for (k, &a) in row.iter().enumerate() {
                let a = a as usize;
                occurrences[a] += 1;
                for &b in &row[k..] {
                    cooccurrences[a * p + b as usize] += 1;
                }
            }
        }
        // rows are sorted, so only the upper triangle was filled
        for a in 0..p {
            for b in 0..a {
                cooccurrences[a * p + b] = cooccurrences[b * p + a];
            }
        }
        PairCounts {
            terms: x.terms().terms().to_vec(),
            n: x.n() as u64,
            occurrences,
            cooccurrences,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> usize {
        self.terms.len()
    }

    pub fn occurrences(&self, i: usize) -> u64 {
        self.occurrences[i]
    }

    pub fn cooccurrences(&self, i: usize, j: usize) -> u64 {
        self.cooccurrences[i * self.p() + j]
    }

    /// `n c_ij - r_i r_j`, which has the sign of the covariance of columns
    /// `i` and `j`.
    pub fn scaled_covariance(&self, i: usize, j: usize) -> i128 {
        let n = self.n as i128;
        n * self.cooccurrences(i, j) as i128 - self.occurrences[i] as i128 * self.occurrences[j] as i128
    }

    /// Fraction of unordered distinct pairs that co-occur in at least one chunk.
    pub fn cooccurring_fraction(&self) -> f64 {
        let p = self.p();
        if p < 2 {
            return 0.0;
        }
        let mut hits = 0usize;
        for i in 0..p {
            for j in i + 1..p {
                if self.cooccurrences(i, j) > 0 {
                    hits += 1;
                }
            }
        }
        hits as f64 / (p * (p - 1) / 2) as f64
    }
}

/// Population covariance of the occurrence columns (divisor `n`), evaluated
/// directly from the centred indicator values in floating point.
#[allow(clippy::needless_range_loop)]
pub fn covariance_matrix(x: &OccurrenceMatrix) -> Vec<Vec<f64>> {
    let n = x.n() as f64;
    let p = x.p();
    let dense = x.to_dense();
    let means: Vec<f64> = (0..p)
        .map(|j| dense.iter().map(|row| row[j] as f64).sum::<f64>() / n)
        .collect();
    let mut cov = vec![vec![0.0; p]; p];
    for row in &dense {
        for i in 0..p {
            let di = row[i] as f64 - means[i];
            for j in i..p {
                cov[i][j] += di * (row[j] as f64 - means[j]);
            }
        }
    }
    for i in 0..p {
        for j in i..p {
            cov[i][j] /= n;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// Undirected simple graph over labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferredGraph {
    terms: Vec<String>,
    /// Sorted neighbour lists.
    neighbors: Vec<Vec<usize>>,
}

impl InferredGraph {
    /// Builds a graph from unordered edges; duplicates are merged.
    pub fn from_edges(terms: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let p = terms.len();
        let mut neighbors = vec![Vec::new(); p];
        for (a, b) in edges {
            if a >= p || b >= p {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {p} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on `{}`", terms[a])));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(InferredGraph { terms, neighbors })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn vertex_count(&self) -> usize {
        self.terms.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(a, b)` with `a < b`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn isolated(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.terms.len()).filter(|&v| self.neighbors[v].is_empty())
    }
}

/// Joins every pair of distinct terms whose covariance is strictly positive.
pub fn infer_graph(pc: &PairCounts) -> InferredGraph {
    let p = pc.p();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if pc.scaled_covariance(i, j) > 0 {
                edges.push((i, j));
            }
        }
    }
    InferredGraph::from_edges(pc.terms().to_vec(), edges).expect("edges are in range and loop-free")
}

/// Hop counts between every pair of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    p: usize,
    hops: Vec<u32>,
}

impl Distances {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn get(&self, a: usize, b: usize) -> Option<u32> {
        match self.hops[a * self.p + b] {
            Self::UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn len(&self) -> usize {
        self.p
    }

    pub fn is_empty(&self) -> bool {
        self.p == 0
    }
}

/// Unweighted all-pairs shortest paths by one breadth-first search per vertex.
pub fn all_pairs_hops(g: &InferredGraph) -> Distances {
    let p = g.vertex_count();
    let mut hops = vec![Distances::UNREACHABLE; p * p];
    let mut queue = VecDeque::new();
    for source in 0..p {
        let row = &mut hops[source * p..(source + 1) * p];
        row[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let next = row[v] + 1;
            for &w in g.neighbors(v) {
                if row[w] == Distances::UNREACHABLE {
                    row[w] = next;
                    queue.push_back(w);
                }
            }
        }
    }
    Distances { p, hops }
}

/// `1 / d` for connected pairs, `0` for disconnected ones; the diagonal is
/// fixed at `1` and is never used in evaluation.
pub fn geodesic_similarity(g: &InferredGraph) -> SimilarityMatrix {
    let d = all_pairs_hops(g);
    SimilarityMatrix::from_fn(SimilarityKind::Geodesic, g.terms().to_vec(), |i, j| {
        if i == j {
            return 1.0;
        }
        match d.get(i, j) {
            Some(hops) => 1.0 / hops as f64,
            None => 0.0,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    /// `2|E| / (p (p - 1))`; zero when fewer than two vertices.
    pub density: f64,
    pub density_defined: bool,
    pub isolated_fraction: f64,
}

pub fn graph_stats(g: &InferredGraph) -> GraphStats {
    let p = g.vertex_count();
    let edges = g.edge_count();
    let density_defined = p >= 2;
    let density = if density_defined {
        2.0 * edges as f64 / (p * (p - 1)) as f64
    } else {
        0.0
    };
    let isolated_fraction = if p == 0 {
        0.0
    } else {
        g.isolated().count() as f64 / p as f64
    };
    GraphStats {
        vertices: p,
        edges,
        density,
        density_defined,
        isolated_fraction,
    }
}
