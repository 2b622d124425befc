//! Synthetic corpora generated from a known ("planted") term graph, used to
//! check that inference recovers the graph end to end.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Chunk;
use crate::error::{Error, Result};
use crate::graph::InferredGraph;

const MAX_GRAPH_ATTEMPTS: usize = 10_000;

/// Tokens placed between terms. None of them is a term name.
const FILLER: &[&str] = &[
    "the",
    "of",
    "and",
    "in",
    "patients",
    "with",
    "expression",
    "was",
    "associated",
    "study",
    "results",
    "cells",
    "analysis",
    "we",
    "found",
    "increased",
    "levels",
    "risk",
    "clinical",
    "protein",
    "role",
    "data",
    "showed",
    "significant",
    "treatment",
    "response",
    "tumor",
    "cohort",
    "model",
    "pathway",
    "observed",
    "between",
    "these",
    "mutation",
    "samples",
    "mechanism",
    "activity",
    "factor",
    "regulation",
    "signaling",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedParams {
    /// Number of synthetic terms before restriction to those that occur.
    pub terms: usize,
    /// Erdős–Rényi edge probability of the planted graph.
    pub density: f64,
    pub chunks: usize,
    /// Probability that each term outside the sampled edge joins a chunk.
    pub noise_rate: f64,
    /// Filler tokens between consecutive terms, drawn uniformly from
    /// `filler_min..=filler_max`.
    pub filler_min: usize,
    pub filler_max: usize,
    pub seed: u64,
}

impl Default for PlantedParams {
    fn default() -> Self {
        PlantedParams {
            terms: 30,
            density: 0.1,
            chunks: 2000,
            noise_rate: 0.05,
            filler_min: 4,
            filler_max: 16,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedWorld {
    pub params: PlantedParams,
    /// Planted graph over the terms that occur in at least one chunk.
    pub true_graph: InferredGraph,
    pub chunks: Vec<Chunk>,
}

impl PlantedWorld {
    pub fn terms(&self) -> &[String] {
        self.true_graph.terms()
    }
}

pub fn term_name(i: usize) -> String {
    format!("disorder{i:03}")
}

/// Samples a graph with no isolated vertex, then emits one chunk per step:
/// both endpoints of a uniformly chosen edge, plus every other term with
/// probability `noise_rate`, shuffled and separated by filler tokens.
pub fn synthesize_corpus(params: PlantedParams) -> Result<PlantedWorld> {
    let p = params.terms;
    if p < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 terms, got {p}")));
    }
    if !(params.density > 0.0 && params.density <= 1.0) {
        if params.density == 0.0 {
            return Err(Error::NoPlantedEdges);
        }
        return Err(Error::InvalidParameter(format!(
            "density {} outside (0, 1]",
            params.density
        )));
    }
    if !(0.0..=1.0).contains(&params.noise_rate) {
        return Err(Error::InvalidParameter(format!(
            "noise rate {} outside [0, 1]",
            params.noise_rate
        )));
    }
    if params.chunks == 0 {
        return Err(Error::InvalidParameter("need at least one chunk".into()));
    }
    if params.filler_min > params.filler_max {
        return Err(Error::InvalidParameter("filler_min exceeds filler_max".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let edges = sample_graph(&mut rng, p, params.density)?;

    let names: Vec<String> = (0..p).map(term_name).collect();
    let mut appears = vec![false; p];
    let mut chunks = Vec::with_capacity(params.chunks);
    let mut members = Vec::new();
    for k in 0..params.chunks {
        let (a, b) = edges[rng.random_range(0..edges.len())];
        members.clear();
        members.push(a);
        members.push(b);
        for t in 0..p {
            if t != a && t != b && rng.random_bool(params.noise_rate) {
                members.push(t);
            }
        }
        members.shuffle(&mut rng);
        let mut words: Vec<&str> = Vec::new();
        for (pos, &t) in members.iter().enumerate() {
            if pos > 0 {
                let gap = rng.random_range(params.filler_min..=params.filler_max);
                for _ in 0..gap {
                    words.push(FILLER[rng.random_range(0..FILLER.len())]);
                }
            }
            words.push(&names[t]);
            appears[t] = true;
        }
        chunks.push(Chunk::new(format!("synth{k:06}"), words.join(" ")));
    }

    // keep only terms that occur, as inference does
    let mut remap = vec![usize::MAX; p];
    let mut kept = Vec::new();
    for t in 0..p {
        if appears[t] {
            remap[t] = kept.len();
            kept.push(names[t].clone());
        }
    }
    let kept_edges = edges
        .iter()
        .filter(|&&(a, b)| appears[a] && appears[b])
        .map(|&(a, b)| (remap[a], remap[b]));
    let true_graph = InferredGraph::from_edges(kept, kept_edges)?;
    Ok(PlantedWorld {
        params,
        true_graph,
        chunks,
    })
}

fn sample_graph(rng: &mut ChaCha8Rng, p: usize, density: f64) -> Result<Vec<(usize, usize)>> {
    let mut saw_edges = false;
    for _ in 0..MAX_GRAPH_ATTEMPTS {
        let mut edges = Vec::new();
        let mut degree = vec![0usize; p];
        for a in 0..p {
            for b in a + 1..p {
                if rng.random_bool(density) {
                    edges.push((a, b));
                    degree[a] += 1;
                    degree[b] += 1;
                }
            }
        }
        saw_edges |= !edges.is_empty();
        if !edges.is_empty() && degree.iter().all(|&d| d > 0) {
            return Ok(edges);
        }
    }
    if saw_edges {
        Err(Error::InvalidParameter(format!(
            "no graph without isolated vertices after {MAX_GRAPH_ATTEMPTS} draws at density {density}"
        )))
    } else {
        Err(Error::NoPlantedEdges)
    }
}
