//! `is_a` ontologies and the reference similarity measures computed on them.
//!
//! Information content is estimated from structure alone:
//! `prob(t) = (|descendants(t)| + 1) / N` and `ic(t) = -ln prob(t)`, where
//! `N` counts every term including a virtual root when one is inserted.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::normalize;
use crate::error::{Error, Result};
use crate::similarity::{SimilarityKind, SimilarityMatrix};

/// Id of the root added above several top-level terms.
pub const VIRTUAL_ROOT_ID: &str = "_virtual_root";

pub const DEFAULT_WANG_DECAY: f64 = 0.8;

/// A term as read from a file, before the graph is checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermRecord {
    pub id: String,
    pub name: String,
    pub parents: Vec<String>,
}

impl TermRecord {
    pub fn new(id: impl Into<String>, name: impl Into<String>, parents: &[&str]) -> Self {
        TermRecord {
            id: id.into(),
            name: name.into(),
            parents: parents.iter().map(|p| String::from(*p)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ontology {
    ids: Vec<String>,
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    /// Ancestors of each term including itself, sorted.
    ancestors: Vec<Vec<usize>>,
    virtual_root: Option<usize>,
}

impl Ontology {
    /// Checks ids, parent references and acyclicity, and adds a virtual root
    /// when there is more than one top-level term.
    pub fn new(records: Vec<TermRecord>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateTerm(r.id.clone()));
            }
        }
        let mut parents = Vec::with_capacity(records.len());
        for r in &records {
            let mut ps = Vec::with_capacity(r.parents.len());
            for p in &r.parents {
                let &pi = index.get(p).ok_or_else(|| Error::UnknownParent {
                    child: r.id.clone(),
                    parent: p.clone(),
                })?;
                ps.push(pi);
            }
            ps.sort_unstable();
            ps.dedup();
            parents.push(ps);
        }
        let mut ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
        let mut names: Vec<String> = records.into_iter().map(|r| r.name).collect();

        if let Some(v) = find_cycle(&parents) {
            return Err(Error::Cycle(ids[v].clone()));
        }

        let roots: Vec<usize> = (0..ids.len()).filter(|&i| parents[i].is_empty()).collect();
        let mut virtual_root = None;
        if roots.len() > 1 {
            let root = ids.len();
            ids.push(String::from(VIRTUAL_ROOT_ID));
            names.push(String::from(VIRTUAL_ROOT_ID));
            index.insert(String::from(VIRTUAL_ROOT_ID), root);
            parents.push(Vec::new());
            for r in roots {
                parents[r].push(root);
            }
            virtual_root = Some(root);
        }

        let mut children = vec![Vec::new(); ids.len()];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let ancestors = (0..ids.len()).map(|t| collect_upward(&parents, t)).collect();
        Ok(Ontology {
            ids,
            names,
            index,
            parents,
            children,
            ancestors,
            virtual_root,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, t: usize) -> &str {
        &self.ids[t]
    }

    pub fn name(&self, t: usize) -> &str {
        &self.names[t]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownTerm(String::from(id)))
    }

    pub fn parents(&self, t: usize) -> &[usize] {
        &self.parents[t]
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    /// Ancestors of `t` including `t` itself, sorted by index.
    pub fn ancestors(&self, t: usize) -> &[usize] {
        &self.ancestors[t]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&t| self.parents[t].is_empty())
    }

    pub fn virtual_root(&self) -> Option<usize> {
        self.virtual_root
    }

    /// Edges `(child, parent)`.
    pub fn is_a_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (c, p)))
    }

    /// Maps normalized term names to term indices. When two terms share a
    /// normalized name the first one wins.
    pub fn name_index(&self) -> BTreeMap<String, usize> {
        let mut map = BTreeMap::new();
        for t in 0..self.len() {
            if Some(t) == self.virtual_root {
                continue;
            }
            let key = normalize(&self.names[t]).join(" ");
            if !key.is_empty() {
                map.entry(key).or_insert(t);
            }
        }
        map
    }
}

fn collect_upward(parents: &[Vec<usize>], t: usize) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![t];
    while let Some(v) = stack.pop() {
        if seen.insert(v) {
            stack.extend(parents[v].iter().copied());
        }
    }
    seen.into_iter().collect()
}

/// Returns a vertex on some directed cycle, if any.
fn find_cycle(parents: &[Vec<usize>]) -> Option<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; parents.len()];
    for start in 0..parents.len() {
        if mark[start] != Mark::New {
            continue;
        }
        // iterative DFS: (vertex, next parent slot)
        let mut stack = vec![(start, 0usize)];
        mark[start] = Mark::Open;
        while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
            if let Some(&p) = parents[v].get(*slot) {
                *slot += 1;
                match mark[p] {
                    Mark::Open => return Some(p),
                    Mark::New => {
                        mark[p] = Mark::Open;
                        stack.push((p, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[v] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcTable {
    prob: Vec<f64>,
    ic: Vec<f64>,
}

impl IcTable {
    pub fn prob(&self, t: usize) -> f64 {
        self.prob[t]
    }

    pub fn ic(&self, t: usize) -> f64 {
        self.ic[t]
    }
}

pub fn information_content(o: &Ontology) -> IcTable {
    let n = o.len() as f64;
    let mut descendants = vec![0usize; o.len()];
    for t in 0..o.len() {
        for &a in o.ancestors(t) {
            if a != t {
                descendants[a] += 1;
            }
        }
    }
    let prob: Vec<f64> = descendants.iter().map(|&d| (d + 1) as f64 / n).collect();
    let ic = prob
        .iter()
        .map(|&p| if p >= 1.0 { 0.0 } else { -libm::log(p) })
        .collect();
    IcTable { prob, ic }
}

/// Most informative common ancestor: the shared ancestor (terms count as
/// their own ancestors) with the largest information content. Ties go to
/// the lowest index.
pub fn mica(o: &Ontology, ict: &IcTable, a: usize, b: usize) -> Option<usize> {
    let (xs, ys) = (o.ancestors(a), o.ancestors(b));
    let (mut i, mut j) = (0, 0);
    let mut best: Option<usize> = None;
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                let t = xs[i];
                if best.is_none_or(|b| ict.ic(t) > ict.ic(b)) {
                    best = Some(t);
                }
                i += 1;
                j += 1;
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Wang,
    Resnik,
    Lin,
    Jiang,
    Relevance,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Wang,
        Metric::Resnik,
        Metric::Relevance,
        Metric::Jiang,
        Metric::Lin,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Wang => "wang",
            Metric::Resnik => "resnik",
            Metric::Lin => "lin",
            Metric::Jiang => "jiang",
            Metric::Relevance => "relevance",
        }
    }
}

impl core::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown metric `{s}`")))
    }
}

/// An IC-based measure between two term ids. For `Metric::Wang` use
/// [`wang_similarity`], which needs a decay weight instead of an IC table.
pub fn semantic_similarity(o: &Ontology, ict: &IcTable, metric: Metric, a: &str, b: &str) -> Result<f64> {
    let (a, b) = (o.index_of(a)?, o.index_of(b)?);
    match metric {
        Metric::Wang => wang_by_index(o, a, b, DEFAULT_WANG_DECAY),
        _ => Ok(ic_similarity(o, ict, metric, a, b)),
    }
}

pub(crate) fn ic_similarity(o: &Ontology, ict: &IcTable, metric: Metric, a: usize, b: usize) -> f64 {
    // every term reaches the (possibly virtual) single root
    let m = mica(o, ict, a, b).expect("terms share a root");
    let ic_m = ict.ic(m);
    let sum = ict.ic(a) + ict.ic(b);
    let lin = || {
        if a == b {
            1.0
        } else if sum == 0.0 {
            0.0
        } else {
            2.0 * ic_m / sum
        }
    };
    match metric {
        Metric::Resnik => ic_m,
        Metric::Lin => lin(),
        Metric::Jiang => 1.0 - (sum - 2.0 * ic_m).min(1.0),
        Metric::Relevance => lin() * (1.0 - ict.prob(m)),
        Metric::Wang => unreachable!("wang is not IC based"),
    }
}

/// Semantic contribution of each ancestor of `t`: `decay^k` where `k` is the
/// length of the shortest upward path from `t`. With one uniform edge weight
/// this equals the maximum over all paths of the product of weights. The
/// virtual root carries no meaning and contributes nothing.
pub fn wang_s_values(o: &Ontology, t: usize, decay: f64) -> BTreeMap<usize, f64> {
    let mut s = BTreeMap::new();
    let mut queue = VecDeque::new();
    s.insert(t, 1.0);
    queue.push_back(t);
    while let Some(v) = queue.pop_front() {
        let next = s[&v] * decay;
        for &p in o.parents(v) {
            if Some(p) == o.virtual_root() || s.contains_key(&p) {
                continue;
            }
            s.insert(p, next);
            queue.push_back(p);
        }
    }
    s
}

pub fn wang_similarity(o: &Ontology, a: &str, b: &str, decay: f64) -> Result<f64> {
    let (a, b) = (o.index_of(a)?, o.index_of(b)?);
    wang_by_index(o, a, b, decay)
}

fn wang_by_index(o: &Ontology, a: usize, b: usize, decay: f64) -> Result<f64> {
    if !(decay > 0.0 && decay < 1.0) {
        return Err(Error::InvalidDecay(decay));
    }
    let sa = wang_s_values(o, a, decay);
    let sb = wang_s_values(o, b, decay);
    Ok(wang_from_s_values(&sa, &sb))
}

fn wang_from_s_values(sa: &BTreeMap<usize, f64>, sb: &BTreeMap<usize, f64>) -> f64 {
    let total: f64 = sa.values().sum::<f64>() + sb.values().sum::<f64>();
    let shared: f64 = sa.iter().filter_map(|(t, va)| sb.get(t).map(|vb| va + vb)).sum();
    if total == 0.0 {
        0.0
    } else {
        shared / total
    }
}

/// Similarity matrix for `metric` over ontology term indices, labelled with
/// `labels` (same length as `terms`).
pub fn reference_matrix(
    o: &Ontology,
    ict: &IcTable,
    metric: Metric,
    terms: &[usize],
    labels: Vec<String>,
    decay: f64,
) -> Result<SimilarityMatrix> {
    assert_eq!(terms.len(), labels.len());
    if metric == Metric::Wang {
        if !(decay > 0.0 && decay < 1.0) {
            return Err(Error::InvalidDecay(decay));
        }
        let s: Vec<_> = terms.iter().map(|&t| wang_s_values(o, t, decay)).collect();
        return Ok(SimilarityMatrix::from_fn(SimilarityKind::Ontology, labels, |i, j| {
            wang_from_s_values(&s[i], &s[j])
        }));
    }
    Ok(SimilarityMatrix::from_fn(SimilarityKind::Ontology, labels, |i, j| {
        ic_similarity(o, ict, metric, terms[i], terms[j])
    }))
}

/// Gene symbols annotated to each term key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneProfileSet {
    profiles: BTreeMap<String, BTreeSet<String>>,
}

impl GeneProfileSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, term: impl Into<String>, gene: impl Into<String>) {
        self.profiles.entry(term.into()).or_default().insert(gene.into());
    }

    pub fn get(&self, term: &str) -> Option<&BTreeSet<String>> {
        self.profiles.get(term)
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Re-keys profiles through `key`; profiles mapping to the same new key
    /// are merged, and those mapping to `None` are dropped.
    pub fn rekey(&self, mut key: impl FnMut(&str) -> Option<String>) -> Self {
        let mut out = GeneProfileSet::new();
        for (term, genes) in &self.profiles {
            if let Some(k) = key(term) {
                out.profiles.entry(k).or_default().extend(genes.iter().cloned());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneOverlap {
    pub matrix: SimilarityMatrix,
    /// Terms with no profile, treated as empty.
    pub missing: Vec<String>,
}

pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard similarity of gene profiles. The diagonal is 1 for terms with a
/// nonempty profile and 0 otherwise.
pub fn gene_overlap_similarity(profiles: &GeneProfileSet, terms: &[String]) -> GeneOverlap {
    let empty = BTreeSet::new();
    let mut missing = Vec::new();
    let sets: Vec<&BTreeSet<String>> = terms
        .iter()
        .map(|t| {
            profiles.get(t).unwrap_or_else(|| {
                missing.push(t.clone());
                &empty
            })
        })
        .collect();
    let matrix = SimilarityMatrix::from_fn(SimilarityKind::Jaccard, terms.to_vec(), |i, j| {
        if i == j {
            if sets[i].is_empty() {
                0.0
            } else {
                1.0
            }
        } else {
            jaccard(sets[i], sets[j])
        }
    });
    GeneOverlap { matrix, missing }
}
