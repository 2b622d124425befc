use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Where a similarity matrix came from; fixes the admissible value range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimilarityKind {
    Geodesic,
    Cosine,
    Ontology,
    Jaccard,
}

impl SimilarityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityKind::Geodesic => "geodesic",
            SimilarityKind::Cosine => "cosine",
            SimilarityKind::Ontology => "ontology",
            SimilarityKind::Jaccard => "jaccard",
        }
    }
}

impl core::str::FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geodesic" => Ok(SimilarityKind::Geodesic),
            "cosine" => Ok(SimilarityKind::Cosine),
            "ontology" => Ok(SimilarityKind::Ontology),
            "jaccard" => Ok(SimilarityKind::Jaccard),
            other => Err(Error::InvalidParameter(format!("unknown similarity kind `{other}`"))),
        }
    }
}

/// Symmetric term × term score matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    kind: SimilarityKind,
    labels: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn new(kind: SimilarityKind, labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let p = labels.len();
        if values.len() != p * p {
            return Err(Error::InvalidSimilarity(format!(
                "{} values for {p} labels",
                values.len()
            )));
        }
        let mut seen = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            if seen.insert(label.as_str(), i).is_some() {
                return Err(Error::InvalidSimilarity(format!("duplicate label `{label}`")));
            }
        }
        for i in 0..p {
            for j in 0..i {
                let (a, b) = (values[i * p + j], values[j * p + i]);
                if a != b && !(a.is_nan() && b.is_nan()) {
                    return Err(Error::InvalidSimilarity(format!(
                        "asymmetric entry ({}, {}): {a} vs {b}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(SimilarityMatrix { kind, labels, values })
    }

    /// Builds a matrix by evaluating `f` on each unordered pair `i <= j`.
    pub fn from_fn(kind: SimilarityKind, labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let p = labels.len();
        let mut values = alloc::vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                let v = f(i, j);
                values[i * p + j] = v;
                values[j * p + i] = v;
            }
        }
        SimilarityMatrix { kind, labels, values }
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.labels.len();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sub-matrix over `labels`, in that order. Every label must be present.
    pub fn select(&self, labels: &[String]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let idx = labels
            .iter()
            .map(|l| {
                index
                    .get(l.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownTerm(l.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_fn(self.kind, labels.to_vec(), |i, j| {
            self.get(idx[i], idx[j])
        }))
    }
}
