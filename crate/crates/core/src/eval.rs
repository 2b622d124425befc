//! Validation of inferred similarity matrices by Spearman correlation
//! against reference matrices over the off-diagonal term pairs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{InferredGraph, PairCounts};
use crate::similarity::SimilarityMatrix;
use crate::stats::{spearman, Correlation};

/// Values of a matrix over strictly upper-triangular index pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairVector {
    pub pairs: Vec<(u32, u32)>,
    pub values: Vec<f64>,
}

impl PairVector {
    pub fn upper_triangle(m: &SimilarityMatrix) -> Self {
        let p = m.len();
        let mut pairs = Vec::with_capacity(p * p.saturating_sub(1) / 2);
        let mut values = Vec::with_capacity(pairs.capacity());
        for i in 0..p {
            for j in i + 1..p {
                pairs.push((i as u32, j as u32));
                values.push(m.get(i, j));
            }
        }
        PairVector { pairs, values }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn retain(&self, mut keep: impl FnMut(u32, u32) -> bool) -> Self {
        let (pairs, values) = self
            .pairs
            .iter()
            .zip(&self.values)
            .filter(|((i, j), _)| keep(*i, *j))
            .map(|(&pair, &v)| (pair, v))
            .unzip();
        PairVector { pairs, values }
    }
}

/// Keeps the pairs that never co-occur. Indices of `pv` must be indices of
/// `pc`.
pub fn mask_non_cooccurring(pv: &PairVector, pc: &PairCounts) -> Result<PairVector> {
    let out = pv.retain(|i, j| pc.cooccurrences(i as usize, j as usize) == 0);
    if out.is_empty() {
        return Err(Error::NoNonCooccurringPairs);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mask {
    None,
    NonCooccurring,
}

impl Mask {
    pub fn as_str(self) -> &'static str {
        match self {
            Mask::None => "all",
            Mask::NonCooccurring => "non-cooccurring",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub reference: String,
    pub mask: Mask,
    pub m_pairs: usize,
    /// Errors here are per-row, e.g. a constant reference vector.
    pub outcome: Result<Correlation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
    /// Terms evaluated, in prediction order.
    pub terms: Vec<String>,
    /// Prediction terms missing from some input and therefore left out.
    pub dropped_terms: Vec<String>,
    /// Fraction of evaluated pairs that co-occur in at least one chunk,
    /// when pair counts were supplied.
    pub cooccurring_fraction: Option<f64>,
}

/// Correlates `pred` with each named reference over the upper triangle of
/// their common terms. With pair counts supplied, the co-occurring fraction
/// is reported, and `Mask::NonCooccurring` restricts every row to pairs that
/// never share a chunk.
pub fn evaluate_similarity(
    pred: &SimilarityMatrix,
    refs: &[(String, SimilarityMatrix)],
    counts: Option<&PairCounts>,
    mask: Mask,
) -> Result<EvalReport> {
    if mask == Mask::NonCooccurring && counts.is_none() {
        return Err(Error::InvalidParameter("masking needs pair counts".into()));
    }
    let mut label_sets: Vec<BTreeSet<&str>> = refs
        .iter()
        .map(|(_, m)| m.labels().iter().map(String::as_str).collect())
        .collect();
    if let Some(pc) = counts {
        label_sets.push(pc.terms().iter().map(String::as_str).collect());
    }
    let (terms, dropped_terms): (Vec<String>, Vec<String>) = pred
        .labels()
        .iter()
        .cloned()
        .partition(|l| label_sets.iter().all(|s| s.contains(l.as_str())));

    let pred_vec = PairVector::upper_triangle(&pred.select(&terms)?);
    let count_index: Option<Vec<usize>> = counts.map(|pc| {
        let idx: BTreeMap<&str, usize> = pc.terms().iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        terms.iter().map(|t| idx[t.as_str()]).collect()
    });
    let cooccurs = |i: u32, j: u32| -> bool {
        let (pc, idx) = (counts.unwrap(), count_index.as_ref().unwrap());
        pc.cooccurrences(idx[i as usize], idx[j as usize]) > 0
    };

    let cooccurring_fraction = counts.map(|_| {
        let hits = pred_vec.pairs.iter().filter(|&&(i, j)| cooccurs(i, j)).count();
        if pred_vec.is_empty() {
            0.0
        } else {
            hits as f64 / pred_vec.len() as f64
        }
    });

    let keep = |pv: &PairVector| -> PairVector {
        match mask {
            Mask::None => pv.clone(),
            Mask::NonCooccurring => pv.retain(|i, j| !cooccurs(i, j)),
        }
    };
    let pred_vec = keep(&pred_vec);
    if mask == Mask::NonCooccurring && pred_vec.is_empty() {
        return Err(Error::NoNonCooccurringPairs);
    }
    if pred_vec.len() < 3 {
        return Err(Error::TooFewPairs(pred_vec.len()));
    }

    let mut rows = Vec::with_capacity(refs.len());
    for (name, reference) in refs {
        let ref_vec = keep(&PairVector::upper_triangle(&reference.select(&terms)?));
        rows.push(ReportRow {
            reference: name.clone(),
            mask,
            m_pairs: ref_vec.len(),
            outcome: spearman(&pred_vec.values, &ref_vec.values),
        });
    }
    Ok(EvalReport {
        rows,
        terms,
        dropped_terms,
        cooccurring_fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeRecovery {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Compares edge sets by vertex label. Vertices missing from either graph
/// count as having no edges there.
pub fn edge_recovery(inferred: &InferredGraph, truth: &InferredGraph) -> EdgeRecovery {
    let edge_set = |g: &InferredGraph| -> BTreeSet<(String, String)> {
        g.edges()
            .map(|(a, b)| {
                let (x, y) = (&g.terms()[a], &g.terms()[b]);
                if x <= y {
                    (x.clone(), y.clone())
                } else {
                    (y.clone(), x.clone())
                }
            })
            .collect()
    };
    let (found, real) = (edge_set(inferred), edge_set(truth));
    let tp = found.intersection(&real).count();
    let fp = found.len() - tp;
    let fn_ = real.len() - tp;
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    EdgeRecovery {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        precision,
        recall,
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::SimilarityKind;
    use crate::vocab::{OccurrenceMatrix, Vocabulary};
    use alloc::format;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn labels(p: usize) -> Vec<String> {
        (0..p).map(|i| format!("t{i}")).collect()
    }

    fn sym(labels: Vec<String>, upper: &[f64]) -> SimilarityMatrix {
        let p = labels.len();
        let mut k = 0;
        let mut vals = vec![0.0; p * p];
        for i in 0..p {
            vals[i * p + i] = 1.0;
            for j in i + 1..p {
                vals[i * p + j] = upper[k];
                vals[j * p + i] = upper[k];
                k += 1;
            }
        }
        SimilarityMatrix::new(SimilarityKind::Ontology, labels, vals).unwrap()
    }

    fn counts(p: usize, rows: Vec<Vec<u32>>) -> PairCounts {
        let ids = (0..rows.len()).map(|i| format!("c{i}")).collect();
        PairCounts::from_matrix(&OccurrenceMatrix::from_rows(ids, Vocabulary::from_terms(labels(p)), rows).unwrap())
    }

    #[test]
    fn identical_and_reversed() {
        let r = sym(labels(4), &[0.1, 0.5, 0.3, 0.9, 0.2, 0.7]);
        let flipped = sym(labels(4), &[0.9, 0.5, 0.7, 0.1, 0.8, 0.3]);
        let refs = vec![("wang".into(), r.clone())];
        let rep = evaluate_similarity(&r, &refs, None, Mask::None).unwrap();
        assert_eq!(rep.rows[0].outcome.as_ref().unwrap().rho, 1.0);
        assert_eq!(rep.rows[0].m_pairs, 6);
        let rep = evaluate_similarity(&flipped, &refs, None, Mask::None).unwrap();
        assert!((rep.rows[0].outcome.as_ref().unwrap().rho + 1.0).abs() < 1e-12);
    }

    #[test]
    fn three_terms_give_half() {
        // upper triangles (0,1),(0,2),(1,2)
        let pred = sym(labels(3), &[1.0, 2.0, 3.0]);
        let reference = sym(labels(3), &[1.0, 3.0, 2.0]);
        let rep = evaluate_similarity(&pred, &[("lin".into(), reference)], None, Mask::None).unwrap();
        assert!((rep.rows[0].outcome.as_ref().unwrap().rho - 0.5).abs() < 1e-12);
    }

    #[test]
    fn intersection_alignment() {
        let pred = sym(labels(5), &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
        let mut ref_labels = labels(4);
        ref_labels.reverse();
        let reference = pred.select(&ref_labels).unwrap();
        let rep = evaluate_similarity(&pred, &[("x".into(), reference)], None, Mask::None).unwrap();
        assert_eq!(rep.dropped_terms, vec![String::from("t4")]);
        assert_eq!(rep.rows[0].m_pairs, 6);
        assert_eq!(rep.rows[0].outcome.as_ref().unwrap().rho, 1.0);
    }

    #[test]
    fn too_few_pairs() {
        let pred = sym(labels(2), &[0.5]);
        let err = evaluate_similarity(&pred, &[("x".into(), pred.clone())], None, Mask::None).unwrap_err();
        assert_eq!(err, Error::TooFewPairs(1));
    }

    #[test]
    fn constant_reference_is_an_error_row() {
        let pred = sym(labels(3), &[1.0, 2.0, 3.0]);
        let flat = sym(labels(3), &[0.0, 0.0, 0.0]);
        let rep = evaluate_similarity(&pred, &[("flat".into(), flat)], None, Mask::None).unwrap();
        assert_eq!(rep.rows[0].outcome, Err(Error::ConstantInput));
    }

    #[test]
    fn masking_examples() {
        let m = sym(labels(3), &[0.3, 0.2, 0.1]);
        let pv = PairVector::upper_triangle(&m);
        // (0,2) co-occur; (0,1) and (1,2) do not
        let pc = counts(3, vec![vec![0, 2], vec![1]]);
        let masked = mask_non_cooccurring(&pv, &pc).unwrap();
        assert_eq!(masked.pairs, vec![(0, 1), (1, 2)]);
        assert_eq!(mask_non_cooccurring(&masked, &pc).unwrap(), masked);

        let none = counts(3, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(mask_non_cooccurring(&pv, &none).unwrap(), pv);

        let all = counts(3, vec![vec![0, 1, 2]]);
        assert_eq!(
            mask_non_cooccurring(&pv, &all).unwrap_err(),
            Error::NoNonCooccurringPairs
        );
    }

    #[test]
    fn masked_report_and_cooccurring_fraction() {
        let pred = sym(labels(4), &[0.9, 0.1, 0.2, 0.3, 0.4, 0.8]);
        let reference = sym(labels(4), &[0.5, 0.1, 0.2, 0.3, 0.4, 0.6]);
        // only (0,1) co-occurs
        let pc = counts(4, vec![vec![0, 1], vec![2], vec![3]]);
        let refs = [("r".into(), reference)];
        let rep = evaluate_similarity(&pred, &refs, Some(&pc), Mask::NonCooccurring).unwrap();
        assert_eq!(rep.rows[0].m_pairs, 5);
        assert_eq!(rep.rows[0].mask, Mask::NonCooccurring);
        assert!((rep.cooccurring_fraction.unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(rep.rows[0].outcome.as_ref().unwrap().rho, 1.0);
    }

    #[test]
    fn edge_recovery_counts() {
        let truth = InferredGraph::from_edges(labels(4), [(0, 1), (1, 2)]).unwrap();
        let found = InferredGraph::from_edges(labels(4), [(1, 0), (2, 3)]).unwrap();
        let r = edge_recovery(&found, &truth);
        assert_eq!((r.true_positives, r.false_positives, r.false_negatives), (1, 1, 1));
        assert_eq!(r.f1, 0.5);
    }

    proptest! {
        #[test]
        fn permutation_invariant(
            upper_a in prop::collection::vec(0.0f64..1.0, 10),
            upper_b in prop::collection::vec(0.0f64..1.0, 10),
            perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let pred = sym(labels(5), &upper_a);
            let reference = sym(labels(5), &upper_b);
            let order: Vec<String> = perm.iter().map(|&i| format!("t{i}")).collect();
            let base = evaluate_similarity(&pred, &[("r".into(), reference.clone())], None, Mask::None).unwrap();
            let moved = evaluate_similarity(
                &pred.select(&order).unwrap(),
                &[("r".into(), reference.select(&order).unwrap())],
                None,
                Mask::None,
            ).unwrap();
            match (&base.rows[0].outcome, &moved.rows[0].outcome) {
                (Ok(a), Ok(b)) => prop_assert!((a.rho - b.rho).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
