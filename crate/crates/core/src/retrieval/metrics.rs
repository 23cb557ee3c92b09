use std::collections::BTreeMap;

use super::rank::RetrievalList;
use crate::error::{Error, Result};

/// Best attainable cumulative gain when `class_size` relevant items exist:
/// `1 + sum_{j=2..=C} 1 / log2(j)`, accumulated in the same order as
/// [`dcg`] so that an ideal list normalizes to exactly 1.
pub fn ideal_dcg(class_size: usize) -> f64 {
    (2..=class_size).fold(1.0, |acc, j| acc + 1.0 / (j as f64).log2())
}

/// Discounted cumulative gain of a binary relevance list, normalized to [0, 1].
///
/// The running sum starts at `G[1]` and adds `G[i] / log2(i)` for every later
/// rank `i`; the total over the whole list is divided by [`ideal_dcg`].
pub fn dcg(relevance: &[bool], class_size: usize) -> Result<f64> {
    if class_size == 0 {
        return Err(Error::ClassAbsent);
    }
    let hits = relevance.iter().filter(|&&g| g).count();
    if hits > class_size {
        return Err(Error::malformed(
            "relevance list",
            format!("{hits} relevant entries but class size {class_size}"),
        ));
    }
    let mut acc = 0.0;
    for (pos, &g) in relevance.iter().enumerate() {
        let i = pos + 1;
        let gain = g as u8 as f64;
        acc = if i == 1 { gain } else { acc + gain / (i as f64).log2() };
    }
    Ok(acc / ideal_dcg(class_size))
}

/// Precision and recall over the first `n` entries.
///
/// # Panics
/// If `n` is zero or exceeds the list length.
pub fn precision_recall(relevance: &[bool], class_size: usize, n: usize) -> (f64, f64) {
    assert!(
        (1..=relevance.len()).contains(&n),
        "cutoff {n} outside 1..={}",
        relevance.len()
    );
    let hits = relevance[..n].iter().filter(|&&g| g).count() as f64;
    let recall = if class_size == 0 { 0.0 } else { hits / class_size as f64 };
    (hits / n as f64, recall)
}

/// Fraction of the lexicon pruned when only `n` of `lexicon_size` entries survive.
pub fn degree_of_reduction(lexicon_size: usize, n: usize) -> f64 {
    assert!((1..=lexicon_size).contains(&n), "cutoff {n} outside 1..={lexicon_size}");
    (lexicon_size - n) as f64 / lexicon_size as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub dcg: f64,
    pub precision_at: BTreeMap<usize, f64>,
    pub recall_at: BTreeMap<usize, f64>,
    pub dor_at: BTreeMap<usize, f64>,
}

/// DCG plus precision, recall and degree of reduction at every cutoff in `grid`.
pub fn metric_report(list: &RetrievalList, grid: &[usize]) -> Result<MetricReport> {
    let dcg = dcg(&list.relevance, list.class_size)?;
    let mut report = MetricReport {
        dcg,
        precision_at: BTreeMap::new(),
        recall_at: BTreeMap::new(),
        dor_at: BTreeMap::new(),
    };
    for &n in grid {
        let (p, r) = precision_recall(&list.relevance, list.class_size, n);
        report.precision_at.insert(n, p);
        report.recall_at.insert(n, r);
        report.dor_at.insert(n, degree_of_reduction(list.len(), n));
    }
    Ok(report)
}
