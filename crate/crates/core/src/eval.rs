//! Partition agreement and graph quality.

use crate::error::{Error, Result};
use crate::simmatrix::SimilarityMatrix;
use crate::tmfg::{edge_sum, TmfgGraph};

/// Counts of objects per (truth class, predicted cluster) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(truth: &[usize], predicted: &[usize]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::LengthMismatch {
                left: truth.len(),
                right: predicted.len(),
            });
        }
        let truth = compact(truth);
        let predicted = compact(predicted);
        let rows = truth.iter().max().map_or(0, |m| m + 1);
        let cols = predicted.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; rows * cols];
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for (&t, &p) in truth.iter().zip(&predicted) {
            counts[t * cols + p] += 1;
            row_sums[t] += 1;
            col_sums[p] += 1;
        }
        Ok(ContingencyTable {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            total: truth.len() as u64,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn ari(&self) -> f64 {
        let index: u64 = self.counts.iter().map(|&c| pairs(c)).sum();
        let a: u64 = self.row_sums.iter().map(|&c| pairs(c)).sum();
        let b: u64 = self.col_sums.iter().map(|&c| pairs(c)).sum();
        let all = pairs(self.total) as f64;
        let expected = if all > 0.0 { a as f64 * b as f64 / all } else { 0.0 };
        let max = 0.5 * (a as f64 + b as f64);
        let denom = max - expected;
        if denom == 0.0 {
            // both partitions trivial (all one cluster or all singletons)
            let same = self.rows == self.cols && (self.rows <= 1 || a == 0);
            return if same { 1.0 } else { 0.0 };
        }
        (index as f64 - expected) / denom
    }
}

/// Adjusted Rand index of two labelings of the same objects. Labels need not
/// be contiguous.
pub fn ari(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    if truth.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "adjusted rand index needs at least 2 objects, got {}",
            truth.len()
        )));
    }
    Ok(ContingencyTable::new(truth, predicted)?.ari())
}

fn pairs(m: u64) -> u64 {
    m * m.saturating_sub(1) / 2
}

/// Relabels to `0..k` in order of first appearance.
fn compact(labels: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = seen.len();
            *seen.entry(l).or_insert(next)
        })
        .collect()
}

/// Percentage by which `candidate`'s edge sum falls short of `reference`'s.
pub fn edge_sum_delta(
    candidate: &TmfgGraph,
    reference: &TmfgGraph,
    s: &SimilarityMatrix,
) -> Result<f64> {
    if candidate.n() != reference.n() || candidate.n() != s.size() {
        return Err(Error::LengthMismatch {
            left: candidate.n(),
            right: reference.n(),
        });
    }
    percent_reduction(edge_sum(candidate, s), edge_sum(reference, s))
}

/// `100 (reference - candidate) / reference`.
pub fn percent_reduction(candidate: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::InvalidInput("reference edge sum is zero".into()));
    }
    Ok(100.0 * (reference - candidate) / reference)
}
