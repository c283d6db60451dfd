//! Dataset ingestion and similarity matrices.
//!
//! Time series are read from UCR-style text files (one object per line, class
//! label first) and turned into a dense Pearson-correlation matrix. Each row of
//! the matrix can then be sorted once into a per-vertex neighbor list, which is
//! what the correlation- and heap-based TMFG builders scan instead of
//! re-sorting during construction.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest tolerated `|S[i][j] - S[j][i]|` when loading a matrix from disk.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Labelled collection of equal-length real-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labels: Vec<usize>,
    values: Vec<f64>,
    length: usize,
}

impl Dataset {
    /// Builds a dataset from raw rows, checking the shape invariants.
    pub fn new(labels: Vec<usize>, series: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != series.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} series",
                labels.len(),
                series.len()
            )));
        }
        if series.len() < 4 {
            return Err(Error::DatasetTooSmall { n: series.len() });
        }
        let length = series[0].len();
        if length < 2 {
            return Err(Error::InvalidInput(format!(
                "series length {length} is below the minimum of 2"
            )));
        }
        let mut values = Vec::with_capacity(series.len() * length);
        for (i, row) in series.iter().enumerate() {
            if row.len() != length {
                return Err(Error::InvalidInput(format!(
                    "series {i} has length {} but series 0 has length {length}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "series {i} holds non-finite value {bad}"
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            labels,
            values,
            length,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Length `L` shared by every series.
    pub fn series_len(&self) -> usize {
        self.length
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i * self.length..(i + 1) * self.length]
    }

    /// Number of distinct class labels.
    pub fn class_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Appends `other` below `self`, e.g. a UCR test split after its train split.
    ///
    /// Both datasets must already share one label space.
    pub fn concat(mut self, other: &Dataset) -> Result<Self> {
        if other.length != self.length {
            return Err(Error::InvalidInput(format!(
                "cannot concatenate series of length {} and {}",
                self.length, other.length
            )));
        }
        self.labels.extend_from_slice(&other.labels);
        self.values.extend_from_slice(&other.values);
        Ok(self)
    }
}

/// Reads a UCR-archive text file.
///
/// Each non-empty line holds a class label followed by `L` values, separated
/// by tabs, commas or spaces. Labels are remapped to `0..k` in ascending
/// order (numeric order when every label parses as a number).
pub fn load_ucr_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ucr(&text)
}

/// Loads `<dir>/<name>_TRAIN.tsv` followed by `<dir>/<name>_TEST.tsv` as one
/// dataset with a shared label remapping.
pub fn load_ucr_splits(dir: impl AsRef<Path>, name: &str) -> Result<Dataset> {
    let dir = dir.as_ref();
    let mut text = String::new();
    for split in ["TRAIN", "TEST"] {
        let path = dir.join(format!("{name}_{split}.tsv"));
        let part = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        text.push_str(&part);
        if !text.ends_with('\n') {
            text.push('\n');
        }
    }
    parse_ucr(&text)
}

pub(crate) fn parse_ucr(text: &str) -> Result<Dataset> {
    let mut raw_labels = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line
            .split(['\t', ',', ' '])
            .filter(|f| !f.is_empty());
        let label = fields.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "missing class label".into(),
        })?;
        let row = fields
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!("invalid value `{f}`"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("ragged row: {} values, expected {w}", row.len()),
                })
            }
            Some(_) => {}
        }
        if row.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("series length {} is below the minimum of 2", row.len()),
            });
        }
        raw_labels.push(label.to_string());
        rows.push(row);
    }
    if rows.len() < 4 {
        return Err(Error::DatasetTooSmall { n: rows.len() });
    }
    Dataset::new(remap_labels(&raw_labels), rows)
}

/// Maps arbitrary label strings onto contiguous ids, numerically ordered when
/// all labels are numbers and lexicographically otherwise.
fn remap_labels(raw: &[String]) -> Vec<usize> {
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
    match numeric {
        Some(nums) if nums.iter().all(|x| x.is_finite()) => {
            let mut distinct = nums.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            nums.iter()
                .map(|x| distinct.partition_point(|d| d < x))
                .collect()
        }
        _ => {
            let ids: BTreeMap<&str, usize> = raw
                .iter()
                .map(String::as_str)
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            raw.iter().map(|s| ids[s.as_str()]).collect()
        }
    }
}

/// Dense symmetric `n x n` similarity matrix with unit diagonal and entries in
/// `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates and wraps a row-major matrix.
    ///
    /// Rejects NaN, out-of-range and asymmetric (beyond [`SYMMETRY_TOLERANCE`])
    /// input. Pairs within tolerance are averaged so the result is exactly
    /// symmetric, the diagonal is set to 1, and negative zeros are normalized.
    pub fn new(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} values do not form a square {n}x{n} matrix",
                values.len()
            )));
        }
        if n < 4 {
            return Err(Error::DatasetTooSmall { n });
        }
        for (idx, &x) in values.iter().enumerate() {
            if x.is_nan() {
                return Err(Error::InvalidMatrix(format!(
                    "NaN at ({}, {})",
                    idx / n,
                    idx % n
                )));
            }
            if !(-1.0..=1.0).contains(&x) && idx / n != idx % n {
                return Err(Error::InvalidMatrix(format!(
                    "entry {x} at ({}, {}) outside [-1, 1]",
                    idx / n,
                    idx % n
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = values[i * n + j];
                let b = values[j * n + i];
                if (a - b).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                if a != b {
                    let m = 0.5 * (a + b);
                    values[i * n + j] = m;
                    values[j * n + i] = m;
                }
            }
            values[i * n + i] = 1.0;
        }
        for x in &mut values {
            *x += 0.0;
        }
        Ok(Self { n, values })
    }

    /// Builds a matrix from a symmetric entry function evaluated on `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x = f(i, j);
                values[i * n + j] = x;
                values[j * n + i] = x;
            }
        }
        Self::new(n, values)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Writes the binary format: little-endian `u64` size, then `n*n`
    /// little-endian `f64` values in row-major order.
    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        write_binary_matrix(path.as_ref(), self.n, &self.values)
    }

    /// Writes one whitespace-separated text row per matrix row, using the
    /// shortest representation that round-trips each value.
    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for i in 0..self.n {
            let line = self
                .row(i)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn write_binary_matrix(path: &Path, n: usize, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + values.len() * 8);
    bytes.extend_from_slice(&(n as u64).to_le_bytes());
    for x in values {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a square matrix in either the binary or the text format.
///
/// The binary format is recognized when the leading `u64` size exactly
/// accounts for the file length; anything else is parsed as text.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<SimilarityMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if let Some((n, values)) = decode_binary(&bytes) {
        return SimilarityMatrix::new(n, values);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::InvalidMatrix("file is neither binary nor UTF-8 text".into()))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("invalid value `{f}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::InvalidMatrix(format!(
            "row {i} has {} entries in a matrix with {n} rows",
            r.len()
        )));
    }
    SimilarityMatrix::new(n, rows.concat())
}

fn decode_binary(bytes: &[u8]) -> Option<(usize, Vec<f64>)> {
    let header: [u8; 8] = bytes.get(..8)?.try_into().ok()?;
    let n = usize::try_from(u64::from_le_bytes(header)).ok()?;
    let expected = n.checked_mul(n)?.checked_mul(8)?.checked_add(8)?;
    if n == 0 || expected != bytes.len() {
        return None;
    }
    let values = bytes[8..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Some((n, values))
}

/// Pearson correlation between every pair of series.
///
/// A series with zero variance has correlation 0 with every other series.
pub fn pearson_similarity(data: &Dataset) -> SimilarityMatrix {
    let n = data.len();
    let len = data.series_len();
    let normalized: Vec<Option<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| standardize(data.series(i)))
        .collect();

    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let Some(zi) = &normalized[i] else {
                return vec![0.0; n - i - 1];
            };
            normalized[i + 1..]
                .iter()
                .map(|zj| match zj {
                    Some(zj) => dot(zi, zj, len).clamp(-1.0, 1.0) + 0.0,
                    None => 0.0,
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        values[i * n + i] = 1.0;
        for (off, &x) in row.iter().enumerate() {
            let j = i + 1 + off;
            values[i * n + j] = x;
            values[j * n + i] = x;
        }
    }
    SimilarityMatrix { n, values }
}

/// Centers a series and scales it to unit Euclidean norm; `None` if constant.
fn standardize(series: &[f64]) -> Option<Vec<f64>> {
    if series.iter().all(|&x| x == series[0]) {
        return None;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let norm = centered.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    Some(centered.into_iter().map(|x| x / norm).collect())
}

#[inline]
fn dot(a: &[f64], b: &[f64], len: usize) -> f64 {
    a[..len].iter().zip(&b[..len]).map(|(x, y)| x * y).sum()
}

/// Every vertex's neighbors ordered by descending similarity, ties by
/// ascending id. Each list has `n - 1` entries and excludes its owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedNeighborLists {
    n: usize,
    ids: Vec<u32>,
}

impl SortedNeighborLists {
    pub fn size(&self) -> usize {
        self.n
    }

    /// Neighbor ids of `v`, most similar first.
    #[inline]
    pub fn list(&self, v: usize) -> &[u32] {
        let w = self.n - 1;
        &self.ids[v * w..(v + 1) * w]
    }

    /// `(similarity, neighbor)` pairs of `v` in list order.
    pub fn pairs<'a>(
        &'a self,
        v: usize,
        s: &'a SimilarityMatrix,
    ) -> impl Iterator<Item = (f64, u32)> + 'a {
        self.list(v).iter().map(move |&u| (s.get(v, u as usize), u))
    }
}

/// Sorts every row of `s` into a neighbor list. Rows are sorted concurrently;
/// the result does not depend on the number of workers.
pub fn sort_neighbor_lists(s: &SimilarityMatrix) -> SortedNeighborLists {
    let n = s.size();
    let w = n - 1;
    let mut ids = vec![0u32; n * w];
    ids.par_chunks_mut(w.max(1))
        .enumerate()
        .for_each_init(
            || Vec::with_capacity(w),
            |scratch: &mut Vec<(u64, u32)>, (v, out)| {
                scratch.clear();
                scratch.extend(
                    s.row(v)
                        .iter()
                        .enumerate()
                        .filter(|&(u, _)| u != v)
                        .map(|(u, &x)| (descending_key(x), u as u32)),
                );
                scratch.sort_unstable();
                for (slot, &(_, u)) in out.iter_mut().zip(scratch.iter()) {
                    *slot = u;
                }
            },
        );
    SortedNeighborLists { n, ids }
}

/// Maps a non-NaN float to an integer key whose ascending order is the
/// float's descending order.
#[inline]
fn descending_key(x: f64) -> u64 {
    let bits = x.to_bits();
    let ascending = if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    };
    !ascending
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> SimilarityMatrix {
        SimilarityMatrix::new(rows.len(), rows.concat()).unwrap()
    }

    #[test]
    fn minimal_ucr_file() {
        let ds = parse_ucr("0\t1.0\t2.0\n0\t1.0\t2.0\n0\t1.0\t2.0\n0\t1.0\t2.0\n").unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.series_len(), 2);
        assert_eq!(ds.labels(), &[0, 0, 0, 0]);
    }

    #[test]
    fn labels_are_remapped_contiguously() {
        let ds = parse_ucr("7,1,2\n3,1,3\n7,2,2\n3,0,1\n").unwrap();
        assert_eq!(ds.labels(), &[1, 0, 1, 0]);
        assert_eq!(ds.class_count(), 2);

        let ds = parse_ucr("b 1 2\na 1 3\nc 2 2\na 0 1\n").unwrap();
        assert_eq!(ds.labels(), &[1, 0, 2, 0]);

        // "1" and "1.0" are the same class
        let ds = parse_ucr("1 1 2\n1.0 1 3\n-1 2 2\n-1 0 1\n").unwrap();
        assert_eq!(ds.labels(), &[1, 1, 0, 0]);
    }

    #[test]
    fn ragged_row_names_line() {
        let err = parse_ucr("0\t1\t2\n0\t1\t2\n\n0\t1\n0\t1\t2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            parse_ucr("0 1 2\n1 2 3\n0 3 4\n"),
            Err(Error::DatasetTooSmall { n: 3 })
        ));
    }

    #[test]
    fn pearson_extremes() {
        let ds = Dataset::new(
            vec![0, 0, 0, 0],
            vec![
                vec![1.0, 2.0, 3.0, 5.0],
                vec![1.0, 2.0, 3.0, 5.0],
                vec![-1.0, -2.0, -3.0, -5.0],
                vec![4.0, 4.0, 4.0, 4.0],
            ],
        )
        .unwrap();
        let s = pearson_similarity(&ds);
        assert!((s.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((s.get(0, 2) + 1.0).abs() < 1e-12);
        assert_eq!(s.get(0, 3), 0.0);
        assert_eq!(s.get(3, 3), 1.0);
    }

    #[test]
    fn pearson_matches_textbook_formula() {
        // Textbook r = (n Σxy − Σx Σy) / sqrt((n Σx² − (Σx)²)(n Σy² − (Σy)²))
        fn textbook(x: &[f64], y: &[f64]) -> f64 {
            let n = x.len() as f64;
            let sx: f64 = x.iter().sum();
            let sy: f64 = y.iter().sum();
            let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let sxx: f64 = x.iter().map(|a| a * a).sum();
            let syy: f64 = y.iter().map(|a| a * a).sum();
            (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
        }
        let rows = vec![
            vec![1.0, 2.0, 3.0],
            vec![1.0, 2.0, 4.0],
            vec![3.0, 1.0, 2.0],
            vec![0.5, -2.0, 7.0],
        ];
        let ds = Dataset::new(vec![0; 4], rows.clone()).unwrap();
        let s = pearson_similarity(&ds);
        // hand value for [1,2,3] vs [1,2,4]: 3 / sqrt(2 * 14/3) = 0.9819805060619657
        assert!((s.get(0, 1) - 0.981_980_506_061_965_7).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((s.get(i, j) - textbook(&rows[i], &rows[j])).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let err = SimilarityMatrix::new(
            4,
            vec![
                1.0, 0.5, 0.1, 0.1, //
                0.4, 1.0, 0.1, 0.1, //
                0.1, 0.1, 1.0, 0.1, //
                0.1, 0.1, 0.1, 1.0,
            ],
        );
        assert!(matches!(err, Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn invalid_entries_are_rejected() {
        let mut v = vec![0.2; 16];
        v[1] = f64::NAN;
        assert!(SimilarityMatrix::new(4, v).is_err());
        let mut v = vec![0.2; 16];
        v[1] = 1.5;
        v[4] = 1.5;
        assert!(SimilarityMatrix::new(4, v).is_err());
        assert!(SimilarityMatrix::new(4, vec![0.0; 15]).is_err());
    }

    #[test]
    fn identity_plus_constant_is_accepted() {
        let s = SimilarityMatrix::from_fn(4, |_, _| 0.3).unwrap();
        assert_eq!(s.get(2, 2), 1.0);
        assert_eq!(s.get(1, 3), 0.3);
    }

    #[test]
    fn binary_and_text_round_trip() {
        let s = SimilarityMatrix::from_fn(6, |i, j| ((i * 7 + j * 3) as f64 * 0.123).sin()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let bin = dir.path().join("m.bin");
        let txt = dir.path().join("m.txt");
        s.save_binary(&bin).unwrap();
        s.save_text(&txt).unwrap();
        assert_eq!(fs::metadata(&bin).unwrap().len(), 8 + 36 * 8);
        let a = load_matrix(&bin).unwrap();
        let b = load_matrix(&txt).unwrap();
        for (x, y) in s.values().iter().zip(a.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in s.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn non_square_text_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        fs::write(&p, "1 0.1 0.1 0.1\n0.1 1 0.1\n0.1 0.1 1 0.1\n0.1 0.1 0.1 1\n").unwrap();
        assert!(matches!(load_matrix(&p), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn hand_sorted_list() {
        let s = matrix(&[
            &[1.0, 0.9, 0.2, 0.5],
            &[0.9, 1.0, 0.1, 0.1],
            &[0.2, 0.1, 1.0, 0.1],
            &[0.5, 0.1, 0.1, 1.0],
        ]);
        let lists = sort_neighbor_lists(&s);
        let pairs: Vec<_> = lists.pairs(0, &s).collect();
        assert_eq!(pairs, vec![(0.9, 1), (0.5, 3), (0.2, 2)]);
        // 2 and 3 tie at 0.1
        assert_eq!(lists.list(1), &[0, 2, 3]);
    }

    #[test]
    fn ties_prefer_lower_id() {
        let n = 7;
        let s = SimilarityMatrix::from_fn(n, |i, j| {
            if i == 0 && (j == 2 || j == 5) {
                0.5
            } else {
                -0.1 * ((i + j) % 3) as f64
            }
        })
        .unwrap();
        let lists = sort_neighbor_lists(&s);
        assert_eq!(&lists.list(0)[..2], &[2, 5]);
    }

    #[test]
    fn descending_key_orders_signs() {
        let xs = [-1.0, -0.5, 0.0, 1e-300, 0.25, 1.0];
        for w in xs.windows(2) {
            assert!(descending_key(w[0]) > descending_key(w[1]));
        }
    }
}
