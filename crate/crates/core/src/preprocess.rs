//! Class balancing for nominal features (SMOTEN) and Cramér's V diagnostics.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::data::{cell, create, open, parse_num, Columns, DataError, Feature, FeatureDomains, HouseholdTable};
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};
use crate::scalar::{count, Scalar};

/// Categorical feature vectors with class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<Vec<u8>>,
    pub labels: Vec<usize>,
    /// Number of codes per feature.
    pub feature_domains: Vec<usize>,
}

/// Which household column becomes the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Solar,
    SqftClass,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<u8>>, labels: Vec<usize>, feature_domains: Vec<usize>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != feature_domains.len() {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} features, expected {}",
                    r.len(),
                    feature_domains.len()
                )));
            }
            if let Some((f, &code)) = r.iter().enumerate().find(|(f, c)| **c as usize >= feature_domains[*f]) {
                return Err(Error::OutOfDomain {
                    feature: f,
                    code,
                    domain: feature_domains[f],
                });
            }
        }
        Ok(LabeledDataset {
            rows,
            labels,
            feature_domains,
        })
    }

    /// Rows of `table` whose `label` column is present.
    pub fn from_households(table: &HouseholdTable, label: LabelColumn, domains: &FeatureDomains) -> Result<Self> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for h in table.iter() {
            let y = match label {
                LabelColumn::Solar => h.solar.map(usize::from),
                LabelColumn::SqftClass => h.sqft_class.map(usize::from),
            };
            if let Some(y) = y {
                rows.push(h.features.to_vec());
                labels.push(y);
            }
        }
        LabeledDataset::new(rows, labels, domains.as_usize())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_domains.len()
    }

    /// Count per class label, ascending by label.
    pub fn class_counts(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &y in &self.labels {
            *m.entry(y).or_insert(0) += 1;
        }
        m
    }

    pub fn column(&self, f: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[f]).collect()
    }
}

/// Training-set CSV: one column per feature (by name) then `label`.
pub fn write_dataset<W: Write>(data: &LabeledDataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = Feature::ALL.iter().take(data.n_features()).map(|f| f.name()).collect();
    header.push("label");
    w.write_record(&header).map_err(DataError::from)?;
    for (row, y) in data.rows.iter().zip(&data.labels) {
        let mut rec: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        rec.push(y.to_string());
        w.write_record(&rec).map_err(DataError::from)?;
    }
    w.flush().map_err(|e| DataError::from(csv::Error::from(e)))?;
    Ok(())
}

pub fn save_dataset(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(data, create(path.as_ref())?)
}

pub fn read_dataset<R: Read>(reader: R, domains: &FeatureDomains) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let cols = Columns::new(rdr.headers().map_err(DataError::from)?);
    let feat_c = Feature::ALL
        .iter()
        .map(|f| cols.require(f.name()))
        .collect::<Result<Vec<_>, _>>()?;
    let label_c = cols.require("label")?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(DataError::from)?;
        let line = i + 2;
        let row = feat_c
            .iter()
            .zip(Feature::ALL)
            .map(|(&c, f)| parse_num::<u8>(line, f.name(), cell(&rec, Some(c)).unwrap_or("")))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
        labels.push(parse_num(line, "label", cell(&rec, Some(label_c)).unwrap_or(""))?);
    }
    LabeledDataset::new(rows, labels, domains.as_usize())
}

pub fn load_dataset(path: impl AsRef<Path>, domains: &FeatureDomains) -> Result<LabeledDataset> {
    read_dataset(open(path.as_ref())?, domains)
}

fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Oversamples every minority class up to the majority count.
///
/// Each synthetic row takes, per feature, the most frequent code among the
/// `k` Hamming-nearest same-class neighbours of a randomly chosen seed row
/// (neighbour ties by position, code ties by lowest code). Original rows come
/// first, unchanged; synthetic rows follow grouped by class.
pub fn smoten_oversample(data: &LabeledDataset, k: usize, seed: u64) -> Result<LabeledDataset> {
    balance(data, seed, |members, needed, rng| {
        if members.len() <= k {
            return Err(Error::InvalidInput(format!(
                "minority class has {} rows, need more than k={k}; use a smaller k",
                members.len()
            )));
        }
        let neighbours: Vec<Vec<usize>> = members
            .iter()
            .map(|&i| {
                let mut d: Vec<(usize, usize)> = members
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (hamming(&data.rows[i], &data.rows[j]), j))
                    .collect();
                d.sort_unstable();
                d.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(needed);
        for _ in 0..needed {
            let s = rng.random_range(0..members.len());
            let row = (0..data.n_features())
                .map(|f| {
                    let mut tally = vec![0usize; data.feature_domains[f]];
                    for &j in &neighbours[s] {
                        tally[data.rows[j][f] as usize] += 1;
                    }
                    let best = tally.iter().copied().max().unwrap_or(0);
                    tally.iter().position(|&c| c == best).unwrap_or(0) as u8
                })
                .collect();
            out.push(row);
        }
        Ok(out)
    })
}

/// Fallback: duplicates random minority rows with replacement.
pub fn random_oversample(data: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    balance(data, seed, |members, needed, rng| {
        Ok((0..needed)
            .map(|_| data.rows[members[rng.random_range(0..members.len())]].clone())
            .collect())
    })
}

fn balance<F>(data: &LabeledDataset, seed: u64, mut synth: F) -> Result<LabeledDataset>
where
    F: FnMut(&[usize], usize, &mut rand_chacha::ChaCha8Rng) -> Result<Vec<Vec<u8>>>,
{
    let counts = data.class_counts();
    if counts.len() < 2 {
        return Err(Error::InvalidInput("oversampling needs at least two classes".into()));
    }
    let majority = counts.values().copied().max().unwrap_or(0);
    let mut out = data.clone();
    for (&class, &n) in &counts {
        if n == majority {
            continue;
        }
        let members: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == class).collect();
        let mut rng = stream(seed, Purpose::Oversample, class as u64);
        for row in synth(&members, majority - n, &mut rng)? {
            out.rows.push(row);
            out.labels.push(class);
        }
    }
    Ok(out)
}

/// Bias-uncorrected Cramér's V between two categorical columns.
pub fn cramers_v<T: Scalar, C: Ord + Copy>(a: &[C], b: &[C]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "column lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InvalidInput("Cramér's V needs at least two observations".into()));
    }
    let index = |xs: &[C]| -> BTreeMap<C, usize> {
        let mut m = BTreeMap::new();
        for &x in xs {
            let next = m.len();
            m.entry(x).or_insert(next);
        }
        m
    };
    let (ia, ib) = (index(a), index(b));
    let (r, c) = (ia.len(), ib.len());
    if r.min(c) < 2 {
        return Ok(T::zero());
    }
    let mut table = vec![0usize; r * c];
    for (x, y) in a.iter().zip(b) {
        table[ia[x] * c + ib[y]] += 1;
    }
    let row_sum: Vec<usize> = (0..r).map(|i| table[i * c..(i + 1) * c].iter().sum()).collect();
    let col_sum: Vec<usize> = (0..c).map(|j| (0..r).map(|i| table[i * c + j]).sum()).collect();
    let n: T = count(a.len());
    let mut chi2 = T::zero();
    for i in 0..r {
        for j in 0..c {
            let expected = count::<T>(row_sum[i]) * count(col_sum[j]) / n;
            let d = count::<T>(table[i * c + j]) - expected;
            chi2 += d * d / expected;
        }
    }
    let v = (chi2 / (n * count((r - 1).min(c - 1)))).sqrt();
    Ok(v.max(T::zero()).min(T::one()))
}

/// Pairwise Cramér's V over features (and the label, appended last, if requested).
pub fn correlation_matrix<T: Scalar>(data: &LabeledDataset, include_label: bool) -> Result<Vec<Vec<T>>> {
    if data.len() < 2 {
        return Err(Error::InvalidInput("correlation matrix needs at least two rows".into()));
    }
    let mut cols: Vec<Vec<usize>> = (0..data.n_features())
        .map(|f| data.column(f).into_iter().map(usize::from).collect())
        .collect();
    if include_label {
        cols.push(data.labels.clone());
    }
    let m = cols.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let values: Vec<T> = pairs
        .par_iter()
        .map(|&(i, j)| cramers_v(&cols[i], &cols[j]))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![T::zero(); m]; m];
    for i in 0..m {
        out[i][i] = T::one();
    }
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        out[i][j] = v;
        out[j][i] = v;
    }
    Ok(out)
}

/// Largest element-wise absolute difference of two equally sized matrices.
pub fn max_abs_diff<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> T {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (*x - *y).abs()))
        .fold(T::zero(), T::max)
}
