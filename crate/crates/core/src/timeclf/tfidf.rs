use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::MonthTokenDoc;
use crate::error::{Error, Result};

/// Sorted-index sparse vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseVector {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs; indices must be unique and `< dim`.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::argument("duplicate sparse index"));
        }
        if pairs.last().is_some_and(|p| p.0 >= dim) {
            return Err(Error::argument("sparse index out of range"));
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(Self { dim, indices, values })
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            d[i] = v;
        }
        d
    }
}

/// Month-token vocabulary with smoothed inverse document frequencies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TfidfModel {
    /// Token to column; columns follow lexicographic token order.
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

impl TfidfModel {
    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    /// FNV-1a digest of vocabulary, idf bits and document count.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for (token, &col) in &self.vocabulary {
            feed(token.as_bytes());
            feed(&(col as u64).to_le_bytes());
        }
        for idf in &self.idf {
            feed(&idf.to_bits().to_le_bytes());
        }
        feed(&(self.doc_count as u64).to_le_bytes());
        h
    }
}

/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1` over the training documents.
pub fn fit_tfidf(docs: &[MonthTokenDoc]) -> Result<TfidfModel> {
    if docs.iter().all(|d| d.tokens.is_empty()) {
        return Err(Error::argument("TF-IDF needs at least one non-empty document"));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for token in unique {
            *df.entry(token).or_default() += 1;
        }
    }
    let n = docs.len() as f64;
    let mut vocabulary = BTreeMap::new();
    let mut idf = Vec::with_capacity(df.len());
    for (col, (token, count)) in df.into_iter().enumerate() {
        vocabulary.insert(String::from(token), col);
        idf.push(libm::log((1.0 + n) / (1.0 + count as f64)) + 1.0);
    }
    Ok(TfidfModel {
        vocabulary,
        idf,
        doc_count: docs.len(),
    })
}

/// Raw count times idf, scaled to unit L2 norm. Unseen tokens are ignored;
/// a document with no known token maps to the zero vector.
pub fn transform(model: &TfidfModel, doc: &MonthTokenDoc) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(&col) = model.vocabulary.get(token) {
            *counts.entry(col).or_default() += 1.0;
        }
    }
    let (indices, mut values): (Vec<usize>, Vec<f64>) = counts.into_iter().map(|(c, tf)| (c, tf * model.idf[c])).unzip();
    let norm = libm::sqrt(values.iter().map(|v| v * v).sum());
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v /= norm);
    }
    SparseVector {
        dim: model.dim(),
        indices,
        values,
    }
}
