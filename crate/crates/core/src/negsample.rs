//! Topic-matched negative sampling: exact top-k cosine retrieval of
//! candidate legitimate titles around each hoax title.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

/// A title id with its embedding.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingRecord {
    pub id: String,
    pub vector: Vec<f64>,
}

impl EmbeddingRecord {
    pub fn new(id: impl Into<String>, vector: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if vector.is_empty() {
            return Err(Error::validation(format!("embedding {id}: zero dimension")));
        }
        if let Some(i) = vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("embedding {id}: component {i} is not finite")));
        }
        Ok(Self { id, vector })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Checks that every record shares one dimension and returns it.
pub fn common_dim(records: &[EmbeddingRecord]) -> Result<Option<usize>> {
    let Some(first) = records.first() else {
        return Ok(None);
    };
    let dim = first.dim();
    if let Some(bad) = records.iter().find(|r| r.dim() != dim) {
        return Err(Error::validation(format!(
            "embedding {} has dimension {}, expected {dim}",
            bad.id,
            bad.dim()
        )));
    }
    Ok(Some(dim))
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    libm::sqrt(dot(u, u))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::argument(format!("dimension mismatch: {} vs {}", u.len(), v.len())));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::domain("cosine of a zero-norm vector"));
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// One retrieved neighbor.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Neighbor {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NeighborResult {
    pub query_id: String,
    /// Descending score, ties by ascending id.
    pub neighbors: Vec<Neighbor>,
}

/// Retrieval order: higher score first, then smaller id.
fn rank(a_score: f64, a_id: &str, b_score: f64, b_id: &str) -> Ordering {
    b_score.total_cmp(&a_score).then_with(|| a_id.cmp(b_id))
}

struct Ranked<'a> {
    score: f64,
    id: &'a str,
}

impl PartialEq for Ranked<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked<'_> {}

impl PartialOrd for Ranked<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// The heap keeps its maximum on top; ordering by retrieval rank puts the
// worst of the current k there, ready for eviction.
impl Ord for Ranked<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        rank(self.score, self.id, other.score, other.id)
    }
}

/// The `k` records of `corpus` most cosine-similar to `query`, excluding
/// any record sharing the query's id.
pub fn top_k_neighbors(query: &EmbeddingRecord, corpus: &[EmbeddingRecord], k: usize) -> Result<NeighborResult> {
    if k == 0 {
        return Err(Error::argument("k must be at least 1"));
    }
    let qn = norm(&query.vector);
    if qn == 0.0 {
        return Err(Error::domain(format!("query {} has zero norm", query.id)));
    }
    let candidates = corpus.iter().filter(|c| c.id != query.id);
    let available = candidates.clone().count();
    if available < k {
        return Err(Error::argument(format!("k = {k} exceeds the {available} available candidates")));
    }

    let mut heap: BinaryHeap<Ranked<'_>> = BinaryHeap::with_capacity(k + 1);
    for c in candidates {
        if c.dim() != query.dim() {
            return Err(Error::argument(format!(
                "candidate {} has dimension {}, query has {}",
                c.id,
                c.dim(),
                query.dim()
            )));
        }
        let cn = norm(&c.vector);
        if cn == 0.0 {
            return Err(Error::domain(format!("candidate {} has zero norm", c.id)));
        }
        let score = (dot(&query.vector, &c.vector) / (qn * cn)).clamp(-1.0, 1.0);
        let entry = Ranked { score, id: &c.id };
        if heap.len() < k {
            heap.push(entry);
        } else if heap.peek().is_some_and(|worst| entry < *worst) {
            heap.pop();
            heap.push(entry);
        }
    }

    let neighbors = heap
        .into_sorted_vec()
        .into_iter()
        .map(|r| Neighbor {
            id: r.id.into(),
            score: r.score,
        })
        .collect();
    Ok(NeighborResult {
        query_id: query.id.clone(),
        neighbors,
    })
}

/// Deduplicated union of every hoax's top-k neighbors.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeSet {
    pub ids: BTreeSet<String>,
    /// Neighbor count before deduplication (`k * hoaxes`).
    pub retrieved: usize,
}

pub fn build_negative_set(
    hoaxes: &[EmbeddingRecord],
    candidates: &[EmbeddingRecord],
    k: usize,
) -> Result<NegativeSet> {
    if candidates.is_empty() {
        return Err(Error::argument("empty candidate set"));
    }
    let results = hoaxes
        .iter()
        .map(|h| top_k_neighbors(h, candidates, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge_neighbors(&results))
}

/// Union of neighbor ids across per-query results.
pub fn merge_neighbors(results: &[NeighborResult]) -> NegativeSet {
    let mut ids = BTreeSet::new();
    let mut retrieved = 0;
    for r in results {
        retrieved += r.neighbors.len();
        ids.extend(r.neighbors.iter().map(|n| n.id.clone()));
    }
    NegativeSet { ids, retrieved }
}

/// 64-bit FNV-1a.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Character trigrams of the lowercased, space-padded title.
pub fn title_trigrams(title: &str) -> Vec<String> {
    let mut padded = String::from(" ");
    padded.push_str(&title.trim().to_lowercase());
    padded.push(' ');
    let chars: Vec<char> = padded.chars().collect();
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

/// Deterministic unit-norm title vector from hashed character trigrams.
/// Stands in for a sentence-embedding model when none is available.
pub fn fallback_embed(title: &str, dim: usize) -> Result<Vec<f64>> {
    if dim < 16 {
        return Err(Error::argument(format!("fallback embedding dimension must be >= 16, got {dim}")));
    }
    if title.trim().is_empty() {
        return Err(Error::domain("cannot embed an empty title"));
    }
    let mut v = vec![0.0; dim];
    for gram in title_trigrams(title) {
        v[(fnv1a(gram.as_bytes()) % dim as u64) as usize] += 1.0;
    }
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn rec(id: &str, v: &[f64]) -> EmbeddingRecord {
        EmbeddingRecord::new(id, v.to_vec()).unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let expected = 32.0 / (libm::sqrt(14.0) * libm::sqrt(77.0));
        assert!((cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.974632).abs() < 1e-6);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn record_rejects_non_finite() {
        assert!(EmbeddingRecord::new("x", alloc::vec![1.0, f64::NAN]).is_err());
        assert!(EmbeddingRecord::new("x", Vec::new()).is_err());
        assert!(common_dim(&[rec("a", &[1.0]), rec("b", &[1.0, 2.0])]).is_err());
    }

    #[test]
    fn forced_ordering() {
        let q = rec("q", &[1.0, 0.0]);
        let corpus = [rec("a", &[1.0, 0.0]), rec("b", &[0.0, 1.0]), rec("c", &[-1.0, 0.0])];
        let r = top_k_neighbors(&q, &corpus, 2).unwrap();
        let got: Vec<_> = r.neighbors.iter().map(|n| (n.id.as_str(), n.score)).collect();
        assert_eq!(got, [("a", 1.0), ("b", 0.0)]);
    }

    #[test]
    fn ties_prefer_smaller_id_and_query_is_excluded() {
        let q = rec("q", &[1.0, 1.0]);
        let corpus = [rec("z", &[2.0, 2.0]), rec("q", &[1.0, 1.0]), rec("m", &[1.0, 1.0]), rec("a", &[0.0, 1.0])];
        let r = top_k_neighbors(&q, &corpus, 2).unwrap();
        let ids: Vec<_> = r.neighbors.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["m", "z"]);
        assert!(top_k_neighbors(&q, &corpus, 4).is_err());
        assert!(top_k_neighbors(&q, &corpus, 0).is_err());
    }

    #[test]
    fn negative_set_dedups() {
        let candidates = [
            rec("a", &[1.0, 0.0, 0.0]),
            rec("b", &[0.9, 0.1, 0.0]),
            rec("c", &[0.0, 1.0, 0.0]),
            rec("d", &[0.0, 0.9, 0.1]),
            rec("e", &[0.0, 0.0, 1.0]),
        ];
        let disjoint = [rec("h1", &[1.0, 0.0, 0.0]), rec("h2", &[0.0, 1.0, 0.0])];
        let set = build_negative_set(&disjoint, &candidates, 2).unwrap();
        assert_eq!(set.ids.len(), 4);
        assert_eq!(set.retrieved, 4);

        let overlapping = [rec("h1", &[1.0, 0.0, 0.0]), rec("h2", &[1.0, 0.05, 0.0])];
        let set = build_negative_set(&overlapping, &candidates, 2).unwrap();
        assert_eq!(set.ids.iter().collect::<Vec<_>>(), ["a", "b"]);
        let overlapping = [rec("h1", &[1.0, 0.0, 0.0]), rec("h2", &[0.7, 0.75, 0.0])];
        let set = build_negative_set(&overlapping, &candidates, 2).unwrap();
        assert_eq!(set.ids.len(), 3);
        assert!(build_negative_set(&overlapping, &[], 2).is_err());
    }

    #[test]
    fn fallback_embedding_contract() {
        let a = fallback_embed("abc", 64).unwrap();
        assert_eq!(a, fallback_embed("abc", 64).unwrap());
        assert!((norm(&a) - 1.0).abs() < 1e-9);
        assert_eq!(fallback_embed("ABC", 64).unwrap(), a);
        assert!(fallback_embed("", 64).is_err());
        assert!(fallback_embed("  ", 64).is_err());
        assert!(fallback_embed("abc", 8).is_err());
        assert_eq!(title_trigrams("ab"), [" ab", "ab "].map(|s| s.to_string()));
    }
}
