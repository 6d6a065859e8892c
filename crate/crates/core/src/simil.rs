//! TF-IDF vectors over forums, cosine similarity and average-linkage clustering.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::termcount::TermTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TfWeighting {
    /// Number of sampled comments containing the term.
    #[default]
    Presence,
    /// `1 + ln(presence)`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum IdfWeighting {
    /// `ln(N / df)`; terms in every forum weigh nothing.
    #[default]
    Plain,
    /// `ln(1 + N / df)`.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TfIdfConfig {
    pub tf: TfWeighting,
    pub idf: IdfWeighting,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimilError {
    #[error("need at least 2 subreddits, got {0}")]
    TooFewDocuments(usize),
}

/// Sparse TF-IDF weights of one forum; only positive weights are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SubredditVector {
    pub subreddit: String,
    pub weights: BTreeMap<String, f64>,
}

impl SubredditVector {
    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.weights.values().map(|w| w * w).sum())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SubredditVector {
            subreddit: self.subreddit.clone(),
            weights: self.weights.iter().map(|(t, w)| (t.clone(), w * factor)).collect(),
        }
    }
}

/// Weights every forum's terms by presence times inverse forum frequency.
pub fn tfidf_vectors(
    tables: &BTreeMap<String, TermTable>,
    config: TfIdfConfig,
) -> Result<BTreeMap<String, SubredditVector>, SimilError> {
    if tables.len() < 2 {
        return Err(SimilError::TooFewDocuments(tables.len()));
    }
    let n = tables.len() as f64;
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for table in tables.values() {
        for (term, p) in &table.presence {
            if p.total() > 0 {
                *df.entry(term.as_str()).or_default() += 1;
            }
        }
    }
    let idf = |term: &str| {
        let ratio = n / f64::from(df[term]);
        match config.idf {
            IdfWeighting::Plain => libm::log(ratio),
            IdfWeighting::Smooth => libm::log1p(ratio),
        }
    };
    let vectors = tables
        .iter()
        .map(|(sub, table)| {
            let weights = table
                .presence
                .iter()
                .filter(|(_, p)| p.total() > 0)
                .filter_map(|(term, p)| {
                    let count = p.total() as f64;
                    let tf = match config.tf {
                        TfWeighting::Presence => count,
                        TfWeighting::Log => 1.0 + libm::log(count),
                    };
                    let w = tf * idf(term);
                    (w > 0.0).then(|| (term.clone(), w))
                })
                .collect();
            (sub.clone(), SubredditVector { subreddit: sub.clone(), weights })
        })
        .collect();
    Ok(vectors)
}

/// Cosine of the angle between two weight vectors; 0 if either is all zero.
pub fn cosine(u: &SubredditVector, v: &SubredditVector) -> f64 {
    let (small, large) = if u.weights.len() <= v.weights.len() { (u, v) } else { (v, u) };
    let dot: f64 = small.weights.iter().filter_map(|(t, w)| large.weights.get(t).map(|x| w * x)).sum();
    let norms = u.norm() * v.norm();
    if norms == 0.0 {
        return 0.0;
    }
    (dot / norms).clamp(0.0, 1.0)
}

/// Square cosine similarity matrix over the vectors, in key order.
pub fn similarity_matrix(vectors: &BTreeMap<String, SubredditVector>) -> (Vec<String>, Vec<Vec<f64>>) {
    let labels: Vec<String> = vectors.keys().cloned().collect();
    let vs: Vec<&SubredditVector> = vectors.values().collect();
    let n = vs.len();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        matrix[i][i] = if vs[i].norm() > 0.0 { 1.0 } else { 0.0 };
        for j in i + 1..n {
            let s = cosine(vs[i], vs[j]);
            matrix[i][j] = s;
            matrix[j][i] = s;
        }
    }
    (labels, matrix)
}

/// One agglomeration step. Leaves are nodes `0..n`; the cluster formed by
/// merge `s` is node `n + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Leaves under the new node.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Leaf labels under a node.
    pub fn members(&self, node: usize) -> Vec<&str> {
        let n = self.leaves.len();
        if node < n {
            return vec![self.leaves[node].as_str()];
        }
        let m = &self.merges[node - n];
        let mut out = self.members(m.left);
        out.extend(self.members(m.right));
        out
    }
}

const TIE_EPS: f64 = 1e-12;

/// Average-linkage clustering of the forums on `1 - cosine`.
pub fn cluster(vectors: &BTreeMap<String, SubredditVector>) -> Result<Dendrogram, SimilError> {
    if vectors.len() < 2 {
        return Err(SimilError::TooFewDocuments(vectors.len()));
    }
    let (labels, sim) = similarity_matrix(vectors);
    let dist = sim.iter().map(|row| row.iter().map(|s| 1.0 - s).collect()).collect();
    Ok(cluster_distances(labels, dist))
}

/// Average-linkage (UPGMA) clustering of a symmetric distance matrix.
///
/// Labels must be sorted; equal distances (within 1e-12) merge the pair
/// whose smallest member labels compare lowest.
pub fn cluster_distances(labels: Vec<String>, mut dist: Vec<Vec<f64>>) -> Dendrogram {
    let n = labels.len();
    debug_assert!(labels.windows(2).all(|w| w[0] <= w[1]));
    // Per slot: (node id, size, smallest leaf index). Leaf order = label order.
    let mut slots: Vec<Option<(usize, usize, usize)>> = (0..n).map(|i| Some((i, 1, i))).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for i in 0..n {
            let Some((_, _, ki)) = slots[i] else { continue };
            for j in i + 1..n {
                let Some((_, _, kj)) = slots[j] else { continue };
                let d = dist[i][j];
                let key = (ki.min(kj), ki.max(kj));
                let better = match best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < bd - TIE_EPS || (d <= bd + TIE_EPS && key < bkey),
                };
                if better {
                    best = Some((d, key, i, j));
                }
            }
        }
        let (height, _, i, j) = best.expect("at least two active clusters");
        let (id_i, size_i, key_i) = slots[i].expect("active");
        let (id_j, size_j, key_j) = slots[j].expect("active");
        let (left, right) = if key_i <= key_j { (id_i, id_j) } else { (id_j, id_i) };
        merges.push(Merge { left, right, height, size: size_i + size_j });

        let (wi, wj) = (size_i as f64, size_j as f64);
        for k in 0..n {
            if k == i || k == j || slots[k].is_none() {
                continue;
            }
            let d = (wi * dist[i][k] + wj * dist[j][k]) / (wi + wj);
            dist[i][k] = d;
            dist[k][i] = d;
        }
        slots[i] = Some((n + step, size_i + size_j, key_i.min(key_j)));
        slots[j] = None;
    }
    Dendrogram { leaves: labels, merges }
}
