//! Similarity matrix CSV and dendrogram JSON.

use std::fs;
use std::path::Path;

use std::collections::BTreeMap;

use keyness_core::simil::{Dendrogram, SubredditVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{csv_err, json_err, unwritable, Result};

pub const MATRIX_FILE: &str = "similarity.csv";
pub const DENDROGRAM_FILE: &str = "dendrogram.json";

/// Logs when some forums have no positive weight, which happens under plain
/// IDF when every one of their terms occurs in every forum.
pub fn warn_if_empty(vectors: &BTreeMap<String, SubredditVector>) {
    let empty: Vec<&str> = vectors.values().filter(|v| v.weights.is_empty()).map(|v| v.subreddit.as_str()).collect();
    if !empty.is_empty() {
        log::warn!(
            "{} subreddit(s) have all-zero TF-IDF vectors (e.g. {:?}); smoothed IDF avoids this",
            empty.len(),
            empty[0]
        );
    }
}

/// Square CSV: header `subreddit,<labels...>`, one row per label.
pub fn write_matrix(path: &Path, labels: &[String], matrix: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["subreddit".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header).map_err(csv_err(path))?;
    for (label, row) in labels.iter().zip(matrix) {
        let mut rec = vec![label.clone()];
        rec.extend(row.iter().map(|s| s.to_string()));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(unwritable(path))
}

#[derive(Serialize)]
struct MergeJson {
    left: usize,
    right: usize,
    height: f64,
    size: usize,
}

fn subtree(d: &Dendrogram, node: usize) -> Value {
    let n = d.leaves.len();
    if node < n {
        return json!({ "name": d.leaves[node] });
    }
    let m = &d.merges[node - n];
    json!({
        "height": m.height,
        "size": m.size,
        "children": [subtree(d, m.left), subtree(d, m.right)],
    })
}

/// `leaves`, flat `merges` (leaves are nodes `0..n`, merge `s` creates node
/// `n + s`) and the same tree nested under `tree`.
pub fn dendrogram_json(d: &Dendrogram) -> Value {
    let merges: Vec<MergeJson> =
        d.merges.iter().map(|m| MergeJson { left: m.left, right: m.right, height: m.height, size: m.size }).collect();
    let root = if d.leaves.is_empty() { Value::Null } else { subtree(d, d.leaves.len() + d.merges.len() - 1) };
    json!({ "leaves": d.leaves, "merges": merges, "tree": root })
}

pub fn write_dendrogram(path: &Path, d: &Dendrogram) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&dendrogram_json(d)).map_err(json_err(path))?;
    text.push('\n');
    fs::write(path, text).map_err(unwritable(path))
}
