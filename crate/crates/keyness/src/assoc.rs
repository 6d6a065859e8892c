//! Association runs on disk: one CSV per forum plus a `runs.csv` index.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use keyness_core::assoc::{AssociationRun, TermAssociation};
use keyness_core::Gender;
use serde::{Deserialize, Serialize};

use crate::error::{csv_err, unwritable, Error, Result};

pub const INDEX_FILE: &str = "runs.csv";

#[derive(Serialize, Deserialize)]
struct IndexRow {
    subreddit: String,
    file: String,
    alpha: f64,
    critical: f64,
    female_total: u64,
    male_total: u64,
    terms_seen: usize,
    candidates: usize,
    significant: usize,
}

#[derive(Serialize, Deserialize)]
struct TermRow {
    term: String,
    direction: Gender,
    f_with: u64,
    f_total: u64,
    m_with: u64,
    m_total: u64,
    chi2: f64,
    p: f64,
    significant: bool,
}

/// File stem for a forum: ASCII alphanumerics, `_` and `-` kept, the rest
/// replaced by `_`.
pub fn file_stem(subreddit: &str) -> String {
    let stem: String =
        subreddit.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect();
    if stem.is_empty() {
        "_".to_string()
    } else {
        stem
    }
}

/// Unique stems for a sorted set of forum names. Clashes get a numeric suffix.
pub fn file_stems<'a>(subreddits: impl IntoIterator<Item = &'a str>) -> BTreeMap<&'a str, String> {
    let mut used = BTreeSet::new();
    let mut out = BTreeMap::new();
    for sub in subreddits {
        let base = file_stem(sub);
        let mut stem = base.clone();
        let mut n = 1;
        while !used.insert(stem.to_ascii_lowercase()) {
            n += 1;
            stem = format!("{base}-{n}");
        }
        out.insert(sub, stem);
    }
    out
}

pub fn write_runs(dir: &Path, runs: &BTreeMap<String, AssociationRun>) -> Result<()> {
    fs::create_dir_all(dir).map_err(unwritable(dir))?;
    let stems = file_stems(runs.keys().map(String::as_str));
    let index_path = dir.join(INDEX_FILE);
    let mut index = csv::Writer::from_path(&index_path).map_err(csv_err(&index_path))?;
    for (sub, run) in runs {
        let file = format!("{}.csv", stems[sub.as_str()]);
        let path = dir.join(&file);
        let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
        for r in &run.results {
            w.serialize(TermRow {
                term: r.term.clone(),
                direction: r.direction,
                f_with: r.a,
                f_total: r.female_total(),
                m_with: r.c,
                m_total: r.male_total(),
                chi2: r.chi2,
                p: r.p,
                significant: r.significant,
            })
            .map_err(csv_err(&path))?;
        }
        if run.results.is_empty() {
            w.write_record(["term", "direction", "f_with", "f_total", "m_with", "m_total", "chi2", "p", "significant"])
                .map_err(csv_err(&path))?;
        }
        w.flush().map_err(unwritable(&path))?;
        index
            .serialize(IndexRow {
                subreddit: sub.clone(),
                file,
                alpha: run.alpha,
                critical: run.critical,
                female_total: run.female_total,
                male_total: run.male_total,
                terms_seen: run.terms_seen,
                candidates: run.candidates(),
                significant: run.n_significant(),
            })
            .map_err(csv_err(&index_path))?;
    }
    index.flush().map_err(unwritable(&index_path))?;
    Ok(())
}

pub fn read_runs(dir: &Path) -> Result<BTreeMap<String, AssociationRun>> {
    let index_path = dir.join(INDEX_FILE);
    let mut index = csv::Reader::from_path(&index_path).map_err(csv_err(&index_path))?;
    let mut runs = BTreeMap::new();
    for row in index.deserialize() {
        let row: IndexRow = row.map_err(csv_err(&index_path))?;
        let path = dir.join(&row.file);
        let mut r = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
        let mut results = Vec::new();
        for (idx, t) in r.deserialize().enumerate() {
            let t: TermRow = t.map_err(csv_err(&path))?;
            if t.f_with > t.f_total
                || t.m_with > t.m_total
                || t.f_total != row.female_total
                || t.m_total != row.male_total
            {
                return Err(Error::Format {
                    path: path.clone(),
                    line: idx + 2,
                    message: format!("inconsistent counts for {:?}", t.term),
                });
            }
            results.push(TermAssociation {
                term: t.term,
                a: t.f_with,
                b: t.f_total - t.f_with,
                c: t.m_with,
                d: t.m_total - t.m_with,
                chi2: t.chi2,
                p: t.p,
                significant: t.significant,
                direction: t.direction,
            });
        }
        if results.len() != row.candidates {
            return Err(Error::Format {
                path: index_path.clone(),
                line: runs.len() + 2,
                message: format!("{} lists {} candidates, file has {}", row.subreddit, row.candidates, results.len()),
            });
        }
        runs.insert(
            row.subreddit.clone(),
            AssociationRun {
                subreddit: row.subreddit,
                alpha: row.alpha,
                critical: row.critical,
                female_total: row.female_total,
                male_total: row.male_total,
                terms_seen: row.terms_seen,
                results,
            },
        );
    }
    Ok(runs)
}
