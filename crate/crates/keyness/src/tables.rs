//! Term tables on disk: `terms.csv` (`subreddit,term,f_with,m_with`) and the
//! sidecar `totals.csv` (`subreddit,female_total,male_total`).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use keyness_core::termcount::{Presence, TermTable};
use keyness_core::SubredditStats;
use serde::{Deserialize, Serialize};

use crate::error::{csv_err, unwritable, Error, Result};

pub const TERMS_FILE: &str = "terms.csv";
pub const TOTALS_FILE: &str = "totals.csv";

#[derive(Serialize, Deserialize)]
struct TermRow {
    subreddit: String,
    term: String,
    f_with: u64,
    m_with: u64,
}

#[derive(Serialize, Deserialize)]
struct TotalsRow {
    subreddit: String,
    female_total: u64,
    male_total: u64,
}

pub fn write_tables(dir: &Path, tables: &BTreeMap<String, TermTable>) -> Result<()> {
    fs::create_dir_all(dir).map_err(unwritable(dir))?;
    let totals_path = dir.join(TOTALS_FILE);
    let mut totals = csv::Writer::from_path(&totals_path).map_err(csv_err(&totals_path))?;
    let terms_path = dir.join(TERMS_FILE);
    let mut terms = csv::Writer::from_path(&terms_path).map_err(csv_err(&terms_path))?;
    for t in tables.values() {
        totals
            .serialize(TotalsRow {
                subreddit: t.subreddit.clone(),
                female_total: t.female_total,
                male_total: t.male_total,
            })
            .map_err(csv_err(&totals_path))?;
        for (term, p) in &t.presence {
            terms
                .serialize(TermRow {
                    subreddit: t.subreddit.clone(),
                    term: term.clone(),
                    f_with: p.f_with,
                    m_with: p.m_with,
                })
                .map_err(csv_err(&terms_path))?;
        }
    }
    totals.flush().map_err(unwritable(&totals_path))?;
    terms.flush().map_err(unwritable(&terms_path))?;
    Ok(())
}

/// Reads a totals sidecar as per-forum statistics (empty forums dropped).
pub fn read_totals(path: &Path) -> Result<Vec<SubredditStats>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: TotalsRow = row.map_err(csv_err(path))?;
        out.extend(SubredditStats::new(row.subreddit, row.female_total, row.male_total));
    }
    Ok(out)
}

pub fn read_tables(dir: &Path) -> Result<BTreeMap<String, TermTable>> {
    let totals_path = dir.join(TOTALS_FILE);
    let mut tables: BTreeMap<String, TermTable> = BTreeMap::new();
    let mut r = csv::Reader::from_path(&totals_path).map_err(csv_err(&totals_path))?;
    for row in r.deserialize() {
        let row: TotalsRow = row.map_err(csv_err(&totals_path))?;
        let mut t = TermTable::new(row.subreddit.clone());
        t.female_total = row.female_total;
        t.male_total = row.male_total;
        tables.insert(row.subreddit, t);
    }
    let terms_path = dir.join(TERMS_FILE);
    let mut r = csv::Reader::from_path(&terms_path).map_err(csv_err(&terms_path))?;
    for (idx, row) in r.deserialize().enumerate() {
        let row: TermRow = row.map_err(csv_err(&terms_path))?;
        let format_err = |message: String| Error::Format { path: terms_path.clone(), line: idx + 2, message };
        let table = tables
            .get_mut(&row.subreddit)
            .ok_or_else(|| format_err(format!("subreddit {:?} missing from {TOTALS_FILE}", row.subreddit)))?;
        if row.f_with > table.female_total || row.m_with > table.male_total || row.f_with + row.m_with == 0 {
            return Err(format_err(format!("counts for {:?} out of range", row.term)));
        }
        table.presence.insert(row.term, Presence { f_with: row.f_with, m_with: row.m_with });
    }
    Ok(tables)
}
